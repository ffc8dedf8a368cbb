//! Continuous-time SISO plants: realization, analysis and exact sampling.

mod discrete;
mod expm;
pub mod library;
pub mod poly;

pub use discrete::{discretize_zoh, step_response, DiscretePlant};
pub use expm::expm;

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Continuous-time SISO state-space model `x' = A x + B u`, `y = C x + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceModel {
    pub name: String,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: RowDVector<f64>,
    d: f64,
}

impl StateSpaceModel {
    pub fn new(
        name: impl Into<String>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: RowDVector<f64>,
        d: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(Error::Dimension("state dimension must be at least 1".into()));
        }
        if a.ncols() != n {
            return Err(Error::Dimension(format!("A is {}x{}, not square", n, a.ncols())));
        }
        if b.len() != n {
            return Err(Error::Dimension(format!("B has {} rows, A has {n}", b.len())));
        }
        if c.len() != n {
            return Err(Error::Dimension(format!("C has {} columns, A has {n}", c.len())));
        }
        let finite = a.iter().chain(b.iter()).chain(c.iter()).all(|v| v.is_finite());
        if !finite || !d.is_finite() {
            return Err(Error::InvalidParameter("state-space entries must be finite".into()));
        }
        Ok(Self { name: name.into(), a, b, c, d })
    }

    /// Builds a model from row-major nested slices.
    pub fn from_rows(name: impl Into<String>, a: &[&[f64]], b: &[f64], c: &[f64], d: f64) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("A rows have inconsistent lengths".into()));
        }
        let flat: Vec<f64> = a.iter().flat_map(|row| row.iter().copied()).collect();
        Self::new(
            name,
            DMatrix::from_row_slice(n, n, &flat),
            DVector::from_column_slice(b),
            RowDVector::from_row_slice(c),
            d,
        )
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &RowDVector<f64> {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Transfer function `C adj(sI - A) B / det(sI - A) + D`.
    pub fn to_transfer_function(&self) -> TransferFunction {
        ss_to_tf(self)
    }

    /// Eigenvalues of `A`.
    pub fn poles(&self) -> Vec<Complex64> {
        poly::roots(&characteristic_polynomial(&self.a))
    }

    /// Roots of the transfer-function numerator.
    pub fn zeros(&self) -> Vec<Complex64> {
        self.to_transfer_function().zeros()
    }

    /// Steady-state gain `-C A^-1 B + D`.
    pub fn dc_gain(&self) -> Result<f64> {
        let n = self.order();
        let scale = self.a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let det = self.a.determinant();
        if scale == 0.0 || det.abs() <= 1e-12 * scale.powi(n as i32) {
            return Err(Error::PoleAtOrigin);
        }
        let x = self.a.clone().lu().solve(&self.b).ok_or(Error::PoleAtOrigin)?;
        Ok(-(&self.c * x)[(0, 0)] + self.d)
    }

    /// True iff every zero lies strictly in the open left half-plane.
    pub fn is_minimum_phase(&self) -> bool {
        self.zeros().iter().all(|z| z.re < 0.0)
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.re < 0.0)
    }

    /// Minimum-norm state reproducing output `y` with `u = 0`.
    pub(crate) fn state_for_output(&self, y: f64) -> DVector<f64> {
        let cc = self.c.norm_squared();
        if cc == 0.0 {
            return DVector::zeros(self.order());
        }
        self.c.transpose() * (y / cc)
    }
}

/// Rational transfer function with coefficients in descending powers of `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    /// Trims leading zeros and checks properness.
    pub fn new(num: &[f64], den: &[f64]) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidTransferFunction("empty coefficient list".into()));
        }
        if num.iter().chain(den).any(|c| !c.is_finite()) {
            return Err(Error::InvalidTransferFunction("non-finite coefficient".into()));
        }
        let num = poly::trim(num);
        let den = poly::trim(den);
        if den == [0.0] {
            return Err(Error::InvalidTransferFunction("zero denominator".into()));
        }
        let (nd, dd) = (poly::degree(&num), poly::degree(&den));
        if nd > dd && num != [0.0] {
            return Err(Error::Improper { num: nd, den: dd });
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        poly::eval(&self.num, s) / poly::eval(&self.den, s)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        poly::roots(&self.num)
    }

    pub fn poles(&self) -> Vec<Complex64> {
        poly::roots(&self.den)
    }

    /// Controllable canonical realization.
    pub fn to_state_space(&self, name: impl Into<String>) -> Result<StateSpaceModel> {
        tf_to_ss(self, name)
    }
}

/// Characteristic polynomial `det(sI - A)` (monic, descending).
pub fn characteristic_polynomial(a: &DMatrix<f64>) -> Vec<f64> {
    faddeev_leverrier(a).0
}

/// Faddeev-LeVerrier recursion: returns the characteristic polynomial and the
/// matrices `M_1..M_n` with `adj(sI - A) = sum_k M_k s^(n-k)`.
fn faddeev_leverrier(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DMatrix<f64>>) {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut den = vec![1.0];
    let mut adj = Vec::with_capacity(n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &eye * den[k - 1];
        let am = a * &m;
        den.push(-am.trace() / k as f64);
        adj.push(m.clone());
    }
    (den, adj)
}

pub fn ss_to_tf(m: &StateSpaceModel) -> TransferFunction {
    let (den, adj) = faddeev_leverrier(&m.a);
    let mut num = Vec::with_capacity(den.len());
    num.push(m.d);
    for (k, mk) in adj.iter().enumerate() {
        let cmb = (&m.c * mk * &m.b)[(0, 0)];
        num.push(cmb + m.d * den[k + 1]);
    }
    // A validated model always yields a proper, non-degenerate ratio.
    TransferFunction::new(&num, &den).expect("state-space model yields a proper transfer function")
}

pub fn tf_to_ss(tf: &TransferFunction, name: impl Into<String>) -> Result<StateSpaceModel> {
    let n = poly::degree(&tf.den);
    if n == 0 {
        return Err(Error::InvalidTransferFunction("a static gain has no state realization".into()));
    }
    let lead = tf.den[0];
    let den: Vec<f64> = tf.den.iter().map(|c| c / lead).collect();
    let mut num = vec![0.0; n + 1 - tf.num.len()];
    num.extend(tf.num.iter().map(|c| c / lead));

    let d = num[0];
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        a[(0, j)] = -den[j + 1];
    }
    for i in 1..n {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[0] = 1.0;
    let c = RowDVector::from_iterator(n, (1..=n).map(|k| num[k] - d * den[k]));
    StateSpaceModel::new(name, a, b, c, d)
}
