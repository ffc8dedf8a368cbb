use nalgebra::{DMatrix, DVector, RowDVector};

use super::{expm, StateSpaceModel};
use crate::error::{ensure_finite, Error, Result};

/// Zero-order-hold sampled plant advanced one period at a time.
#[derive(Clone, Debug)]
pub struct DiscretePlant {
    pub name: String,
    ad: DMatrix<f64>,
    bd: DVector<f64>,
    c: RowDVector<f64>,
    d: f64,
    ts: f64,
    x: DVector<f64>,
    scratch: DVector<f64>,
}

/// Exact ZOH sampling: one exponential of `[[A, B], [0, 0]] * ts` yields
/// `Ad = e^(A ts)` and `Bd = int_0^ts e^(A t) dt B`.
pub fn discretize_zoh(m: &StateSpaceModel, ts: f64) -> Result<DiscretePlant> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(Error::InvalidParameter(format!("sample period must be > 0, got {ts}")));
    }
    let n = m.order();
    let mut aug = DMatrix::<f64>::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(m.a());
    aug.view_mut((0, n), (n, 1)).copy_from(m.b());
    let e = expm(&(aug * ts));
    Ok(DiscretePlant {
        name: m.name.clone(),
        ad: e.view((0, 0), (n, n)).into_owned(),
        bd: e.view((0, n), (n, 1)).column(0).into_owned(),
        c: m.c().clone(),
        d: m.d(),
        ts,
        x: DVector::zeros(n),
        scratch: DVector::zeros(n),
    })
}

/// Sampled unit-step response from zero state, `n` samples starting at `t = 0`.
pub fn step_response(m: &StateSpaceModel, ts: f64, n: usize) -> Result<Vec<f64>> {
    let mut plant = discretize_zoh(m, ts)?;
    (0..n).map(|_| plant.step(1.0)).collect()
}

impl DiscretePlant {
    pub fn ad(&self) -> &DMatrix<f64> {
        &self.ad
    }

    pub fn bd(&self) -> &DVector<f64> {
        &self.bd
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn set_state(&mut self, x: DVector<f64>) -> Result<()> {
        if x.len() != self.x.len() {
            return Err(Error::Dimension(format!(
                "state has {} entries, plant order is {}",
                x.len(),
                self.x.len()
            )));
        }
        self.x = x;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.x.fill(0.0);
    }

    /// `C x` for the current state, excluding feedthrough.
    pub fn output(&self) -> f64 {
        self.c.iter().zip(self.x.iter()).map(|(c, x)| c * x).sum()
    }

    /// Returns `y_k = C x_k + D u_k`, then advances `x_{k+1} = Ad x_k + Bd u_k`.
    pub fn step(&mut self, u: f64) -> Result<f64> {
        ensure_finite(u, "plant input")?;
        let y = self.output() + self.d * u;
        self.scratch.gemv(1.0, &self.ad, &self.x, 0.0);
        self.scratch.axpy(u, &self.bd, 1.0);
        std::mem::swap(&mut self.x, &mut self.scratch);
        Ok(y)
    }

    pub fn eigenvalues(&self) -> Vec<num_complex::Complex64> {
        self.ad.complex_eigenvalues().iter().copied().collect()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
