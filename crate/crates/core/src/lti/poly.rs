//! Real polynomials stored as coefficient vectors in descending powers.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative threshold under which a leading coefficient is treated as zero.
pub const TRIM_TOL: f64 = 1e-12;

/// Drops leading coefficients below `TRIM_TOL * max|coeff|`.
///
/// The zero polynomial is returned as `[0.0]`.
pub fn trim(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return vec![0.0];
    }
    let first = coeffs.iter().position(|c| c.abs() > TRIM_TOL * scale).unwrap_or(coeffs.len() - 1);
    coeffs[first..].to_vec()
}

pub fn degree(coeffs: &[f64]) -> usize {
    coeffs.len().saturating_sub(1)
}

/// Horner evaluation at a complex point.
pub fn eval(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

pub fn eval_real(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * s + c)
}

/// Roots of a real polynomial, sorted by real then imaginary part.
///
/// Degrees one and two use closed forms; higher degrees take the eigenvalues
/// of the companion matrix.
pub fn roots(coeffs: &[f64]) -> Vec<Complex64> {
    let p = trim(coeffs);
    let mut out = match p.len() {
        0 | 1 => Vec::new(),
        2 => vec![Complex64::new(-p[1] / p[0], 0.0)],
        3 => quadratic(p[0], p[1], p[2]).to_vec(),
        n => {
            let deg = n - 1;
            let mut companion = DMatrix::<f64>::zeros(deg, deg);
            for j in 0..deg {
                companion[(0, j)] = -p[j + 1] / p[0];
            }
            for i in 1..deg {
                companion[(i, i - 1)] = 1.0;
            }
            companion.complex_eigenvalues().iter().copied().collect()
        }
    };
    sort_roots(&mut out);
    out
}

fn quadratic(a: f64, b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        // q shares the sign of b so no cancellation occurs.
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

pub(crate) fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

/// Product of two polynomials.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monic polynomial with the given real roots.
pub fn from_real_roots(roots: &[f64]) -> Vec<f64> {
    roots.iter().fold(vec![1.0], |acc, &r| mul(&acc, &[1.0, -r]))
}
