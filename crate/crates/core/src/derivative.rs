//! Causal output-derivative estimation from sampled measurements.

use std::collections::VecDeque;

use crate::error::{ensure_finite, Error, Result};

/// First and second derivative estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DerivativeEstimate {
    pub d1: f64,
    pub d2: f64,
}

/// Backward finite differences over a short history, with optional
/// first-order smoothing `est = (1 - beta) raw + beta est_prev`.
///
/// Orders whose stencil is not yet filled report 0.
#[derive(Clone, Debug)]
pub struct DerivativeEstimator {
    history: VecDeque<f64>,
    ts: f64,
    order: usize,
    smoothing: f64,
    estimate: DerivativeEstimate,
}

impl DerivativeEstimator {
    pub fn new(ts: f64, order: usize, smoothing: f64) -> Result<Self> {
        if !(ts > 0.0 && ts.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample period must be > 0, got {ts}")));
        }
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidParameter(format!("derivative order must be 1 or 2, got {order}")));
        }
        if !(0.0..1.0).contains(&smoothing) {
            return Err(Error::InvalidParameter(format!("smoothing must lie in [0, 1), got {smoothing}")));
        }
        Ok(Self {
            history: VecDeque::with_capacity(order + 1),
            ts,
            order,
            smoothing,
            estimate: DerivativeEstimate::default(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Latest estimate without consuming a sample.
    pub fn estimate(&self) -> DerivativeEstimate {
        self.estimate
    }

    pub fn push(&mut self, y: f64) -> Result<DerivativeEstimate> {
        ensure_finite(y, "measured output")?;
        if self.history.len() == self.order + 1 {
            self.history.pop_back();
        }
        self.history.push_front(y);

        let h = &self.history;
        let beta = self.smoothing;
        let smooth = |raw: f64, prev: f64| (1.0 - beta) * raw + beta * prev;
        if h.len() >= 2 {
            let raw = (h[0] - h[1]) / self.ts;
            self.estimate.d1 = smooth(raw, self.estimate.d1);
        }
        if self.order >= 2 && h.len() >= 3 {
            let raw = (h[0] - 2.0 * h[1] + h[2]) / (self.ts * self.ts);
            self.estimate.d2 = smooth(raw, self.estimate.d2);
        }
        Ok(self.estimate)
    }

    pub fn reset(&mut self) {
        self.history.clear();
        self.estimate = DerivativeEstimate::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn feed(est: &mut DerivativeEstimator, f: impl Fn(f64) -> f64, n: usize) -> Vec<DerivativeEstimate> {
        let ts = est.ts;
        (0..n).map(|k| est.push(f(k as f64 * ts)).unwrap()).collect()
    }

    #[test]
    fn warm_up_reports_zero() {
        let mut e = DerivativeEstimator::new(0.1, 2, 0.0).unwrap();
        assert_eq!(e.push(5.0).unwrap(), DerivativeEstimate::default());
        let second = e.push(6.0).unwrap();
        assert!((second.d1 - 10.0).abs() < 1e-12);
        assert_eq!(second.d2, 0.0);
    }

    #[test]
    fn constant_signal() {
        let mut e = DerivativeEstimator::new(1e-3, 2, 0.0).unwrap();
        let out = feed(&mut e, |_| 4.2, 10);
        assert_eq!(*out.last().unwrap(), DerivativeEstimate { d1: 0.0, d2: 0.0 });
    }

    #[test]
    fn ramp_is_exact() {
        // dyadic sample period keeps every sample exactly representable
        let ts = 1.0 / 1024.0;
        let mut e = DerivativeEstimator::new(ts, 2, 0.0).unwrap();
        for est in &feed(&mut e, |t| t, 50)[2..] {
            assert_eq!(est.d1, 1.0);
            assert_eq!(est.d2, 0.0);
        }
    }

    #[test]
    fn quadratic_has_one_sided_bias() {
        let ts = 1e-3;
        let mut e = DerivativeEstimator::new(ts, 2, 0.0).unwrap();
        let out = feed(&mut e, |t| t * t, 40);
        for (k, est) in out.iter().enumerate().skip(2) {
            let t = k as f64 * ts;
            assert!((est.d2 - 2.0).abs() < 1e-6, "k={k} d2={}", est.d2);
            assert!((est.d1 - (2.0 * t - ts)).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn first_order_estimator_skips_second_derivative() {
        let mut e = DerivativeEstimator::new(1.0, 1, 0.0).unwrap();
        let out = feed(&mut e, |t| t * t, 5);
        assert!(out.iter().all(|d| d.d2 == 0.0));
        assert_eq!(e.history.len(), 2);
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(DerivativeEstimator::new(0.0, 1, 0.0).is_err());
        assert!(DerivativeEstimator::new(1.0, 3, 0.0).is_err());
        assert!(DerivativeEstimator::new(1.0, 1, 1.0).is_err());
        let mut e = DerivativeEstimator::new(1.0, 1, 0.0).unwrap();
        assert!(matches!(e.push(f64::NAN), Err(Error::Fault(_))));
    }

    proptest! {
        #[test]
        fn linear_in_the_signal(
            ys in proptest::collection::vec(-100.0f64..100.0, 3..20),
            zs in proptest::collection::vec(-100.0f64..100.0, 20),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let ts = 1e-2;
            let mk = || DerivativeEstimator::new(ts, 2, 0.0).unwrap();
            let (mut e1, mut e2, mut e12) = (mk(), mk(), mk());
            for (y, z) in ys.iter().zip(&zs) {
                let p = e1.push(*y).unwrap();
                let q = e2.push(*z).unwrap();
                let r = e12.push(a * y + b * z).unwrap();
                let tol = 1e-9 * (1.0 + (a * p.d2).abs() + (b * q.d2).abs());
                prop_assert!((r.d1 - (a * p.d1 + b * q.d1)).abs() <= tol);
                prop_assert!((r.d2 - (a * p.d2 + b * q.d2)).abs() <= tol);
            }
        }

        #[test]
        fn smoothing_stays_within_raw_envelope(
            ys in proptest::collection::vec(-10.0f64..10.0, 3..30),
            beta in 0.0f64..0.99,
        ) {
            let ts = 0.5;
            let mut raw = DerivativeEstimator::new(ts, 2, 0.0).unwrap();
            let mut smooth = DerivativeEstimator::new(ts, 2, beta).unwrap();
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for y in ys {
                let r = raw.push(y).unwrap();
                let s = smooth.push(y).unwrap();
                lo = lo.min(r.d1);
                hi = hi.max(r.d1);
                prop_assert!(s.d1 >= lo - 1e-12 && s.d1 <= hi + 1e-12);
            }
        }
    }
}
