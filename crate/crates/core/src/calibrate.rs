//! Coarse grid search over controller gains against one or more base scenarios.

use rayon::prelude::*;

use crate::control::{ControllerConfig, GainFunction, GainMemory, IpiConfig, IstarPiConfig};
use crate::sim::{run_closed_loop, Scenario};

/// Default admissibility bound on `max |u|`.
pub const DEFAULT_U_BOUND: f64 = 100.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub controller: ControllerConfig,
    pub iae: f64,
    pub max_abs_u: f64,
    pub diverged: bool,
    /// Finished without divergence and `max |u|` within the bound.
    pub admissible: bool,
}

/// `mantissas x 10^e` for each decade exponent in `lo..=hi`.
pub fn log_grid(lo: i32, hi: i32, mantissas: &[f64]) -> Vec<f64> {
    (lo..=hi).flat_map(|e| mantissas.iter().map(move |m| m * 10f64.powi(e))).collect()
}

fn signed(values: &[f64]) -> Vec<f64> {
    values.iter().flat_map(|&v| [v, -v]).collect()
}

/// Coarse logarithmic i*-PI grid spanning both gain signs.
pub fn istar_grid(memory: GainMemory) -> Vec<ControllerConfig> {
    let lambdas = signed(&log_grid(-3, 1, &[1.0, 3.0]));
    let delta1s = signed(&log_grid(-9, -2, &[1.0, 3.0]));
    let mut delta2s = vec![0.0];
    delta2s.extend(signed(&log_grid(-14, -9, &[1.0])));
    let kis = signed(&log_grid(-1, 4, &[1.0, 3.0]));
    let mut out = Vec::with_capacity(lambdas.len() * delta1s.len() * delta2s.len() * kis.len());
    for &lambda in &lambdas {
        for &delta1 in &delta1s {
            for &delta2 in &delta2s {
                for &ki in &kis {
                    out.push(ControllerConfig::IstarPi(IstarPiConfig {
                        lambda,
                        delta1,
                        delta2,
                        gain: GainFunction::Integrator { ki },
                        memory,
                    }));
                }
            }
        }
    }
    out
}

/// i-PI grid over `kp` and `ki` (zero included) at fixed `alpha` and order.
pub fn ipi_grid(alpha: f64, order: usize) -> Vec<ControllerConfig> {
    let mut gains = vec![0.0];
    gains.extend(log_grid(-2, 1, &[1.0, 2.0, 5.0]));
    let mut out = Vec::new();
    for &kp in &gains {
        for &ki in &gains {
            out.push(ControllerConfig::Ipi(IpiConfig { alpha, order, kp, ki }));
        }
    }
    out
}

/// Runs every candidate on each base scenario (candidates in parallel) and
/// returns them ranked: admissible first, then by total IAE; grid order
/// breaks ties. A candidate is admissible only if it is on every base.
pub fn calibrate(bases: &[Scenario], candidates: &[ControllerConfig], u_bound: f64) -> Vec<Candidate> {
    let mut results: Vec<(usize, Candidate)> = candidates
        .par_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let mut total =
                Candidate { controller: *c, iae: 0.0, max_abs_u: 0.0, diverged: false, admissible: true };
            for base in bases {
                let mut sc = base.clone();
                sc.controller = *c;
                // invalid parameter combinations are skipped, not ranked
                let tr = run_closed_loop(&sc).ok()?;
                let m = &tr.metrics;
                total.iae += m.iae;
                total.max_abs_u = total.max_abs_u.max(m.max_abs_u);
                total.diverged |= m.diverged;
            }
            total.admissible = !total.diverged && total.max_abs_u <= u_bound;
            Some((i, total))
        })
        .collect();
    results.sort_by(|(i, a), (j, b)| {
        b.admissible.cmp(&a.admissible).then(a.iae.total_cmp(&b.iae)).then(i.cmp(j))
    });
    results.into_iter().map(|(_, c)| c).collect()
}
