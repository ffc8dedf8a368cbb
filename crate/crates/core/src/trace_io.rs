//! Lossless CSV traces and JSON metrics reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Metrics, Scenario, SimulationTrace, TraceRow};

pub const CSV_HEADER: &str = "t,r,y,u,eps,plant_id";

/// 17 significant digits, enough to round-trip any f64.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(rows: &[TraceRow], mut out: W) -> Result<()> {
    let mut buf = String::with_capacity(rows.len() * 128 + 32);
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for r in rows {
        for v in [r.t, r.r, r.y, r.u, r.eps] {
            buf.push_str(&fmt(v));
            buf.push(',');
        }
        buf.push_str(&r.plant_id.to_string());
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn csv_string(rows: &[TraceRow]) -> String {
    let mut out = Vec::new();
    write_csv(rows, &mut out).expect("writing to memory cannot fail");
    String::from_utf8(out).expect("csv is ascii")
}

pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => {
            return Err(Error::Csv {
                line: 1,
                msg: format!("expected header {CSV_HEADER:?}, got {:?}", other.unwrap_or("")),
            })
        }
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let line_no = i + 2;
            let err = |msg: String| Error::Csv { line: line_no, msg };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, got {}", fields.len())));
            }
            let mut v = [0.0; 5];
            for (slot, f) in v.iter_mut().zip(&fields) {
                *slot = f.parse().map_err(|e| err(format!("{f:?}: {e}")))?;
            }
            let plant_id = fields[5].parse().map_err(|e| err(format!("{:?}: {e}", fields[5])))?;
            Ok(TraceRow { t: v[0], r: v[1], y: v[2], u: v[3], eps: v[4], plant_id })
        })
        .collect()
}

/// Per-scenario metrics file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub label: String,
    pub controller: String,
    pub plants: Vec<String>,
    pub ts: f64,
    pub duration: f64,
    pub samples: usize,
    pub fault: Option<String>,
    pub metrics: Metrics,
}

impl MetricsReport {
    pub fn new(trace: &SimulationTrace, sc: &Scenario) -> Self {
        Self {
            label: trace.label.clone(),
            controller: sc.controller.label().to_string(),
            plants: sc.plants.iter().map(|p| p.name.clone()).collect(),
            ts: sc.ts,
            duration: sc.duration,
            samples: trace.rows.len(),
            fault: trace.fault.clone(),
            metrics: trace.metrics.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics are plain data") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_line_endings() {
        let rows = [TraceRow { t: 0.0, r: 1.0, y: -0.5, u: 2.0, eps: 1.5, plant_id: 0 }];
        let s = csv_string(&rows);
        assert!(s.starts_with("t,r,y,u,eps,plant_id\n"));
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().nth(1).unwrap(), "0.0000000000000000e0,1.0000000000000000e0,-5.0000000000000000e-1,2.0000000000000000e0,1.5000000000000000e0,0");
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_csv("t,y\n"), Err(Error::Csv { line: 1, .. })));
        let bad = format!("{CSV_HEADER}\n1,2,3,4,5\n");
        assert!(matches!(parse_csv(&bad), Err(Error::Csv { line: 2, .. })));
        let bad = format!("{CSV_HEADER}\n1,2,x,4,5,0\n");
        assert!(matches!(parse_csv(&bad), Err(Error::Csv { line: 2, .. })));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
            Just(5e-324),
            Just(f64::MAX),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            raw in proptest::collection::vec((finite(), finite(), finite(), finite(), finite(), 0usize..4), 0..40)
        ) {
            let rows: Vec<TraceRow> = raw
                .into_iter()
                .map(|(t, r, y, u, eps, plant_id)| TraceRow { t, r, y, u, eps, plant_id })
                .collect();
            let back = parse_csv(&csv_string(&rows)).unwrap();
            prop_assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                for (x, y) in [(a.t, b.t), (a.r, b.r), (a.y, b.y), (a.u, b.u), (a.eps, b.eps)] {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
                prop_assert_eq!(a.plant_id, b.plant_id);
            }
        }
    }
}
