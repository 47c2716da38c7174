//! Report serialization: JSON, CSV box export, and plain text.
//!
//! Rationals are rendered as `"p/q"` strings (or `"p"` when integral) so
//! reports stay exact; binary floating point never appears in box geometry.
//! The wall-time field is attached at emission time in an envelope, keeping
//! the core report byte-deterministic for a fixed input and configuration.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::certifier::{Outcome, RestartReason, ZeroReport};
use crate::interval::Rat;

/// Exact rational to canonical string: `"p"` or `"p/q"` in lowest terms.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"p"` or `"p/q"`; rejects anything else (decimal literals included).
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let parts: Vec<&str> = s.split('/').collect();
    let parse_int = |t: &str| -> Result<BigInt, String> {
        if t.is_empty() || !t.chars().enumerate().all(|(i, c)| c.is_ascii_digit() || (i == 0 && c == '-')) {
            return Err(format!("`{s}` is not a rational; write \"p/q\" with integer p, q"));
        }
        t.parse::<BigInt>()
            .map_err(|_| format!("`{s}` is not a rational; write \"p/q\" with integer p, q"))
    };
    match parts.as_slice() {
        [p] => Ok(Rat::from_integer(parse_int(p)?)),
        [p, q] => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den == BigInt::from(0) {
                return Err(format!("`{s}` has a zero denominator"));
            }
            Ok(Rat::new(num, den))
        }
        _ => Err(format!("`{s}` is not a rational; write \"p/q\" with integer p, q")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDto {
    pub center: Vec<String>,
    pub half_side: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartDto {
    pub n: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDto {
    pub restarts: Vec<RestartDto>,
    pub excluded_squares: u64,
    pub active_parents: u64,
    pub subdivision_factor: Option<u64>,
    pub fine_resolution: Option<u64>,
    pub subsquares_examined: u64,
    pub candidates_fired: u64,
    pub deduplicated: u64,
    pub exhausted: Option<String>,
}

/// Canonical JSON form of a certification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub outcome: String,
    pub n: u64,
    pub count: u64,
    pub regions: Vec<Vec<BoxDto>>,
    pub trace_summary: TraceDto,
}

/// Emitted JSON object: the report plus wall time in seconds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportEnvelope {
    #[serde(flatten)]
    pub report: ReportDto,
    pub wall_time: f64,
}

impl ReportDto {
    pub fn from_report(report: &ZeroReport) -> Self {
        Self {
            outcome: match report.outcome {
                Outcome::Certified => "certified".to_string(),
                Outcome::Inconclusive => "inconclusive".to_string(),
            },
            n: report.n,
            count: report.count,
            regions: report
                .regions
                .iter()
                .map(|r| {
                    r.boxes
                        .iter()
                        .map(|b| BoxDto {
                            center: b.center().iter().map(format_rat).collect(),
                            half_side: format_rat(&b.half_side()),
                        })
                        .collect()
                })
                .collect(),
            trace_summary: TraceDto {
                restarts: report
                    .trace
                    .restarts
                    .iter()
                    .map(|r| RestartDto {
                        n: r.n,
                        reason: match r.reason {
                            RestartReason::BoundaryClearance => "boundary_clearance".to_string(),
                            RestartReason::JacobianFloor => "jacobian_floor".to_string(),
                        },
                    })
                    .collect(),
                excluded_squares: report.trace.excluded_squares,
                active_parents: report.trace.active_parents,
                subdivision_factor: report.trace.subdivision_factor,
                fine_resolution: report.trace.fine_resolution,
                subsquares_examined: report.trace.subsquares_examined,
                candidates_fired: report.trace.candidates_fired,
                deduplicated: report.trace.deduplicated,
                exhausted: report.trace.exhausted.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// CSV rows of box geometry: one row per box, tagged with its region index.
pub fn to_csv_boxes(report: &ZeroReport, dim: usize) -> String {
    let mut out = String::new();
    out.push_str("region,box");
    for a in 0..dim {
        let _ = write!(out, ",center_{a}");
    }
    out.push_str(",half_side\n");
    for (ri, region) in report.regions.iter().enumerate() {
        for (bi, b) in region.boxes.iter().enumerate() {
            let _ = write!(out, "{ri},{bi}");
            for c in b.center() {
                let _ = write!(out, ",{}", format_rat(&c));
            }
            let _ = writeln!(out, ",{}", format_rat(&b.half_side()));
        }
    }
    out
}

/// Human-readable summary.
pub fn to_text(report: &ZeroReport) -> String {
    let mut out = String::new();
    let outcome = match report.outcome {
        Outcome::Certified => "certified",
        Outcome::Inconclusive => "inconclusive",
    };
    let _ = writeln!(out, "outcome: {outcome}");
    let _ = writeln!(out, "resolution n: {}", report.n);
    let _ = writeln!(out, "zero count: {}", report.count);
    for (ri, region) in report.regions.iter().enumerate() {
        let _ = writeln!(out, "region {ri}: {} boxes", region.boxes.len());
        for b in &region.boxes {
            let center: Vec<String> = b.center().iter().map(format_rat).collect();
            let _ = writeln!(
                out,
                "  box center ({}) half-side {}",
                center.join(", "),
                format_rat(&b.half_side())
            );
        }
    }
    let t = &report.trace;
    let _ = writeln!(
        out,
        "trace: {} restarts, {} squares excluded, {} active, {} sub-squares, {} fired, {} deduplicated",
        t.restarts.len(),
        t.excluded_squares,
        t.active_parents,
        t.subsquares_examined,
        t.candidates_fired,
        t.deduplicated
    );
    if let Some(why) = &t.exhausted {
        let _ = writeln!(out, "exhausted: {why}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    #[test]
    fn rational_formatting_round_trips() {
        for r in [rat(1, 2), rat(-7, 3), rat(5, 1), rat(0, 1), rat(-12, 8)] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }

    #[test]
    fn rational_parse_rejects_decimals() {
        assert!(parse_rat("0.1").is_err());
        assert!(parse_rat("1e-3").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("").is_err());
        assert!(parse_rat("1/2/3").is_err());
    }

    #[test]
    fn json_round_trip() {
        let dto = ReportDto {
            outcome: "certified".to_string(),
            n: 9,
            count: 2,
            regions: vec![vec![BoxDto {
                center: vec!["1/2".to_string(), "-1/3".to_string()],
                half_side: "1/18".to_string(),
            }]],
            trace_summary: TraceDto {
                restarts: vec![RestartDto { n: 6, reason: "boundary_clearance".to_string() }],
                excluded_squares: 140,
                active_parents: 2,
                subdivision_factor: Some(3),
                fine_resolution: Some(27),
                subsquares_examined: 18,
                candidates_fired: 3,
                deduplicated: 1,
                exhausted: None,
            },
        };
        let parsed: ReportDto = serde_json::from_str(&dto.to_json()).unwrap();
        assert_eq!(parsed, dto);
    }

    #[test]
    fn envelope_carries_wall_time() {
        let dto = ReportDto {
            outcome: "inconclusive".to_string(),
            n: 12,
            count: 0,
            regions: vec![],
            trace_summary: TraceDto {
                restarts: vec![],
                excluded_squares: 0,
                active_parents: 0,
                subdivision_factor: None,
                fine_resolution: None,
                subsquares_examined: 0,
                candidates_fired: 0,
                deduplicated: 0,
                exhausted: Some("restart budget exhausted".to_string()),
            },
        };
        let env = ReportEnvelope { report: dto.clone(), wall_time: 0.25 };
        let text = serde_json::to_string(&env).unwrap();
        let back: ReportEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back.report, dto);
        assert!(text.contains("wall_time"));
    }
}
