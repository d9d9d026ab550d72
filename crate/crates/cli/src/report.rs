//! Output documents and the text/JSON renderers shared by every command.

use curvepull_core::curves::{Classification, Curve, OrbitResult};
use curvepull_core::spectra::RationalMatrix;
use curvepull_core::LoadedMap;
use num_rational::Rational64;
use serde::Serialize;

/// Exact rational as a `p/q` string.
pub fn ratio(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rational for human-readable output: integers without the `/1`.
pub fn ratio_text(r: &Rational64) -> String {
    r.to_string()
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Renders with 12 significant digits.
pub fn sig12_text(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

pub fn curve_name(map: &LoadedMap, c: &Curve) -> String {
    c.display(&map.axes, &map.alphabet).to_string()
}

/// Top-level JSON document.
#[derive(Serialize)]
pub struct RunReport<I: Serialize, R: Serialize> {
    pub command: &'static str,
    pub argv: Vec<String>,
    pub map: Option<String>,
    pub inputs: I,
    pub results: R,
    pub elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct StepReport {
    pub index: usize,
    pub from: String,
    pub target: Option<String>,
    pub s: u8,
    pub t: i64,
    pub weight: String,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassReport {
    Trivial {
        steps: usize,
    },
    Cycle {
        preperiod: usize,
        cycle: Vec<String>,
        weights: Vec<String>,
        product: String,
    },
    Unresolved {
        max_steps: usize,
    },
}

#[derive(Serialize)]
pub struct OrbitReport {
    pub start: String,
    pub steps: Vec<StepReport>,
    pub classification: ClassReport,
}

impl OrbitReport {
    pub fn new(map: &LoadedMap, r: &OrbitResult) -> Self {
        let mut from = r.start.clone();
        let mut steps = Vec::with_capacity(r.trajectory.len());
        for (i, st) in r.trajectory.iter().enumerate() {
            steps.push(StepReport {
                index: i + 1,
                from: curve_name(map, &from),
                target: st.target.as_ref().map(|c| curve_name(map, c)),
                s: st.s,
                t: st.t,
                weight: ratio(&st.weight),
            });
            if let Some(t) = &st.target {
                from = t.clone();
            }
        }
        let classification = match &r.classification {
            Classification::EventuallyTrivial { steps } => ClassReport::Trivial { steps: *steps },
            Classification::EntersCycle {
                preperiod,
                cycle,
                weights,
                product,
            } => ClassReport::Cycle {
                preperiod: *preperiod,
                cycle: cycle.iter().map(|c| curve_name(map, c)).collect(),
                weights: weights.iter().map(ratio).collect(),
                product: ratio(product),
            },
            Classification::Unresolved { max_steps } => ClassReport::Unresolved { max_steps: *max_steps },
        };
        OrbitReport {
            start: curve_name(map, &r.start),
            steps,
            classification,
        }
    }

    pub fn text(&self, r: &OrbitResult) -> String {
        let mut out = format!("start {}\n", self.start);
        for (st, raw) in self.steps.iter().zip(&r.trajectory) {
            out.push_str(&format!(
                "step {}: {} -> {}  s={} t={} weight={}\n",
                st.index,
                st.from,
                st.target.as_deref().unwrap_or("trivial"),
                st.s,
                st.t,
                ratio_text(&raw.weight)
            ));
        }
        match &r.classification {
            Classification::EventuallyTrivial { steps } => {
                out.push_str(&format!("classification: trivial after {}\n", plural(*steps, "step")));
            }
            Classification::EntersCycle {
                preperiod,
                weights,
                product,
                ..
            } => {
                let ClassReport::Cycle { cycle, .. } = &self.classification else {
                    unreachable!()
                };
                out.push_str(&format!(
                    "classification: cycle, preperiod {preperiod}, length {}\n",
                    cycle.len()
                ));
                out.push_str(&format!("cycle: {} -> {}\n", cycle.join(" -> "), cycle[0]));
                let w: Vec<String> = weights.iter().map(ratio_text).collect();
                out.push_str(&format!("weights: {}\n", w.join(", ")));
                out.push_str(&format!("product: {}\n", ratio_text(product)));
            }
            Classification::Unresolved { max_steps } => {
                out.push_str(&format!("classification: unresolved after {}\n", plural(*max_steps, "step")));
            }
        }
        out
    }
}

/// Matrix rows as `p/q` strings.
pub fn matrix_rows(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let e = m.get(i, j);
                    format!("{}/{}", e.numer(), e.denom())
                })
                .collect()
        })
        .collect()
}
