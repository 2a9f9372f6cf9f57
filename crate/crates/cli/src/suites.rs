//! Named suites and the checks they expand to.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use anyhow::{bail, Result};
use qhv_core::actions::{invariance_failures, sl2_v2_triple, sl2_v4_triple};
use qhv_core::degenerations::{
    derive_f4_ideal, f4_adjudication, f4_uniformity, quadric_ideal, quadric_singular_locus,
    verify_embedding, verify_equivariance, verify_gluing, verify_quotient, ChartLocus, Family,
    GluedFamily,
};
use qhv_core::ruled::{
    anticanonical, blowup1_chain, construct_twisted, figure1_normalize, homology_lemma_cases,
    intersect, minus_one_curves, reverse_transcript, BundleState, FiberType,
};
use qhv_core::singular::{classify_terminal_types, wps_singularity_report};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::report::{CheckReport, Status};

/// Suite names in the order `all` runs them.
pub const SUITES: [&str; 9] = [
    "verify quadric",
    "verify f4",
    "verify quotient",
    "equivariance",
    "singular-locus",
    "terminal",
    "wps",
    "bundle-normalize",
    "dp-homology",
];

const QUADRIC_TWISTS: [i64; 5] = [1, 3, 5, 7, 9];
const F4_TWISTS: [i64; 4] = [0, 1, 2, 3];
const SINGULAR_TWISTS: [i64; 3] = [1, 3, 5];
const WPS_DEFAULTS: [[i64; 4]; 2] = [[1, 1, 1, 2], [1, 1, 2, 3]];

pub enum Outcome {
    Pass(Vec<Value>),
    Fail(Vec<Value>),
    Error(String),
}

type Body = Box<dyn Fn() -> Outcome + Send + Sync>;

pub struct Check {
    pub name: &'static str,
    pub params: BTreeMap<String, Value>,
    body: Body,
}

impl Check {
    fn new<F>(name: &'static str, params: Value, body: F) -> Self
    where
        F: Fn() -> Outcome + Send + Sync + 'static,
    {
        let params = match params {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Check {
            name,
            params,
            body: Box::new(body),
        }
    }

    /// Runs the check, turning panics into `error` reports. A failure
    /// without witnesses gets a placeholder one.
    pub fn run(&self) -> CheckReport {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| (self.body)())).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome::Error(msg)
        });
        let (status, witnesses) = match outcome {
            Outcome::Pass(w) => (Status::Pass, w),
            Outcome::Fail(w) if w.is_empty() => (Status::Fail, vec![json!("no witness recorded")]),
            Outcome::Fail(w) => (Status::Fail, w),
            Outcome::Error(e) => (Status::Error, vec![json!({ "error": e })]),
        };
        CheckReport {
            check_name: self.name.to_string(),
            params: self.params.clone(),
            status,
            witnesses,
            duration_ms: t0.elapsed().as_millis() as u64,
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn verdict(ok: bool, witnesses: Vec<Value>) -> Outcome {
    if ok {
        Outcome::Pass(witnesses)
    } else {
        Outcome::Fail(witnesses)
    }
}

/// Runs `f`, mapping any error to an `error` outcome.
fn guarded<F>(f: F) -> Outcome
where
    F: FnOnce() -> Result<Outcome, String>,
{
    f().unwrap_or_else(Outcome::Error)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn quadric_twists(values: &Option<Vec<i64>>, key: &str) -> Result<Vec<i64>> {
    let ks = values.clone().unwrap_or_else(|| QUADRIC_TWISTS.to_vec());
    if let Some(bad) = ks.iter().find(|&&k| k < 1 || k % 2 == 0) {
        bail!("quadric family needs odd positive `{key}`, got {bad}");
    }
    Ok(ks)
}

fn f4_twists(values: &Option<Vec<i64>>, key: &str) -> Result<Vec<i64>> {
    let ks = values.clone().unwrap_or_else(|| F4_TWISTS.to_vec());
    if let Some(bad) = ks.iter().find(|&&k| k < 0) {
        bail!("f4 family needs nonnegative `{key}`, got {bad}");
    }
    Ok(ks)
}

fn pairs(ks: &[i64], ls: &[i64]) -> Vec<(i64, i64)> {
    ks.iter().flat_map(|&k| ls.iter().map(move |&l| (k, l))).collect()
}

fn gluing_check(family: Family, k: i64, l: i64) -> Check {
    Check::new(
        "gluing",
        json!({ "family": family.to_string(), "k": k, "l": l }),
        move || {
            guarded(|| {
                let fam = GluedFamily::new(family, k, l).map_err(err)?;
                let r = verify_gluing(&fam).map_err(err)?;
                let witnesses = r
                    .generators
                    .iter()
                    .map(|g| {
                        json!({
                            "generator": g.generator,
                            "image": g.image,
                            "cleared_power": format!("l^{}", g.cleared_power),
                        })
                    })
                    .collect();
                Ok(verdict(r.passed, witnesses))
            })
        },
    )
}

fn invariance_check(family: Family, k: i64) -> Check {
    Check::new(
        "sl2_invariance",
        json!({ "family": family.to_string(), "k": k }),
        move || {
            guarded(|| {
                let (ideal, triple) = match family {
                    Family::Quadric => {
                        let i = quadric_ideal(k as u32).map_err(err)?;
                        let t = sl2_v2_triple(i.ctx()).map_err(err)?;
                        (i, t)
                    }
                    Family::F4 => {
                        let i = derive_f4_ideal(k).map_err(err)?;
                        let t = sl2_v4_triple(i.ctx(), k as u32).map_err(err)?;
                        (i, t)
                    }
                };
                let bad = invariance_failures(&ideal, &triple).map_err(err)?;
                if bad.is_empty() {
                    let checked = 3 * ideal.generators().len();
                    Ok(Outcome::Pass(vec![json!({ "images_reduced_to_zero": checked })]))
                } else {
                    Ok(Outcome::Fail(
                        bad.iter()
                            .map(|(op, g)| json!({ "operator": op, "image_of": g }))
                            .collect(),
                    ))
                }
            })
        },
    )
}

fn verify_quadric(s: &Settings) -> Result<Vec<Check>> {
    let ks = quadric_twists(&s.k, "k")?;
    let ls = quadric_twists(&s.l, "l")?;
    let mut out: Vec<Check> = pairs(&ks, &ls)
        .into_iter()
        .map(|(k, l)| gluing_check(Family::Quadric, k, l))
        .collect();
    out.extend(ks.iter().map(|&k| invariance_check(Family::Quadric, k)));
    Ok(out)
}

fn verify_f4(s: &Settings) -> Result<Vec<Check>> {
    let ks = f4_twists(&s.k, "k")?;
    let ls = f4_twists(&s.l, "l")?;
    let mut out = Vec::new();
    for &k in &ks {
        out.push(Check::new("f4_adjudication", json!({ "k": k }), move || {
            guarded(|| {
                let r = f4_adjudication(k).map_err(err)?;
                let ok = r.quadrics_generate_kernel && r.reference_generates_kernel;
                Ok(verdict(ok, vec![to_value(&r)]))
            })
        }));
        out.push(Check::new("f4_embedding", json!({ "k": k }), move || {
            guarded(|| {
                let r = verify_embedding(k).map_err(err)?;
                Ok(verdict(r.passed, vec![to_value(&r)]))
            })
        }));
        out.push(invariance_check(Family::F4, k));
    }
    out.extend(
        pairs(&ks, &ls)
            .into_iter()
            .map(|(k, l)| gluing_check(Family::F4, k, l)),
    );
    let twists: Vec<u32> = ks.iter().map(|&k| k as u32).collect();
    out.push(Check::new("f4_uniformity", json!({ "k": ks }), move || {
        guarded(|| {
            let r = f4_uniformity(&twists).map_err(err)?;
            Ok(verdict(r.passed, vec![to_value(&r)]))
        })
    }));
    Ok(out)
}

fn verify_quotient_suite(s: &Settings) -> Result<Vec<Check>> {
    Ok(f4_twists(&s.k, "k")?
        .into_iter()
        .map(|k| {
            Check::new("quotient", json!({ "k": k }), move || {
                guarded(|| {
                    let r = verify_quotient(k).map_err(err)?;
                    let witnesses = r.generators.iter().map(to_value).collect();
                    Ok(verdict(r.passed, witnesses))
                })
            })
        })
        .collect())
}

fn equivariance(s: &Settings) -> Result<Vec<Check>> {
    let families: Vec<Family> = match s.family.as_deref() {
        Some("quadric") => vec![Family::Quadric],
        Some("f4") => vec![Family::F4],
        _ => vec![Family::Quadric, Family::F4],
    };
    let mut out = Vec::new();
    for family in families {
        let (ks, ls) = match family {
            Family::Quadric => (quadric_twists(&s.k, "k")?, quadric_twists(&s.l, "l")?),
            Family::F4 => (f4_twists(&s.k, "k")?, f4_twists(&s.l, "l")?),
        };
        for (k, l) in pairs(&ks, &ls) {
            out.push(Check::new(
                "equivariance",
                json!({ "family": family.to_string(), "k": k, "l": l }),
                move || {
                    guarded(|| {
                        let fam = GluedFamily::new(family, k, l).map_err(err)?;
                        let r = verify_equivariance(&fam).map_err(err)?;
                        let mut witnesses: Vec<Value> = r.torus.iter().map(to_value).collect();
                        witnesses.push(json!({
                            "identity_element": r.identity_element,
                            "sl2_disjoint": r.sl2_disjoint,
                            "sl2_commutes": r.sl2_commutes,
                        }));
                        Ok(verdict(r.passed, witnesses))
                    })
                },
            ));
        }
    }
    Ok(out)
}

fn singular_locus(s: &Settings) -> Result<Vec<Check>> {
    let ks = quadric_twists(&Some(s.k.clone().unwrap_or(SINGULAR_TWISTS.to_vec())), "k")?;
    Ok(ks
        .into_iter()
        .map(|k| {
            Check::new("singular_locus", json!({ "k": k }), move || {
                guarded(|| {
                    let r = quadric_singular_locus(k).map_err(err)?;
                    let ok = if k == 1 {
                        r.smooth()
                    } else {
                        r.points == ["([0:0:0:1], 0)"]
                            && r.charts.iter().all(|c| {
                                c.locus
                                    == if c.chart == "w" {
                                        ChartLocus::Origin
                                    } else {
                                        ChartLocus::Empty
                                    }
                            })
                    };
                    Ok(verdict(ok, vec![to_value(&r)]))
                })
            })
        })
        .collect())
}

fn terminal(s: &Settings) -> Result<Vec<Check>> {
    let n_max = s.n_max.unwrap_or(50);
    if n_max < 2 {
        bail!("`n_max` must be at least 2, got {n_max}");
    }
    Ok(vec![Check::new(
        "terminal_classification",
        json!({ "n_max": n_max }),
        move || {
            let t = classify_terminal_types(n_max);
            if t.counterexamples.is_empty() {
                Outcome::Pass(vec![json!({
                    "checked": t.checked,
                    "terminal": t.terminal,
                    "counterexamples": [],
                })])
            } else {
                Outcome::Fail(
                    t.counterexamples
                        .iter()
                        .map(|c| {
                            json!({
                                "quotient": c.quotient.to_string(),
                                "terminal": c.terminal,
                                "of_form_one_a_minus_a": c.of_form_one_a_minus_a,
                            })
                        })
                        .collect(),
                )
            }
        },
    )])
}

fn wps(s: &Settings) -> Result<Vec<Check>> {
    let lists: Vec<Vec<i64>> = match &s.weights {
        Some(w) => vec![w.clone()],
        None => WPS_DEFAULTS.iter().map(|w| w.to_vec()).collect(),
    };
    for w in &lists {
        if w.len() != 4 || w.iter().any(|&x| x < 1) {
            bail!("`weights` must be four positive integers, got {w:?}");
        }
    }
    Ok(lists
        .into_iter()
        .map(|w| {
            Check::new("wps_singularities", json!({ "weights": w }), move || {
                guarded(|| {
                    let r = wps_singularity_report(&w).map_err(err)?;
                    let ok = r.iter().all(|v| v.terminal == Some(true));
                    let witnesses = r
                        .iter()
                        .map(|v| {
                            json!({
                                "vertex": v.vertex,
                                "quotient": v.quotient.to_string(),
                                "terminal": v.terminal,
                            })
                        })
                        .collect();
                    Ok(verdict(ok, witnesses))
                })
            })
        })
        .collect())
}

fn bundle_normalize(s: &Settings) -> Result<Vec<Check>> {
    let (n, k0, kinf) = (s.n.unwrap_or(1), s.k0.unwrap_or(2), s.kinf.unwrap_or(1));
    if n == 0 {
        bail!("`n` must be positive");
    }
    Ok(vec![Check::new(
        "bundle_normalize",
        json!({ "n": n, "k0": k0, "kinf": kinf }),
        move || {
            guarded(|| {
                let start = construct_twisted(n, k0, kinf).map_err(err)?;
                let r = match figure1_normalize(&start) {
                    Ok(r) => r,
                    Err(e) => return Ok(Outcome::Fail(vec![json!({ "stop": e.to_string() })])),
                };
                let mut rebuilt = BundleState {
                    transcript: Vec::new(),
                    ..r.end.clone()
                };
                for step in reverse_transcript(&r.transcript) {
                    rebuilt = rebuilt.apply(step);
                }
                let ok = r.transcript.len() as u32 == k0 + kinf && rebuilt == start;
                Ok(verdict(
                    ok,
                    vec![json!({
                        "steps": r.transcript.len(),
                        "transcript": r.transcript,
                        "negative_section_squares": r.negative_section_squares,
                        "round_trip": rebuilt == start,
                    })],
                ))
            })
        },
    )])
}

fn dp_homology(_: &Settings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for r in 0..=2usize {
        out.push(Check::new("minus_one_curves", json!({ "r": r }), move || {
            guarded(|| {
                let curves = minus_one_curves(r).map_err(err)?;
                let k = anticanonical(r);
                let mut ok = true;
                for c in &curves {
                    ok &= c.self_intersection() == -1 && intersect(c, &k).map_err(err)? == 1;
                }
                let names: Vec<String> = curves.iter().map(|c| c.to_string()).collect();
                Ok(verdict(ok, vec![json!({ "count": curves.len(), "curves": names })]))
            })
        }));
    }
    out.push(Check::new("blowup1_chain", json!({}), || {
        guarded(|| {
            let [c1, c2, c3] = blowup1_chain();
            let p = [
                intersect(&c1, &c2).map_err(err)?,
                intersect(&c2, &c3).map_err(err)?,
                intersect(&c1, &c3).map_err(err)?,
            ];
            Ok(verdict(
                p == [1, 1, 0],
                vec![json!({ "C1.C2": p[0], "C2.C3": p[1], "C1.C3": p[2] })],
            ))
        })
    }));
    for fiber in [FiberType::Sigma1, FiberType::Blowup1, FiberType::Blowup2] {
        out.push(Check::new(
            "homology_lemma",
            json!({ "fiber": to_value(&fiber) }),
            move || {
                guarded(|| {
                    let r = homology_lemma_cases(fiber).map_err(err)?;
                    let ok = r.passed
                        && r.cases.iter().all(|c| c.witnesses.iter().any(|w| w.product <= 0));
                    Ok(verdict(ok, r.cases.iter().map(to_value).collect()))
                })
            },
        ));
    }
    Ok(out)
}

/// The checks of one suite. Parameter problems are reported as errors here,
/// before anything runs.
pub fn build(suite: &str, s: &Settings) -> Result<Vec<Check>> {
    match suite {
        "verify quadric" => verify_quadric(s),
        "verify f4" => verify_f4(s),
        "verify quotient" => verify_quotient_suite(s),
        "equivariance" => equivariance(s),
        "singular-locus" => singular_locus(s),
        "terminal" => terminal(s),
        "wps" => wps(s),
        "bundle-normalize" => bundle_normalize(s),
        "dp-homology" => dp_homology(s),
        "all" => {
            let mut out = Vec::new();
            for name in SUITES {
                out.extend(build(name, s)?);
            }
            Ok(out)
        }
        _ => bail!("unknown suite `{suite}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ranges() {
        let s = Settings::default();
        assert_eq!(build("verify quadric", &s).unwrap().len(), 25 + 5);
        assert_eq!(build("verify f4", &s).unwrap().len(), 4 * 3 + 16 + 1);
        assert_eq!(build("equivariance", &s).unwrap().len(), 25 + 16);
        assert_eq!(build("terminal", &s).unwrap()[0].params["n_max"], json!(50));
    }

    #[test]
    fn rejects_bad_parameters() {
        let even = Settings {
            k: Some(vec![2]),
            ..Default::default()
        };
        assert!(build("verify quadric", &even).is_err());
        assert!(build("verify f4", &even).is_ok());
        let neg = Settings {
            k: Some(vec![-1]),
            ..Default::default()
        };
        assert!(build("verify f4", &neg).is_err());
        assert!(build("nope", &Settings::default()).is_err());
    }

    #[test]
    fn failures_carry_witnesses() {
        let c = Check::new("x", json!({}), || Outcome::Fail(vec![]));
        let r = c.run();
        assert_eq!(r.status, Status::Fail);
        assert!(!r.witnesses.is_empty());
        let c = Check::new("y", json!({}), || panic!("boom"));
        let r = c.run();
        assert_eq!(r.status, Status::Error);
        assert_eq!(r.witnesses, vec![json!({ "error": "boom" })]);
    }

    #[test]
    fn bundle_example_has_three_steps() {
        let s = Settings::default();
        let r = build("bundle-normalize", &s).unwrap()[0].run();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.witnesses[0]["steps"], json!(3));
    }
}
