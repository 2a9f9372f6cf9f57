//! Intersection lattices of Hirzebruch surfaces and of `P1 × P1` blown up in
//! at most two points, elementary transformations, and a combinatorial model
//! of twisted P1-bundles with the normalization procedure that untwists them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuledError {
    #[error("classes live on different lattices: {0} and {1}")]
    LatticeMismatch(Lattice, Lattice),
    #[error("coordinate vector of length {got} on {lattice} (expected {expected})")]
    Rank {
        lattice: Lattice,
        got: usize,
        expected: usize,
    },
    #[error("blow-up count {0} outside 0..=2")]
    BlowupCount(usize),
    #[error("base index must be positive")]
    TrivialBase,
    #[error("twist of the split model must be nonzero")]
    ZeroTwist,
    #[error("normalization reached Stop(B) at {0:?}")]
    StopB(BundleState),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lattice {
    /// `Σ_n` with basis `C0` (the negative section) and `F` (a fiber).
    Hirzebruch(u32),
    /// `P1 × P1` blown up in `r` points, basis `f1, f2, e1, …, er`.
    QuadricBlowup(usize),
}

impl Lattice {
    pub fn rank(&self) -> usize {
        match *self {
            Lattice::Hirzebruch(_) => 2,
            Lattice::QuadricBlowup(r) => 2 + r,
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lattice::Hirzebruch(n) => write!(f, "hirzebruch({n})"),
            Lattice::QuadricBlowup(r) => write!(f, "quadric_blowup({r})"),
        }
    }
}

/// `a·C0 + b·F` on `Σ_n`, or `p·f1 + q·f2 - Σ m_i e_i` on a quadric blow-up.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    pub lattice: Lattice,
    pub coords: Vec<i64>,
}

impl DivisorClass {
    pub fn new(lattice: Lattice, coords: Vec<i64>) -> Result<Self, RuledError> {
        if coords.len() != lattice.rank() {
            return Err(RuledError::Rank {
                lattice,
                got: coords.len(),
                expected: lattice.rank(),
            });
        }
        if let Lattice::QuadricBlowup(r) = lattice {
            if r > 2 {
                return Err(RuledError::BlowupCount(r));
            }
        }
        Ok(DivisorClass { lattice, coords })
    }

    pub fn hirzebruch(n: u32, a: i64, b: i64) -> Self {
        DivisorClass {
            lattice: Lattice::Hirzebruch(n),
            coords: vec![a, b],
        }
    }

    /// `p·f1 + q·f2 - Σ m_i e_i`.
    pub fn quadric(p: i64, q: i64, m: &[i64]) -> Self {
        let mut coords = vec![p, q];
        coords.extend_from_slice(m);
        DivisorClass {
            lattice: Lattice::QuadricBlowup(m.len()),
            coords,
        }
    }

    /// The exceptional curve over the `i`-th point (1-based).
    pub fn exceptional(r: usize, i: usize) -> Self {
        let mut m = vec![0; r];
        m[i - 1] = -1;
        Self::quadric(0, 0, &m)
    }

    pub fn add(&self, other: &DivisorClass) -> Result<Self, RuledError> {
        self.same_lattice(other)?;
        Ok(DivisorClass {
            lattice: self.lattice,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn same_lattice(&self, other: &DivisorClass) -> Result<(), RuledError> {
        if self.lattice != other.lattice {
            return Err(RuledError::LatticeMismatch(self.lattice, other.lattice));
        }
        Ok(())
    }

    pub fn self_intersection(&self) -> i64 {
        intersect(self, self).expect("same lattice")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<(i64, String)> = match self.lattice {
            Lattice::Hirzebruch(_) => vec![
                (self.coords[0], "C0".into()),
                (self.coords[1], "F".into()),
            ],
            Lattice::QuadricBlowup(_) => {
                let mut v = vec![(self.coords[0], "f1".into()), (self.coords[1], "f2".into())];
                for (i, &m) in self.coords[2..].iter().enumerate() {
                    v.push((-m, format!("e{}", i + 1)));
                }
                v
            }
        };
        let mut out = String::new();
        for (c, name) in parts.into_iter().filter(|(c, _)| *c != 0) {
            let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            out.push_str(sign);
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
            }
            out.push_str(&name);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// The intersection form.
pub fn intersect(d1: &DivisorClass, d2: &DivisorClass) -> Result<i64, RuledError> {
    d1.same_lattice(d2)?;
    let (x, y) = (&d1.coords, &d2.coords);
    Ok(match d1.lattice {
        Lattice::Hirzebruch(n) => x[0] * y[1] + y[0] * x[1] - n as i64 * x[0] * y[0],
        Lattice::QuadricBlowup(_) => {
            x[0] * y[1] + x[1] * y[0] - x[2..].iter().zip(&y[2..]).map(|(a, b)| a * b).sum::<i64>()
        }
    })
}

/// `-K = 2f1 + 2f2 - Σ e_i`.
pub fn anticanonical(r: usize) -> DivisorClass {
    DivisorClass::quadric(2, 2, &vec![1; r])
}

/// Bound on coordinates in the brute-force searches.
pub const SEARCH_BOUND: i64 = 3;

fn box_classes(lattice: Lattice) -> Vec<DivisorClass> {
    let rank = lattice.rank();
    let side = (2 * SEARCH_BOUND + 1) as usize;
    (0..side.pow(rank as u32))
        .map(|mut idx| {
            let coords = (0..rank)
                .map(|_| {
                    let c = (idx % side) as i64 - SEARCH_BOUND;
                    idx /= side;
                    c
                })
                .collect();
            DivisorClass { lattice, coords }
        })
        .collect()
}

/// Classes with `D^2 = -1` and `D·(-K) = 1`, coordinates in `[-3, 3]`.
pub fn minus_one_curves(r: usize) -> Result<Vec<DivisorClass>, RuledError> {
    if r > 2 {
        return Err(RuledError::BlowupCount(r));
    }
    let k = anticanonical(r);
    let mut out: Vec<DivisorClass> = box_classes(Lattice::QuadricBlowup(r))
        .into_iter()
        .filter(|d| d.self_intersection() == -1 && intersect(d, &k).unwrap() == 1)
        .collect();
    out.sort_by_cached_key(|c| c.to_string());
    Ok(out)
}

/// Generators of the cone of curves.
pub fn effective_generators(lattice: Lattice) -> Result<Vec<DivisorClass>, RuledError> {
    Ok(match lattice {
        Lattice::Hirzebruch(n) => vec![
            DivisorClass::hirzebruch(n, 1, 0),
            DivisorClass::hirzebruch(n, 0, 1),
        ],
        Lattice::QuadricBlowup(0) => vec![
            DivisorClass::quadric(1, 0, &[]),
            DivisorClass::quadric(0, 1, &[]),
        ],
        Lattice::QuadricBlowup(r) => minus_one_curves(r)?,
    })
}

/// Irreducible curve classes on `Σ_n`: `C0`, `F`, and `aC0 + bF` with
/// `a > 0`, `b ≥ a·n`.
pub fn is_irreducible_hirzebruch(n: u32, a: i64, b: i64) -> bool {
    (a, b) == (1, 0) || (a, b) == (0, 1) || (a > 0 && b >= a * n as i64)
}

/// Nonzero classes in the search box meeting every cone generator
/// nonnegatively.
pub fn nef_classes(lattice: Lattice) -> Result<Vec<DivisorClass>, RuledError> {
    let gens = effective_generators(lattice)?;
    Ok(box_classes(lattice)
        .into_iter()
        .filter(|d| !d.is_zero() && gens.iter().all(|g| intersect(d, g).unwrap() >= 0))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberType {
    /// `Σ_1`.
    Sigma1,
    /// `P1 × P1` blown up in one point.
    Blowup1,
    /// `P1 × P1` blown up in two points in general position.
    Blowup2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub curve: String,
    pub product: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCase {
    /// Curves making up the divisor's trace on the fiber.
    pub trace: Vec<String>,
    pub trace_class: String,
    /// Every candidate curve meeting the trace nonpositively.
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub fiber: FiberType,
    pub search_bound: i64,
    pub cases: Vec<TraceCase>,
    pub passed: bool,
}

/// The three (-1)-curves of the one-point blow-up: `C1 = f1 - e1`,
/// `C2 = e1`, `C3 = f2 - e1`.
pub fn blowup1_chain() -> [DivisorClass; 3] {
    [
        DivisorClass::quadric(1, 0, &[1]),
        DivisorClass::exceptional(1, 1),
        DivisorClass::quadric(0, 1, &[1]),
    ]
}

/// For each possible trace of an invariant divisor on the fiber, the curves
/// that meet it nonpositively (which the homology lemma forbids).
pub fn homology_lemma_cases(fiber: FiberType) -> Result<HomologyReport, RuledError> {
    let (lattice, traces): (Lattice, Vec<Vec<DivisorClass>>) = match fiber {
        FiberType::Sigma1 => (
            Lattice::Hirzebruch(1),
            vec![vec![DivisorClass::hirzebruch(1, 1, 0)]],
        ),
        FiberType::Blowup1 => {
            let [c1, c2, c3] = blowup1_chain();
            (
                Lattice::QuadricBlowup(1),
                vec![
                    vec![c1.clone(), c2.clone()],
                    vec![c2.clone(), c3],
                    vec![c2],
                ],
            )
        }
        FiberType::Blowup2 => (
            Lattice::QuadricBlowup(2),
            minus_one_curves(2)?.into_iter().map(|c| vec![c]).collect(),
        ),
    };
    let mut candidates = effective_generators(lattice)?;
    for d in nef_classes(lattice)? {
        if !candidates.contains(&d) {
            candidates.push(d);
        }
    }
    let mut cases = Vec::new();
    for trace in traces {
        let mut class = DivisorClass {
            lattice,
            coords: vec![0; lattice.rank()],
        };
        for c in &trace {
            class = class.add(c)?;
        }
        let witnesses = candidates
            .iter()
            .filter_map(|c| {
                let p = intersect(&class, c).unwrap();
                (p <= 0).then(|| Witness {
                    curve: c.to_string(),
                    product: p,
                })
            })
            .collect();
        cases.push(TraceCase {
            trace: trace.iter().map(|c| c.to_string()).collect(),
            trace_class: class.to_string(),
            witnesses,
        });
    }
    let passed = cases.iter().all(|c| !c.witnesses.is_empty());
    Ok(HomologyReport {
        fiber,
        search_bound: SEARCH_BOUND,
        cases,
        passed,
    })
}

/// Index of the Hirzebruch surface after one elementary transformation
/// centered on (`true`) or off the negative section. On `Σ_0` every point
/// lies off some ruling section, so both choices give `Σ_1`.
pub fn elm_surface(n: u32, on_negative_section: bool) -> u32 {
    if on_negative_section || n == 0 {
        n + 1
    } else {
        n - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElmStep {
    /// Construction: center on the 0-section.
    E0,
    /// Construction: center on the ∞-section.
    Einf,
    /// Normalization: center on the curve of `A0` not in `E`.
    CurveInA0,
    /// Normalization: center on the curve of `A∞` not in `E`.
    CurveInAinf,
}

impl ElmStep {
    /// The construction step undone by a normalization step, and back.
    pub fn inverse(self) -> ElmStep {
        match self {
            ElmStep::E0 => ElmStep::CurveInA0,
            ElmStep::Einf => ElmStep::CurveInAinf,
            ElmStep::CurveInA0 => ElmStep::E0,
            ElmStep::CurveInAinf => ElmStep::Einf,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveFlags {
    pub a0_two_curves: bool,
    pub ainf_two_curves: bool,
}

/// A twisted P1-bundle over `Σ_n`, recorded by its twist counters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleState {
    pub base_n: u32,
    pub k0: u32,
    pub k_inf: u32,
    /// The fiber over the negative section is `Σ_fiber_m`.
    pub fiber_m: u32,
    pub curve_flags: CurveFlags,
    pub transcript: Vec<ElmStep>,
}

impl BundleState {
    /// The trivial bundle over `Σ_n`.
    pub fn trivial(n: u32) -> Self {
        BundleState {
            base_n: n,
            k0: 0,
            k_inf: 0,
            fiber_m: 0,
            curve_flags: CurveFlags {
                a0_two_curves: false,
                ainf_two_curves: false,
            },
            transcript: Vec::new(),
        }
    }

    fn sync(mut self) -> Self {
        self.fiber_m = self.k0 + self.k_inf;
        self.curve_flags = CurveFlags {
            a0_two_curves: self.k0 > 0,
            ainf_two_curves: self.k_inf > 0,
        };
        self
    }

    /// Applies one elementary transformation, returning the new state.
    pub fn apply(&self, step: ElmStep) -> BundleState {
        let mut s = self.clone();
        match step {
            ElmStep::E0 => s.k0 += 1,
            ElmStep::Einf => s.k_inf += 1,
            ElmStep::CurveInA0 => s.k0 -= 1,
            ElmStep::CurveInAinf => s.k_inf -= 1,
        }
        s.transcript.push(step);
        s.sync()
    }

    /// Self-intersection of the negative section of the fiber.
    pub fn negative_section_square(&self) -> i64 {
        -(self.fiber_m as i64)
    }
}

/// `k_inf` transformations along the ∞-section, then `k0` along the
/// 0-section, starting from the trivial bundle over `Σ_n`.
pub fn construct_twisted(n: u32, k0: u32, k_inf: u32) -> Result<BundleState, RuledError> {
    if n == 0 {
        return Err(RuledError::TrivialBase);
    }
    let mut s = BundleState::trivial(n);
    for _ in 0..k_inf {
        s = s.apply(ElmStep::Einf);
    }
    for _ in 0..k0 {
        s = s.apply(ElmStep::E0);
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub start: BundleState,
    pub end: BundleState,
    /// Steps taken by the algorithm, in order.
    pub transcript: Vec<ElmStep>,
    /// Self-intersection of the negative section of the fiber before each
    /// step and at the end.
    pub negative_section_squares: Vec<i64>,
}

/// Untwists a bundle: transform at `A0` while it carries two invariant
/// curves, then at `A∞`, until the fiber is `Σ_0` (Stop(A)). Reaching a
/// nontrivial fiber with neither option is Stop(B).
pub fn figure1_normalize(s: &BundleState) -> Result<Normalization, RuledError> {
    let start = s.clone();
    let mut cur = BundleState {
        transcript: Vec::new(),
        ..s.clone()
    };
    let mut squares = vec![cur.negative_section_square()];
    while cur.fiber_m != 0 {
        let step = if cur.curve_flags.a0_two_curves {
            ElmStep::CurveInA0
        } else if cur.curve_flags.ainf_two_curves {
            ElmStep::CurveInAinf
        } else {
            return Err(RuledError::StopB(cur));
        };
        let next = cur.apply(step);
        assert_eq!(next.fiber_m + 1, cur.fiber_m, "fiber index must drop by one");
        cur = next;
        squares.push(cur.negative_section_square());
    }
    Ok(Normalization {
        start,
        transcript: cur.transcript.clone(),
        end: cur,
        negative_section_squares: squares,
    })
}

/// Rebuilds the construction transcript from a normalization transcript.
pub fn reverse_transcript(steps: &[ElmStep]) -> Vec<ElmStep> {
    steps.iter().rev().map(|s| s.inverse()).collect()
}

/// The twist of the split bundle `P(O(n,-n) ⊕ O)` over `Σ_0` by one
/// elementary transformation along a diagonal orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sigma0Twist {
    pub n: i64,
    pub split: (i64, i64),
    pub steps: Vec<String>,
    pub sections_intersect: bool,
}

pub fn sigma0_twist(n: i64) -> Result<Sigma0Twist, RuledError> {
    if n == 0 {
        return Err(RuledError::ZeroTwist);
    }
    Ok(Sigma0Twist {
        n,
        split: (n, -n),
        steps: vec!["elm along the diagonal orbit".to_string()],
        sections_intersect: true,
    })
}

/// Transforming back at the orbit where the sections meet recovers the
/// split model with disjoint sections.
pub fn sigma0_untwist(t: &Sigma0Twist) -> Sigma0Twist {
    let mut steps = t.steps.clone();
    steps.pop();
    Sigma0Twist {
        n: t.n,
        split: t.split,
        sections_intersect: !steps.is_empty(),
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, qq: i64, m: &[i64]) -> DivisorClass {
        DivisorClass::quadric(p, qq, m)
    }

    #[test]
    fn intersection_values() {
        let c0 = DivisorClass::hirzebruch(2, 1, 0);
        assert_eq!(intersect(&c0, &c0).unwrap(), -2);
        for n in 0..5 {
            let f = DivisorClass::hirzebruch(n, 0, 1);
            assert_eq!(f.self_intersection(), 0);
        }
        let [c1, c2, c3] = blowup1_chain();
        assert_eq!(intersect(&c1, &c2).unwrap(), 1);
        assert_eq!(intersect(&c2, &c3).unwrap(), 1);
        assert_eq!(intersect(&c1, &c3).unwrap(), 0);
        assert!(matches!(
            intersect(&c0, &c1),
            Err(RuledError::LatticeMismatch(..))
        ));
        assert!(DivisorClass::new(Lattice::QuadricBlowup(1), vec![1, 2]).is_err());
    }

    #[test]
    fn minus_one_counts() {
        assert!(minus_one_curves(0).unwrap().is_empty());
        let r1: Vec<String> = minus_one_curves(1).unwrap().iter().map(|d| d.to_string()).collect();
        assert_eq!(r1, vec!["e1", "f1-e1", "f2-e1"]);
        let r2 = minus_one_curves(2).unwrap();
        let expect = [
            DivisorClass::exceptional(2, 1),
            DivisorClass::exceptional(2, 2),
            q(1, 0, &[1, 0]),
            q(1, 0, &[0, 1]),
            q(0, 1, &[1, 0]),
            q(0, 1, &[0, 1]),
        ];
        assert_eq!(r2.len(), 6);
        for e in &expect {
            assert!(r2.contains(e), "{e}");
        }
        // conic class, not a (-1)-curve
        assert_eq!(q(1, 1, &[1, 1]).self_intersection(), 0);
        assert!(minus_one_curves(3).is_err());
    }

    #[test]
    fn homology_cases() {
        let s = homology_lemma_cases(FiberType::Sigma1).unwrap();
        assert!(s.passed);
        assert!(s.cases[0].witnesses.iter().any(|w| w.curve == "C0+F" && w.product == 0));
        let b = homology_lemma_cases(FiberType::Blowup1).unwrap();
        assert!(b.passed);
        let has = |i: usize, c: &str| b.cases[i].witnesses.iter().any(|w| w.curve == c);
        assert!(has(0, "f1-e1"));
        assert!(has(1, "f2-e1"));
        assert!(has(2, "f1"));
        assert!(homology_lemma_cases(FiberType::Blowup2).unwrap().passed);
    }

    #[test]
    fn negative_curve_on_hirzebruch() {
        for n in 1..5u32 {
            for b in 0..8 {
                let neg = DivisorClass::hirzebruch(n, 1, b).self_intersection() < 0;
                if is_irreducible_hirzebruch(n, 1, b) && neg {
                    assert_eq!(b, 0);
                }
            }
        }
    }

    #[test]
    fn elementary_transformations() {
        assert_eq!(elm_surface(2, true), 3);
        assert_eq!(elm_surface(2, false), 1);
        assert_eq!(elm_surface(0, false), 1);
    }

    #[test]
    fn bundles() {
        let s = construct_twisted(1, 0, 0).unwrap();
        assert_eq!(s, BundleState::trivial(1));
        let s = construct_twisted(1, 2, 1).unwrap();
        assert_eq!(s.fiber_m, 3);
        let s = construct_twisted(3, 0, 5).unwrap();
        assert_eq!(s.fiber_m, 5);
        assert!(!s.curve_flags.a0_two_curves && s.curve_flags.ainf_two_curves);
        assert!(construct_twisted(0, 1, 1).is_err());

        let s = construct_twisted(1, 2, 1).unwrap();
        let r = figure1_normalize(&s).unwrap();
        assert_eq!(r.transcript.len(), 3);
        assert_eq!(r.end.fiber_m, 0);
        assert_eq!(r.negative_section_squares, vec![-3, -2, -1, 0]);
        assert_eq!(reverse_transcript(&r.transcript), s.transcript);
        let r = figure1_normalize(&construct_twisted(2, 0, 0).unwrap()).unwrap();
        assert!(r.transcript.is_empty());

        let mut broken = construct_twisted(1, 1, 0).unwrap();
        broken.curve_flags.a0_two_curves = false;
        assert!(matches!(figure1_normalize(&broken), Err(RuledError::StopB(_))));
    }

    #[test]
    fn sigma0() {
        let t = sigma0_twist(1).unwrap();
        assert!(t.sections_intersect);
        assert_eq!(t.split, (1, -1));
        assert_eq!(sigma0_twist(0), Err(RuledError::ZeroTwist));
        let u = sigma0_untwist(&t);
        assert!(!u.sections_intersect);
        assert!(u.steps.is_empty());
    }
}
