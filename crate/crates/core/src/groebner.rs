//! Buchberger's algorithm with the Gebauer–Möller pair update.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Monomial, PolyError, Polynomial, VarContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("an ideal needs at least one generator")]
    NoGenerators,
    #[error("polynomial `{0}` has negative exponents; clear units first")]
    LaurentInput(String),
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),
}

/// Resource limits for a Gröbner computation. Exceeding either is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_basis: usize,
    pub max_steps: u64,
}

const DEFAULT_MAX_BASIS: usize = 5_000;
const DEFAULT_MAX_STEPS: u64 = 50_000_000;

static GLOBAL_MAX_BASIS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_BASIS);
static GLOBAL_MAX_STEPS: AtomicU64 = AtomicU64::new(DEFAULT_MAX_STEPS);

impl Default for Budget {
    /// The process-wide budget (see [`Budget::set_global`]).
    fn default() -> Self {
        Budget {
            max_basis: GLOBAL_MAX_BASIS.load(AtomicOrdering::Relaxed),
            max_steps: GLOBAL_MAX_STEPS.load(AtomicOrdering::Relaxed),
        }
    }
}

impl Budget {
    pub const fn unlimited() -> Self {
        Budget {
            max_basis: usize::MAX,
            max_steps: u64::MAX,
        }
    }

    /// Replaces the budget used by every ideal created afterwards.
    pub fn set_global(b: Budget) {
        GLOBAL_MAX_BASIS.store(b.max_basis, AtomicOrdering::Relaxed);
        GLOBAL_MAX_STEPS.store(b.max_steps, AtomicOrdering::Relaxed);
    }

    /// Parses `steps=N,basis=M` (either key optional) or a bare step count.
    pub fn parse(spec: &str) -> Option<Budget> {
        let mut b = Budget {
            max_basis: DEFAULT_MAX_BASIS,
            max_steps: DEFAULT_MAX_STEPS,
        };
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<u64>() {
            b.max_steps = n;
            return Some(b);
        }
        for part in spec.split(',') {
            let (k, v) = part.split_once('=')?;
            match k.trim() {
                "steps" => b.max_steps = v.trim().parse().ok()?,
                "basis" => b.max_basis = v.trim().parse().ok()?,
                _ => return None,
            }
        }
        Some(b)
    }
}

static AUDIT: AtomicBool = AtomicBool::new(false);
static AUDITED: AtomicU64 = AtomicU64::new(0);
static AUDIT_FAILURES: AtomicU64 = AtomicU64::new(0);

/// When on, every freshly computed basis is re-checked: all S-polynomials
/// must reduce to zero against it. Failures panic.
pub fn set_audit(on: bool) {
    AUDIT.store(on, AtomicOrdering::Relaxed);
}

/// (bases audited, audit failures) since process start.
pub fn audit_counts() -> (u64, u64) {
    (
        AUDITED.load(AtomicOrdering::Relaxed),
        AUDIT_FAILURES.load(AtomicOrdering::Relaxed),
    )
}

struct Meter {
    steps: u64,
    budget: Budget,
}

impl Meter {
    fn tick(&mut self) -> Result<(), IdealError> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(IdealError::BudgetExceeded(format!(
                "more than {} reduction steps",
                self.budget.max_steps
            )));
        }
        Ok(())
    }
}

/// Full reduction of `p` by `basis`; returns the remainder.
fn reduce_metered(
    p: &Polynomial,
    basis: &[&Polynomial],
    meter: &mut Meter,
) -> Result<Polynomial, IdealError> {
    let ctx = p.ctx().clone();
    let mut rest = p.clone();
    let mut rem: Vec<(Monomial, crate::poly::Coeff)> = Vec::new();
    while let Some((lm, lc)) = rest.leading_term().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.leading_monomial().is_some_and(|gm| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                meter.tick()?;
                let (gm, gc) = g.leading_term().unwrap();
                let shift = lm.div(gm);
                let c = &lc / gc;
                rest = rest.sub_scaled_shift(&c, &shift, g);
            }
            None => {
                rem.push((lm, lc));
                rest = Polynomial::from_sorted(&ctx, rest.terms()[1..].to_vec());
            }
        }
    }
    Ok(Polynomial::from_sorted(&ctx, rem))
}

/// Remainder of `p` on division by `basis` (no budget).
pub fn reduce(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let refs: Vec<&Polynomial> = basis.iter().collect();
    let mut meter = Meter {
        steps: 0,
        budget: Budget::unlimited(),
    };
    reduce_metered(p, &refs, &mut meter).expect("unlimited budget")
}

pub fn reduce_with_budget(
    p: &Polynomial,
    basis: &[Polynomial],
    budget: Budget,
) -> Result<Polynomial, IdealError> {
    let refs: Vec<&Polynomial> = basis.iter().collect();
    let mut meter = Meter { steps: 0, budget };
    reduce_metered(p, &refs, &mut meter)
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (fm, fc) = match f.leading_term() {
        Some(t) => t,
        None => return Polynomial::zero(f.ctx()),
    };
    let (gm, gc) = match g.leading_term() {
        Some(t) => t,
        None => return Polynomial::zero(f.ctx()),
    };
    let l = fm.lcm(gm);
    let a = f
        .mul_term(&l.div(fm), &fc.recip())
        .expect("lcm quotient is a monomial");
    let b = g
        .mul_term(&l.div(gm), &gc.recip())
        .expect("lcm quotient is a monomial");
    &a - &b
}

/// Buchberger criterion checked on every pair, no shortcuts.
pub fn is_groebner_basis(basis: &[Polynomial]) -> bool {
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            if !reduce(&s_polynomial(&basis[i], &basis[j]), basis).is_zero() {
                return false;
            }
        }
    }
    true
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the ideal generated by `gens`, monic, sorted by
/// increasing leading monomial. The zero ideal gives an empty basis.
pub fn groebner_basis(
    ctx: &Arc<VarContext>,
    gens: &[Polynomial],
    budget: Budget,
) -> Result<Vec<Polynomial>, IdealError> {
    let mut meter = Meter { steps: 0, budget };
    let mut polys: Vec<Polynomial> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    for g in gens {
        if !g.is_polynomial() {
            return Err(IdealError::LaurentInput(g.to_string()));
        }
        let refs: Vec<&Polynomial> = active_refs(&polys, &active);
        let h = reduce_metered(g, &refs, &mut meter)?;
        if !h.is_zero() {
            insert(&mut polys, &mut active, &mut pairs, h.monic(), budget)?;
        }
    }

    while !pairs.is_empty() {
        // normal selection strategy: smallest lcm first
        let mut best = 0;
        for k in 1..pairs.len() {
            if ctx.cmp_monomials(&pairs[k].lcm, &pairs[best].lcm) == std::cmp::Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        let s = s_polynomial(&polys[pair.i], &polys[pair.j]);
        let refs = active_refs(&polys, &active);
        let h = reduce_metered(&s, &refs, &mut meter)?;
        if !h.is_zero() {
            insert(&mut polys, &mut active, &mut pairs, h.monic(), budget)?;
        }
    }

    let mut basis: Vec<Polynomial> = polys
        .into_iter()
        .zip(active)
        .filter_map(|(p, a)| a.then_some(p))
        .collect();
    basis = interreduce(basis, &mut meter)?;
    basis.sort_by(|a, b| {
        ctx.cmp_monomials(a.leading_monomial().unwrap(), b.leading_monomial().unwrap())
    });

    if AUDIT.load(AtomicOrdering::Relaxed) {
        AUDITED.fetch_add(1, AtomicOrdering::Relaxed);
        if !is_groebner_basis(&basis) {
            AUDIT_FAILURES.fetch_add(1, AtomicOrdering::Relaxed);
            panic!("Buchberger postcondition violated for basis {basis:?}");
        }
    }
    Ok(basis)
}

fn active_refs<'a>(polys: &'a [Polynomial], active: &[bool]) -> Vec<&'a Polynomial> {
    polys
        .iter()
        .zip(active)
        .filter_map(|(p, &a)| a.then_some(p))
        .collect()
}

/// Gebauer–Möller installation of a new basis element.
fn insert(
    polys: &mut Vec<Polynomial>,
    active: &mut Vec<bool>,
    pairs: &mut Vec<Pair>,
    h: Polynomial,
    budget: Budget,
) -> Result<(), IdealError> {
    if polys.len() + 1 > budget.max_basis {
        return Err(IdealError::BudgetExceeded(format!(
            "basis grew beyond {} elements",
            budget.max_basis
        )));
    }
    let hi = polys.len();
    let hm = h.leading_monomial().unwrap().clone();
    let lm = |k: usize| polys[k].leading_monomial().unwrap();

    let mut candidates: Vec<(usize, Monomial)> = (0..hi)
        .filter(|&k| active[k])
        .map(|k| (k, hm.lcm(lm(k))))
        .collect();
    let mut kept: Vec<(usize, Monomial)> = Vec::new();
    while let Some((k, l)) = candidates.pop() {
        let coprime = hm.is_coprime(lm(k));
        let dominated = candidates
            .iter()
            .chain(kept.iter())
            .any(|(_, l2)| l2.divides(&l));
        if coprime || !dominated {
            kept.push((k, l));
        }
    }
    let new_pairs: Vec<Pair> = kept
        .into_iter()
        .filter(|(k, _)| !hm.is_coprime(lm(*k)))
        .map(|(k, l)| Pair { i: k, j: hi, lcm: l })
        .collect();

    pairs.retain(|p| {
        let li = hm.lcm(lm(p.i));
        let lj = hm.lcm(lm(p.j));
        !(hm.divides(&p.lcm) && li != p.lcm && lj != p.lcm)
    });
    pairs.extend(new_pairs);

    for k in 0..hi {
        if active[k] && hm.divides(lm(k)) {
            active[k] = false;
        }
    }
    polys.push(h);
    active.push(true);
    Ok(())
}

/// Reduces every element against the others; input must be a Gröbner basis
/// with no leading monomial dividing another.
fn interreduce(
    mut basis: Vec<Polynomial>,
    meter: &mut Meter,
) -> Result<Vec<Polynomial>, IdealError> {
    // drop elements whose leading monomial is divisible by another's
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i != j
                && keep[j]
                && basis[j]
                    .leading_monomial()
                    .unwrap()
                    .divides(basis[i].leading_monomial().unwrap())
            {
                keep[i] = false;
                break;
            }
        }
    }
    basis = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect();
    for i in 0..basis.len() {
        let others: Vec<&Polynomial> = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p)
            .collect();
        let r = reduce_metered(&basis[i], &others, meter)?;
        debug_assert!(!r.is_zero());
        basis[i] = r.monic();
    }
    Ok(basis)
}

/// True iff `p` reduces to zero against `basis` with the leading-coefficient
/// arithmetic done in exact rationals.
pub fn reduces_to_zero(p: &Polynomial, basis: &[Polynomial]) -> bool {
    reduce(p, basis).is_zero()
}

