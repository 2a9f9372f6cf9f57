//! Shared helpers: random polynomials and a degree-bounded membership
//! oracle that only uses dense linear algebra.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use qhv_core::{Monomial, Polynomial, VarContext};
use rand::Rng;

/// All exponent vectors in `n` variables of total degree ≤ `d`.
pub fn monomials(n: usize, d: i32) -> Vec<Vec<i32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in 0..=d {
        for mut rest in monomials(n - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

fn rank_contains(cols: &[Vec<BigRational>], rhs: &[BigRational]) -> bool {
    // row-reduce [cols | rhs] and check rhs is not a pivot column
    let rows = rhs.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let width = cols.len() + 1;
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if c == width - 1 {
            return false;
        }
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..width {
                    let d = &m[r][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    true
}

/// Whether `p = Σ h_i g_i` with every `h_i g_i` of degree ≤ `d`. Sound for
/// membership; complete once `d` reaches the degree of some certificate.
pub fn oracle_member(gens: &[Polynomial], p: &Polynomial, d: i32) -> bool {
    let n = p.ctx().nvars();
    let basis = monomials(n, d);
    let index: BTreeMap<Vec<i32>, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let vec_of = |q: &Polynomial| -> Option<Vec<BigRational>> {
        let mut v = vec![BigRational::zero(); basis.len()];
        for (m, c) in q.terms() {
            v[*index.get(m.exps())?] = c.clone();
        }
        Some(v)
    };
    let Some(rhs) = vec_of(p) else {
        return false;
    };
    let mut cols = Vec::new();
    for g in gens {
        let dg = g.total_degree() as i32;
        if dg > d {
            continue;
        }
        for m in monomials(n, d - dg) {
            let shifted = g
                .mul_term(&Monomial(m), &BigRational::one())
                .expect("polynomial shift");
            cols.push(vec_of(&shifted).expect("within degree bound"));
        }
    }
    rank_contains(&cols, &rhs)
}

/// A random polynomial with up to `terms` terms of degree ≤ `max_deg` and
/// integer coefficients in `[-3, 3]`.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    ctx: &Arc<VarContext>,
    terms: usize,
    max_deg: i32,
) -> Polynomial {
    let n = ctx.nvars();
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0i32; n];
        let mut left = rng.gen_range(0..=max_deg);
        while left > 0 {
            e[rng.gen_range(0..n)] += 1;
            left -= 1;
        }
        let c: i64 = rng.gen_range(-3..=3);
        out.push((Monomial(e), BigRational::from_integer(c.into())));
    }
    Polynomial::from_terms(ctx, out).expect("valid terms")
}

/// Homogeneous of degree exactly `deg`.
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    ctx: &Arc<VarContext>,
    terms: usize,
    deg: i32,
) -> Polynomial {
    let n = ctx.nvars();
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0i32; n];
        for _ in 0..deg {
            e[rng.gen_range(0..n)] += 1;
        }
        let c: i64 = rng.gen_range(-3..=3);
        out.push((Monomial(e), BigRational::from_integer(c.into())));
    }
    Polynomial::from_terms(ctx, out).expect("valid terms")
}

/// Outcome of one oracle comparison.
pub struct OracleTally {
    pub instances: usize,
    pub members: usize,
    pub disagreements: Vec<String>,
}

/// Random instances in `Q[x, y, z]`. Homogeneous instances are decided
/// exactly by the oracle at the target's degree, so both directions are
/// compared; inhomogeneous ones only check oracle ⇒ engine.
pub fn run_membership_oracle<R: Rng>(rng: &mut R, instances: usize) -> OracleTally {
    let ctx = VarContext::grevlex(&["x", "y", "z"], &[]);
    let mut tally = OracleTally {
        instances: 0,
        members: 0,
        disagreements: Vec::new(),
    };
    for i in 0..instances {
        let homogeneous = i % 2 == 0;
        let ngens = rng.gen_range(1..=3);
        let gens: Vec<Polynomial> = (0..ngens)
            .map(|_| {
                if homogeneous {
                    random_homogeneous(rng, &ctx, 3, 2)
                } else {
                    random_poly(rng, &ctx, 3, 2)
                }
            })
            .filter(|g| !g.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let deg = 3;
        let target = if rng.gen_bool(0.5) {
            // built as a member
            let mut acc = Polynomial::zero(&ctx);
            for g in &gens {
                let h = if homogeneous {
                    random_homogeneous(rng, &ctx, 2, deg - g.total_degree() as i32)
                } else {
                    random_poly(rng, &ctx, 2, 1)
                };
                acc = &acc + &(&h * g);
            }
            acc
        } else if homogeneous {
            random_homogeneous(rng, &ctx, 4, deg)
        } else {
            random_poly(rng, &ctx, 4, deg)
        };
        let ideal = qhv_core::Ideal::new(gens.clone()).expect("nonempty");
        let engine = ideal.contains(&target).expect("within budget");
        let oracle = oracle_member(&gens, &target, if homogeneous { deg } else { 5 });
        tally.instances += 1;
        tally.members += engine as usize;
        let bad = if homogeneous {
            engine != oracle
        } else {
            oracle && !engine
        };
        if bad {
            let g: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
            tally
                .disagreements
                .push(format!("{target} in <{}>: engine {engine}, oracle {oracle}", g.join(", ")));
        }
    }
    tally
}
