//! sl2 acting by derivations and the one-dimensional torus acting by
//! monomial scalings.
//!
//! The sl2 normalization on the standard three-dimensional representation
//! `(x, y, z)` is
//!
//! ```text
//! E = {x ↦ 0,  y ↦ 2x, z ↦ y}
//! F = {x ↦ y,  y ↦ 2z, z ↦ 0}
//! H = {x ↦ 2x, y ↦ 0,  z ↦ -2z}
//! ```
//!
//! so `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H` and `4xz - y^2` is killed by
//! all three. The five-dimensional action on `(a, b, c, e, f)` is obtained by
//! pushing this triple through the Veronese-type parametrization rather than
//! being written down by hand.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::groebner::IdealError;
use crate::ideal::Ideal;
use crate::linalg::solve_columns;
use crate::poly::{rat, Coeff, Monomial, PolyError, Polynomial, SubstitutionMap, VarContext};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("derivation has no image for variable `{0}`")]
    MissingImage(String),
    #[error("`{0}` is not of H-weight zero")]
    NotWeightZero(String),
    #[error("image `{0}` is not a linear form in the target coordinates")]
    Reexpression(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// A derivation of the polynomial ring, fixed by its values on variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    ctx: Arc<VarContext>,
    images: BTreeMap<usize, Polynomial>,
}

impl Derivation {
    pub fn new(ctx: &Arc<VarContext>) -> Self {
        Derivation {
            ctx: ctx.clone(),
            images: BTreeMap::new(),
        }
    }

    /// Every variable sent to zero.
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        let mut d = Self::new(ctx);
        for i in 0..ctx.nvars() {
            d.images.insert(i, Polynomial::zero(ctx));
        }
        d
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn set(&mut self, var: &str, image: Polynomial) -> Result<&mut Self, ActionError> {
        let i = self.ctx.var_index(var)?;
        if image.ctx() != &self.ctx {
            return Err(PolyError::ContextMismatch.into());
        }
        self.images.insert(i, image);
        Ok(self)
    }

    pub fn set_parsed(&mut self, var: &str, image: &str) -> Result<&mut Self, ActionError> {
        let p = Polynomial::parse(&self.ctx, image)?;
        self.set(var, p)
    }

    pub fn image(&self, var: &str) -> Option<&Polynomial> {
        self.ctx.index_of(var).and_then(|i| self.images.get(&i))
    }

    /// Variables with a nonzero image.
    pub fn support(&self) -> Vec<&str> {
        self.images
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(&i, _)| self.ctx.name(i))
            .collect()
    }

    /// Leibniz extension: `D(c·Πx_i^e_i) = Σ c·e_i·x^(m - e_i)·D(x_i)`.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, ActionError> {
        if p.ctx() != &self.ctx {
            return Err(PolyError::ContextMismatch.into());
        }
        let n = self.ctx.nvars();
        let mut acc = Polynomial::zero(&self.ctx);
        for (m, c) in p.terms() {
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = self
                    .images
                    .get(&i)
                    .ok_or_else(|| ActionError::MissingImage(self.ctx.name(i).to_string()))?;
                if img.is_zero() {
                    continue;
                }
                let shift = Monomial::var(n, i, -1).mul(m);
                acc = &acc + &img.mul_term(&shift, &(c * rat(e as i64)))?;
            }
        }
        Ok(acc)
    }

    /// Operator commutator `[self, other] = self∘other - other∘self`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation, ActionError> {
        let mut out = Derivation::new(&self.ctx);
        for i in 0..self.ctx.nvars() {
            let (Some(a), Some(b)) = (self.images.get(&i), other.images.get(&i)) else {
                continue;
            };
            let img = &self.apply(b)? - &other.apply(a)?;
            out.images.insert(i, img);
        }
        Ok(out)
    }

    pub fn scaled(&self, c: i64) -> Derivation {
        Derivation {
            ctx: self.ctx.clone(),
            images: self
                .images
                .iter()
                .map(|(&i, p)| (i, p.scale(&rat(c))))
                .collect(),
        }
    }
}

/// A standard basis E, H, F of sl2 acting by derivations.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    pub e: Derivation,
    pub h: Derivation,
    pub f: Derivation,
}

/// Failure of a bracket relation on a specific monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketViolation {
    pub relation: &'static str,
    pub monomial: String,
}

impl Sl2Triple {
    pub fn ctx(&self) -> &Arc<VarContext> {
        self.e.ctx()
    }

    pub fn operators(&self) -> [(&'static str, &Derivation); 3] {
        [("E", &self.e), ("H", &self.h), ("F", &self.f)]
    }

    /// Checks `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H` as operators on every
    /// monomial of degree at most `max_degree`. Returns the number of
    /// monomials checked, or the violations.
    pub fn check_brackets(&self, max_degree: u32) -> Result<usize, Vec<BracketViolation>> {
        let ctx = self.ctx();
        let monomials = monomials_up_to(ctx.nvars(), max_degree);
        let mut bad = Vec::new();
        for m in &monomials {
            let p = Polynomial::monomial(ctx, m.clone(), Coeff::from_integer(1.into()))
                .expect("nonnegative exponents");
            let comm = |a: &Derivation, b: &Derivation| -> Polynomial {
                &a.apply(&b.apply(&p).unwrap()).unwrap() - &b.apply(&a.apply(&p).unwrap()).unwrap()
            };
            let e = self.e.apply(&p).unwrap();
            let f = self.f.apply(&p).unwrap();
            let h = self.h.apply(&p).unwrap();
            let checks = [
                ("[H,E]=2E", comm(&self.h, &self.e) == e.scale(&rat(2))),
                ("[H,F]=-2F", comm(&self.h, &self.f) == f.scale(&rat(-2))),
                ("[E,F]=H", comm(&self.e, &self.f) == h),
            ];
            for (relation, ok) in checks {
                if !ok {
                    bad.push(BracketViolation {
                        relation,
                        monomial: p.to_string(),
                    });
                }
            }
        }
        if bad.is_empty() {
            Ok(monomials.len())
        } else {
            Err(bad)
        }
    }
}

/// All exponent vectors with nonnegative entries and total degree ≤ `d`.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Monomial> {
    fn go(i: usize, left: i32, cur: &mut Vec<i32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            go(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    go(0, d as i32, &mut vec![0; nvars], &mut out);
    out
}

/// The 1 ⊕ 3 action: sl2 on `(x, y, z)`, every other variable of `ctx`
/// (typically `w` and `l`) fixed.
pub fn sl2_v2_triple(ctx: &Arc<VarContext>) -> Result<Sl2Triple, ActionError> {
    let mut e = Derivation::zero(ctx);
    e.set_parsed("x", "0")?
        .set_parsed("y", "2*x")?
        .set_parsed("z", "y")?;
    let mut f = Derivation::zero(ctx);
    f.set_parsed("x", "y")?
        .set_parsed("y", "2*z")?
        .set_parsed("z", "0")?;
    let mut h = Derivation::zero(ctx);
    h.set_parsed("x", "2*x")?
        .set_parsed("y", "0")?
        .set_parsed("z", "-2*z")?;
    Ok(Sl2Triple { e, h, f })
}

/// Coordinates of the degree-two embedding `P2 → P5`, in order
/// `a, b, c, e, f, u` with `u = l^k g`.
pub const VERONESE_IMAGES: [(&str, &str); 6] = [
    ("a", "x^2"),
    ("b", "2*x*y"),
    ("c", "2*x*z + y^2"),
    ("e", "2*y*z"),
    ("f", "z^2"),
    ("u", "4*x*z - y^2"),
];

/// The five-dimensional action on `(a, b, c, e, f)` induced from
/// [`sl2_v2_triple`] through [`VERONESE_IMAGES`]; `g` and `l` are fixed.
///
/// Each image `D(a)`, …, `D(f)` is computed on the quadratic forms in
/// `(x, y, z)` and solved back as a linear form in `a, …, f, l^k g`.
pub fn sl2_v4_triple(ctx: &Arc<VarContext>, k: u32) -> Result<Sl2Triple, ActionError> {
    let xyz = VarContext::grevlex(&["x", "y", "z"], &[]);
    let v2 = sl2_v2_triple(&xyz)?;
    let images: Vec<Polynomial> = VERONESE_IMAGES
        .iter()
        .map(|(_, s)| Polynomial::parse(&xyz, s))
        .collect::<Result<_, _>>()?;
    let quad_monos = monomials_up_to(3, 2)
        .into_iter()
        .filter(|m| m.degree() == 2)
        .collect::<Vec<_>>();
    let coords = |p: &Polynomial| -> Vec<Coeff> {
        quad_monos
            .iter()
            .map(|m| {
                p.terms()
                    .iter()
                    .find(|(tm, _)| tm == m)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(Coeff::zero)
            })
            .collect()
    };
    let columns: Vec<Vec<Coeff>> = images.iter().map(coords).collect();
    let u = Polynomial::var_pow(ctx, "l", k as i32)?.checked_mul(&Polynomial::var(ctx, "g")?)?;
    let mut targets: Vec<Polynomial> = VERONESE_IMAGES[..5]
        .iter()
        .map(|(v, _)| Polynomial::var(ctx, v))
        .collect::<Result<_, _>>()?;
    targets.push(u);

    let push = |d: &Derivation| -> Result<Derivation, ActionError> {
        let mut out = Derivation::zero(ctx);
        for ((name, _), img) in VERONESE_IMAGES[..5].iter().zip(&images) {
            let dq = d.apply(img)?;
            let sol = solve_columns(&columns, &coords(&dq))
                .ok_or_else(|| ActionError::Reexpression(dq.to_string()))?;
            let mut lin = Polynomial::zero(ctx);
            for (c, t) in sol.iter().zip(&targets) {
                lin = &lin + &t.scale(c);
            }
            out.set(name, lin)?;
        }
        Ok(out)
    };
    Ok(Sl2Triple {
        e: push(&v2.e)?,
        h: push(&v2.h)?,
        f: push(&v2.f)?,
    })
}

/// Generator/operator pairs whose image falls outside the ideal.
pub fn invariance_failures(
    ideal: &Ideal,
    triple: &Sl2Triple,
) -> Result<Vec<(String, String)>, ActionError> {
    let mut bad = Vec::new();
    for (name, d) in triple.operators() {
        for g in ideal.generators() {
            let img = d.apply(g)?;
            if !ideal.contains(&img)? {
                bad.push((name.to_string(), g.to_string()));
            }
        }
    }
    Ok(bad)
}

/// True iff `D(g) ∈ I` for every generator `g` and every `D ∈ {E, H, F}`.
pub fn check_ideal_invariance(ideal: &Ideal, triple: &Sl2Triple) -> Result<bool, ActionError> {
    Ok(invariance_failures(ideal, triple)?.is_empty())
}

/// `ξ · v = ξ^weight(v) v`; variables without a weight are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAction {
    pub weights: BTreeMap<String, i64>,
}

impl TorusAction {
    pub fn new<'a>(weights: impl IntoIterator<Item = (&'a str, i64)>) -> Self {
        TorusAction {
            weights: weights
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    pub fn weight(&self, var: &str) -> i64 {
        self.weights.get(var).copied().unwrap_or(0)
    }

    /// The scaling as a substitution into `target`, which must contain every
    /// variable of `ctx` plus the invertible parameter `xi`.
    pub fn as_substitution(
        &self,
        ctx: &VarContext,
        target: &Arc<VarContext>,
        xi: &str,
    ) -> Result<SubstitutionMap, PolyError> {
        let mut s = SubstitutionMap::new(target);
        for n in ctx.names() {
            let img = Polynomial::var(target, n)?
                .checked_mul(&Polynomial::var_pow(target, xi, self.weight(n) as i32)?)?;
            s.assign(n, img)?;
        }
        if ctx.index_of(xi).is_none() {
            s.assign(xi, Polynomial::var(target, xi)?)?;
        }
        Ok(s)
    }
}

/// Every generator is homogeneous for the torus weights.
pub fn check_semi_invariance(ideal: &Ideal, action: &TorusAction) -> bool {
    ideal
        .generators()
        .iter()
        .all(|g| g.weight_of(&action.weights).is_ok())
}

/// Substitutes the scaling with a fresh invertible `xi` into each generator
/// and compares with `xi^d · g`. Returns the weight `d` of each generator, or
/// `None` if some generator fails the identity.
pub fn semi_invariance_literal(
    ideal: &Ideal,
    action: &TorusAction,
    xi: &str,
) -> Result<Option<Vec<i64>>, PolyError> {
    let ctx = ideal.ctx();
    let ext = ctx.extend(&[xi], &[xi])?;
    let s = action.as_substitution(ctx, &ext, xi)?;
    let mut weights = Vec::new();
    for g in ideal.generators() {
        let d = match g.weight_of(&action.weights) {
            Ok(d) => d,
            Err(_) => return Ok(None),
        };
        let lhs = g.substitute(&s)?;
        let rhs = g
            .to_context(&ext)?
            .checked_mul(&Polynomial::var_pow(&ext, xi, d as i32)?)?;
        if lhs != rhs {
            return Ok(None);
        }
        weights.push(d);
    }
    Ok(Some(weights))
}

/// `[F^s(m), …, F(m), m, E(m), …, E^s(m)]` with zero entries dropped.
pub fn generate_weight_basis(
    middle: &Polynomial,
    triple: &Sl2Triple,
    steps: usize,
) -> Result<Vec<Polynomial>, ActionError> {
    if !triple.h.apply(middle)?.is_zero() {
        return Err(ActionError::NotWeightZero(middle.to_string()));
    }
    let chain = |d: &Derivation| -> Result<Vec<Polynomial>, ActionError> {
        let mut out = Vec::new();
        let mut cur = middle.clone();
        for _ in 0..steps {
            cur = d.apply(&cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    };
    let down = chain(&triple.f)?;
    let up = chain(&triple.e)?;
    Ok(down
        .into_iter()
        .rev()
        .chain(std::iter::once(middle.clone()))
        .chain(up)
        .filter(|p| !p.is_zero())
        .collect())
}
