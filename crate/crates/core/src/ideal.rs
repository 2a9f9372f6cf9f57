//! Polynomial ideals: membership, unit-tolerant comparison, elimination and
//! Jacobian (singular-locus) ideals.

use std::sync::{Arc, OnceLock};

use crate::groebner::{self, Budget, IdealError};
use crate::poly::{MonomialOrder, Polynomial, VarContext};

/// Finite generator list plus a write-once Gröbner basis under the context's
/// monomial order.
#[derive(Debug)]
pub struct Ideal {
    ctx: Arc<VarContext>,
    generators: Vec<Polynomial>,
    basis: OnceLock<Vec<Polynomial>>,
    budget: Budget,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let basis = OnceLock::new();
        if let Some(b) = self.basis.get() {
            let _ = basis.set(b.clone());
        }
        Ideal {
            ctx: self.ctx.clone(),
            generators: self.generators.clone(),
            basis,
            budget: self.budget,
        }
    }
}

impl Ideal {
    pub fn new(generators: Vec<Polynomial>) -> Result<Self, IdealError> {
        let ctx = generators
            .first()
            .ok_or(IdealError::NoGenerators)?
            .ctx()
            .clone();
        Self::in_context(&ctx, generators)
    }

    /// Like [`Ideal::new`] but accepts an empty list (the zero ideal).
    pub fn in_context(
        ctx: &Arc<VarContext>,
        generators: Vec<Polynomial>,
    ) -> Result<Self, IdealError> {
        for g in &generators {
            if g.ctx() != ctx {
                return Err(IdealError::Poly(crate::poly::PolyError::ContextMismatch));
            }
            if !g.is_polynomial() {
                return Err(IdealError::LaurentInput(g.to_string()));
            }
        }
        let generators = if generators.is_empty() {
            vec![Polynomial::zero(ctx)]
        } else {
            generators
        };
        Ok(Ideal {
            ctx: ctx.clone(),
            generators,
            basis: OnceLock::new(),
            budget: Budget::default(),
        })
    }

    /// Parses each generator in `ctx`.
    pub fn parse(ctx: &Arc<VarContext>, gens: &[&str]) -> Result<Self, IdealError> {
        let polys = gens
            .iter()
            .map(|s| Polynomial::parse(ctx, s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::in_context(ctx, polys)
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// The same generators under another monomial order (fresh cache).
    pub fn with_order(&self, order: MonomialOrder) -> Result<Self, IdealError> {
        let ctx = self.ctx.with_order(order);
        let gens = self
            .generators
            .iter()
            .map(|g| g.to_context(&ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::in_context(&ctx, gens)?.with_budget(self.budget))
    }

    /// Reduced Gröbner basis, computed once and cached.
    pub fn groebner(&self) -> Result<&[Polynomial], IdealError> {
        if let Some(b) = self.basis.get() {
            return Ok(b);
        }
        let b = groebner::groebner_basis(&self.ctx, &self.generators, self.budget)?;
        let _ = self.basis.set(b);
        Ok(self.basis.get().unwrap())
    }

    pub fn is_basis_cached(&self) -> bool {
        self.basis.get().is_some()
    }

    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, IdealError> {
        if p.ctx() != &self.ctx {
            return Err(IdealError::Poly(crate::poly::PolyError::ContextMismatch));
        }
        if !p.is_polynomial() {
            return Err(IdealError::LaurentInput(p.to_string()));
        }
        let basis = self.groebner()?;
        groebner::reduce_with_budget(p, basis, self.budget)
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, IdealError> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Membership after dividing out the invertible-variable content of `p`.
    pub fn contains_up_to_unit(&self, p: &Polynomial) -> Result<bool, IdealError> {
        self.contains(&p.clear_units().0)
    }

    pub fn is_unit_ideal(&self) -> Result<bool, IdealError> {
        Ok(self.groebner()?.iter().any(|g| g.is_unit_constant()))
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool, IdealError> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equal as ideals: same reduced Gröbner basis.
    pub fn same_ideal(&self, other: &Ideal) -> Result<bool, IdealError> {
        if self.ctx != other.ctx {
            return Err(IdealError::Poly(crate::poly::PolyError::ContextMismatch));
        }
        Ok(self.groebner()? == other.groebner()?)
    }

    /// The ideal generated by the generators with their invertible-variable
    /// monomial content divided out.
    pub fn units_cleared(&self) -> Result<Ideal, IdealError> {
        let gens = self.generators.iter().map(|g| g.clear_units().0).collect();
        Ok(Ideal::in_context(&self.ctx, gens)?.with_budget(self.budget))
    }

    /// Each generator of either ideal, with its invertible-variable monomial
    /// content cleared, lies in the other ideal (also taken with cleared
    /// generators).
    pub fn equal_up_to_units(&self, other: &Ideal) -> Result<bool, IdealError> {
        if self.ctx != other.ctx {
            return Err(IdealError::Poly(crate::poly::PolyError::ContextMismatch));
        }
        let a = self.units_cleared()?;
        let b = other.units_cleared()?;
        Ok(b.contains_ideal(&a)? && a.contains_ideal(&b)?)
    }

    /// Generators of `I ∩ Q[remaining variables]`, computed with a block
    /// order that puts `drop` first. The result lives in the context without
    /// `drop`; an empty intersection comes back as the zero ideal.
    pub fn eliminate(&self, drop: &[&str]) -> Result<Ideal, IdealError> {
        for d in drop {
            self.ctx.var_index(d)?;
        }
        let mut names: Vec<&str> = drop.to_vec();
        names.extend(
            self.ctx
                .names()
                .iter()
                .map(String::as_str)
                .filter(|n| !drop.contains(n)),
        );
        let elim_ctx = VarContext::new(
            &names,
            &self.ctx.invertible_names(),
            MonomialOrder::Elimination { block: drop.len() },
        )?;
        let gens = self
            .generators
            .iter()
            .map(|g| g.to_context(&elim_ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let basis = groebner::groebner_basis(&elim_ctx, &gens, self.budget)?;
        let sub_ctx = self.ctx.without(drop)?;
        let kept = basis
            .iter()
            .filter(|g| drop.iter().all(|d| !g.uses_var(d)))
            .map(|g| g.to_context(&sub_ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ideal::in_context(&sub_ctx, kept)?.with_budget(self.budget))
    }

    /// Generators of the ideal together with the Jacobian criterion terms in
    /// `vars`: all first partials for a single generator, otherwise all r×r
    /// minors of the Jacobian of the r nonzero generators (complete
    /// intersection case).
    pub fn jacobian_ideal(&self, vars: &[&str]) -> Result<Ideal, IdealError> {
        let gens: Vec<&Polynomial> = self.generators.iter().filter(|g| !g.is_zero()).collect();
        let idx = vars
            .iter()
            .map(|v| self.ctx.var_index(v))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out: Vec<Polynomial> = gens.iter().map(|g| (*g).clone()).collect();
        let r = gens.len();
        if r == 0 {
            return Ideal::in_context(&self.ctx, out);
        }
        let jac: Vec<Vec<Polynomial>> = gens
            .iter()
            .map(|g| idx.iter().map(|&i| g.derivative_idx(i)).collect())
            .collect();
        for cols in combinations(idx.len(), r) {
            let m: Vec<Vec<Polynomial>> = jac
                .iter()
                .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
                .collect();
            let d = determinant(&m, &self.ctx);
            if !d.is_zero() {
                out.push(d);
            }
        }
        Ok(Ideal::in_context(&self.ctx, out)?.with_budget(self.budget))
    }

    /// Whether some power `p^m`, `1 ≤ m ≤ max_power`, lies in the ideal.
    pub fn radical_contains(&self, p: &Polynomial, max_power: u32) -> Result<bool, IdealError> {
        let mut q = p.clone();
        for _ in 0..max_power {
            if self.contains(&q)? {
                return Ok(true);
            }
            q = &q * p;
        }
        Ok(false)
    }
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Laplace expansion; matrices here are at most a few rows.
fn determinant(m: &[Vec<Polynomial>], ctx: &Arc<VarContext>) -> Polynomial {
    match m.len() {
        0 => Polynomial::one(ctx),
        1 => m[0][0].clone(),
        n => {
            let mut acc = Polynomial::zero(ctx);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][c] * &determinant(&minor, ctx);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::is_groebner_basis;
    use crate::poly::SubstitutionMap;

    fn quad() -> Arc<VarContext> {
        VarContext::grevlex(&["x", "y", "z", "w", "l"], &["l"])
    }

    fn p(ctx: &Arc<VarContext>, s: &str) -> Polynomial {
        Polynomial::parse(ctx, s).unwrap()
    }

    #[test]
    fn basis_of_coordinate_ideal() {
        let c = VarContext::grevlex(&["x", "y"], &[]);
        let i = Ideal::parse(&c, &["x", "y"]).unwrap();
        assert_eq!(i.groebner().unwrap(), &[p(&c, "y"), p(&c, "x")]);
    }

    #[test]
    fn quadric_with_w_reduces() {
        let c = quad();
        let i = Ideal::parse(&c, &["4*x*z - y^2 - l*w^2", "w"]).unwrap();
        let b = i.groebner().unwrap();
        assert!(is_groebner_basis(b));
        assert!(b.contains(&p(&c, "y^2 - 4*x*z")));
        assert!(i.normal_form(&p(&c, "4*x*z - y^2")).unwrap().is_zero());
        assert!(i.contains(&p(&c, "4*x*z - y^2 - l*w^2")).unwrap());
        let j = Ideal::parse(&c, &["y"]).unwrap();
        assert_eq!(j.normal_form(&p(&c, "x")).unwrap(), p(&c, "x"));
        assert!(!j.contains(&p(&c, "x")).unwrap());
    }

    #[test]
    fn laurent_input_rejected() {
        let c = quad();
        assert!(matches!(
            Ideal::parse(&c, &["l^-1*x"]),
            Err(IdealError::LaurentInput(_))
        ));
        let i = Ideal::parse(&c, &["x"]).unwrap();
        assert!(i.normal_form(&p(&c, "l^-1*x")).is_err());
        assert!(i.contains_up_to_unit(&p(&c, "l^-1*x")).unwrap());
    }

    #[test]
    fn units_are_ignored() {
        let c = quad();
        let i = Ideal::parse(&c, &["l^2*(4*x*z - y^2 - l*w^2)"]).unwrap();
        let j = Ideal::parse(&c, &["4*x*z - y^2 - l*w^2"]).unwrap();
        assert!(i.equal_up_to_units(&j).unwrap());
        assert!(!i.same_ideal(&j).unwrap());
        let x = Ideal::parse(&c, &["x"]).unwrap();
        let y = Ideal::parse(&c, &["y"]).unwrap();
        assert!(!x.equal_up_to_units(&y).unwrap());
    }

    #[test]
    fn cusp_implicitization() {
        let c = VarContext::grevlex(&["t", "a", "b"], &[]);
        let i = Ideal::parse(&c, &["a - t^2", "b - t^3"]).unwrap();
        let e = i.eliminate(&["t"]).unwrap();
        assert_eq!(e.ctx().names(), &["a", "b"]);
        let cusp = p(e.ctx(), "a^3 - b^2");
        assert_eq!(e.generators().len(), 1);
        assert_eq!(e.generators()[0].monic(), cusp.monic());
        // the relation vanishes on the parametrization
        let s = SubstitutionMap::new(&c)
            .with_parsed("a", "t^2")
            .and_then(|s| s.with_parsed("b", "t^3"))
            .unwrap();
        assert!(p(&c, "a^3 - b^2").substitute(&s).unwrap().is_zero());
    }

    #[test]
    fn free_parameter_eliminates_to_zero() {
        let c = VarContext::grevlex(&["t", "a"], &[]);
        let e = Ideal::parse(&c, &["a - t"]).unwrap().eliminate(&["t"]).unwrap();
        assert!(e.generators().iter().all(Polynomial::is_zero));
        assert!(e.groebner().unwrap().is_empty());
        assert!(e.contains(&Polynomial::zero(e.ctx())).unwrap());
        assert!(!e.contains(&p(e.ctx(), "a")).unwrap());
    }

    #[test]
    fn jacobian_of_smooth_and_singular_charts() {
        let c = VarContext::grevlex(&["x", "y", "z", "l"], &[]);
        let all = ["x", "y", "z", "l"];
        let smooth = Ideal::parse(&c, &["4*x*z - y^2 - l"]).unwrap();
        let j = smooth.jacobian_ideal(&all).unwrap();
        assert_eq!(j.generators().len(), 5);
        assert!(j.is_unit_ideal().unwrap());

        let cone = Ideal::parse(&c, &["4*x*z - y^2 - l^3"]).unwrap();
        let j = cone.jacobian_ideal(&all).unwrap();
        assert!(!j.is_unit_ideal().unwrap());
        for v in all {
            assert!(j.radical_contains(&p(&c, v), 4).unwrap(), "{v}");
        }
        assert!(!j.contains(&p(&c, "l")).unwrap());
        assert!(j.contains(&p(&c, "l^2")).unwrap());

        let d = VarContext::grevlex(&["x"], &[]);
        let j = Ideal::parse(&d, &["x^2"]).unwrap().jacobian_ideal(&["x"]).unwrap();
        assert!(j.same_ideal(&Ideal::parse(&d, &["x"]).unwrap()).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let c = VarContext::grevlex(&["x", "y", "z"], &[]);
        let i = Ideal::parse(&c, &["x^2 - y", "x*y - 1"])
            .unwrap()
            .with_budget(Budget {
                max_basis: 2,
                max_steps: 1_000_000,
            });
        assert!(matches!(i.groebner(), Err(IdealError::BudgetExceeded(_))));
        let i = Ideal::parse(&c, &["x^2 + y^2 + z^2 - 1", "x*y - z", "x + y*z - 2"])
            .unwrap()
            .with_budget(Budget {
                max_basis: 1000,
                max_steps: 2,
            });
        assert!(matches!(i.groebner(), Err(IdealError::BudgetExceeded(_))));
    }

    #[test]
    fn basis_cache_is_write_once() {
        let c = VarContext::grevlex(&["x", "y"], &[]);
        let i = Ideal::parse(&c, &["x^2 - y", "x*y - 1"]).unwrap();
        assert!(!i.is_basis_cached());
        let first = i.groebner().unwrap().to_vec();
        assert!(i.is_basis_cached());
        assert_eq!(i.groebner().unwrap(), first.as_slice());
        assert!(is_groebner_basis(&first));
        let lex = i.with_order(MonomialOrder::Lex).unwrap();
        assert!(is_groebner_basis(lex.groebner().unwrap()));
        assert!(lex.contains(&p(lex.ctx(), "y^3 - 1")).unwrap());
    }
}
