//! Sparse multivariate polynomials over the rationals.
//!
//! A [`VarContext`] names the variables, marks which of them are invertible
//! (Laurent) and fixes the monomial order. Polynomials keep their terms sorted
//! in decreasing order under that monomial order with no zero coefficients, so
//! structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parse;

pub type Coeff = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("negative exponent on non-invertible variable `{0}`")]
    NegativeExponent(String),
    #[error("variable `{0}` has no assignment in the substitution")]
    UnassignedVariable(String),
    #[error("image of invertible variable `{0}` is not a unit")]
    NonUnitImage(String),
    #[error("polynomial is not homogeneous for the given weights")]
    NotHomogeneous,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Monomial order tag. `Elimination { block }` orders the first `block`
/// variables ahead of the rest (grevlex inside each block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
    Elimination { block: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
    invertible: Vec<bool>,
    order: MonomialOrder,
}

impl VarContext {
    pub fn new(
        names: &[&str],
        invertible: &[&str],
        order: MonomialOrder,
    ) -> Result<Arc<Self>, PolyError> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        let mut inv = vec![false; names.len()];
        for v in invertible {
            let i = names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
            inv[i] = true;
        }
        Ok(Arc::new(VarContext {
            names,
            invertible: inv,
            order,
        }))
    }

    /// Grevlex context with the given invertible variables.
    pub fn grevlex(names: &[&str], invertible: &[&str]) -> Arc<Self> {
        Self::new(names, invertible, MonomialOrder::GrevLex).expect("valid variable list")
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn invertible_names(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.invertible)
            .filter(|(_, &inv)| inv)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// Same variables, different order.
    pub fn with_order(&self, order: MonomialOrder) -> Arc<Self> {
        Arc::new(VarContext {
            names: self.names.clone(),
            invertible: self.invertible.clone(),
            order,
        })
    }

    /// Appends fresh variables (all listed in `invertible` become Laurent).
    pub fn extend(&self, extra: &[&str], invertible: &[&str]) -> Result<Arc<Self>, PolyError> {
        let mut names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        names.extend_from_slice(extra);
        let mut inv = self.invertible_names();
        inv.extend_from_slice(invertible);
        Self::new(&names, &inv, self.order)
    }

    /// Context without the listed variables.
    pub fn without(&self, drop: &[&str]) -> Result<Arc<Self>, PolyError> {
        for d in drop {
            self.var_index(d)?;
        }
        let keep: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .filter(|n| !drop.contains(n))
            .collect();
        let inv: Vec<&str> = self
            .invertible_names()
            .into_iter()
            .filter(|n| !drop.contains(n))
            .collect();
        Self::new(&keep, &inv, self.order)
    }

    pub fn cmp_monomials(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.order {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::GrevLex => grevlex(&a.0, &b.0),
            MonomialOrder::Elimination { block } => {
                let block = block.min(a.0.len());
                grevlex(&a.0[..block], &b.0[..block])
                    .then_with(|| grevlex(&a.0[block..], &b.0[block..]))
            }
        }
    }

    fn same(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

fn grevlex(a: &[i32], b: &[i32]) -> Ordering {
    let da: i64 = a.iter().map(|&e| e as i64).sum();
    let db: i64 = b.iter().map(|&e| e as i64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// Exponent vector indexed by the context's variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: i32) -> Self {
        let mut m = Self::one(n);
        m.0[i] = e;
        m
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, exponentwise; may go negative.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Sparse polynomial with terms sorted in decreasing monomial order.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Arc<VarContext>,
    terms: Vec<(Monomial, Coeff)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

pub fn rat(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarContext>, c: Coeff) -> Self {
        Self::from_sorted(ctx, vec![(Monomial::one(ctx.nvars()), c)])
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, Coeff::one())
    }

    pub fn int(ctx: &Arc<VarContext>, n: i64) -> Self {
        Self::constant(ctx, rat(n))
    }

    pub fn var(ctx: &Arc<VarContext>, name: &str) -> Result<Self, PolyError> {
        let i = ctx.var_index(name)?;
        Ok(Self::from_sorted(
            ctx,
            vec![(Monomial::var(ctx.nvars(), i, 1), Coeff::one())],
        ))
    }

    /// `c * name^e`; negative `e` requires an invertible variable.
    pub fn var_pow(ctx: &Arc<VarContext>, name: &str, e: i32) -> Result<Self, PolyError> {
        let i = ctx.var_index(name)?;
        Self::monomial(ctx, Monomial::var(ctx.nvars(), i, e), Coeff::one())
    }

    pub fn monomial(ctx: &Arc<VarContext>, m: Monomial, c: Coeff) -> Result<Self, PolyError> {
        Self::from_terms(ctx, [(m, c)])
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(
        ctx: &Arc<VarContext>,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Result<Self, PolyError> {
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.0.len(), ctx.nvars(), "exponent vector length");
            check_exponents(ctx, &m)?;
            *acc.entry(m).or_insert_with(Coeff::zero) += c;
        }
        Ok(Self::from_map(ctx, acc))
    }

    pub fn parse(ctx: &Arc<VarContext>, src: &str) -> Result<Self, PolyError> {
        parse::parse_polynomial(ctx, src)
    }

    fn from_map(ctx: &Arc<VarContext>, acc: HashMap<Monomial, Coeff>) -> Self {
        let mut terms: Vec<(Monomial, Coeff)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| ctx.cmp_monomials(&b.0, &a.0));
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    /// Terms must already be sorted, distinct and valid; zeros are dropped.
    pub(crate) fn from_sorted(ctx: &Arc<VarContext>, mut terms: Vec<(Monomial, Coeff)>) -> Self {
        terms.retain(|(_, c)| !c.is_zero());
        Polynomial {
            ctx: ctx.clone(),
            terms,
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Nonzero constant.
    pub fn is_unit_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    /// A single term whose negative exponents sit on invertible variables,
    /// i.e. a unit of the Laurent ring.
    pub fn is_laurent_unit(&self) -> bool {
        self.terms.len() == 1
            && self.terms[0]
                .0
                 .0
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || self.ctx.is_invertible(i))
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coeff(&self) -> Option<&Coeff> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.0.iter().all(|&e| e >= 0))
    }

    /// Indices of variables occurring with a nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ctx.nvars())
            .filter(|&i| self.terms.iter().any(|(m, _)| m.0[i] != 0))
            .collect()
    }

    pub fn uses_var(&self, name: &str) -> bool {
        match self.ctx.index_of(name) {
            Some(i) => self.terms.iter().any(|(m, _)| m.0[i] != 0),
            None => false,
        }
    }

    pub fn degree_in(&self, i: usize) -> i32 {
        self.terms.iter().map(|(m, _)| m.0[i]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    /// Leading coefficient scaled to 1; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }

    /// Multiplies by `c * m`; `m` may carry negative exponents on invertible
    /// variables.
    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Result<Self, PolyError> {
        if c.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (tm, tc) in &self.terms {
            let nm = tm.mul(m);
            check_exponents(&self.ctx, &nm)?;
            terms.push((nm, tc * c));
        }
        Ok(Polynomial {
            ctx: self.ctx.clone(),
            terms,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.combine(other, &Coeff::one())
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.combine(other, &-Coeff::one())
    }

    /// `self + c * other` by merging the sorted term lists.
    fn combine(&self, other: &Self, c: &Coeff) -> Result<Self, PolyError> {
        if !self.ctx.same(&other.ctx) {
            return Err(PolyError::ContextMismatch);
        }
        Ok(self.merge(other.terms.iter().map(|(m, a)| (m.clone(), a * c))))
    }

    fn merge(&self, other: impl Iterator<Item = (Monomial, Coeff)>) -> Self {
        let mut out = Vec::with_capacity(self.terms.len());
        let mut lhs = self.terms.iter().peekable();
        let mut rhs = other.peekable();
        loop {
            match (lhs.peek(), rhs.peek()) {
                (Some(a), Some(b)) => match self.ctx.cmp_monomials(&a.0, &b.0) {
                    Ordering::Greater => out.push(lhs.next().unwrap().clone()),
                    Ordering::Less => out.push(rhs.next().unwrap()),
                    Ordering::Equal => {
                        let (m, x) = lhs.next().unwrap();
                        let (_, y) = rhs.next().unwrap();
                        let s = x + y;
                        if !s.is_zero() {
                            out.push((m.clone(), s));
                        }
                    }
                },
                (Some(_), None) => out.push(lhs.next().unwrap().clone()),
                (None, Some(_)) => out.push(rhs.next().unwrap()),
                (None, None) => break,
            }
        }
        Polynomial {
            ctx: self.ctx.clone(),
            terms: out,
        }
    }

    /// `self - c * m * g`, the reduction step; `m * g` keeps its term order
    /// because every supported order is multiplicative.
    pub(crate) fn sub_scaled_shift(&self, c: &Coeff, m: &Monomial, g: &Polynomial) -> Self {
        self.merge(g.terms.iter().map(|(gm, gc)| (gm.mul(m), -(gc * c))))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if !self.ctx.same(&other.ctx) {
            return Err(PolyError::ContextMismatch);
        }
        let mut acc: HashMap<Monomial, Coeff> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                debug_assert!(check_exponents(&self.ctx, &m).is_ok());
                *acc.entry(m).or_insert_with(Coeff::zero) += ca * cb;
            }
        }
        Ok(Self::from_map(&self.ctx, acc))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Inverse of a Laurent unit.
    pub fn unit_inverse(&self) -> Option<Self> {
        if !self.is_laurent_unit() {
            return None;
        }
        let (m, c) = &self.terms[0];
        Some(Polynomial {
            ctx: self.ctx.clone(),
            terms: vec![(Monomial(m.0.iter().map(|e| -e).collect()), c.recip())],
        })
    }

    /// Integer power, negative powers only for Laurent units.
    pub fn powi(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            self.unit_inverse().map(|u| u.pow((-e) as u32))
        }
    }

    pub fn derivative(&self, name: &str) -> Result<Self, PolyError> {
        let i = self.ctx.var_index(name)?;
        Ok(self.derivative_idx(i))
    }

    pub fn derivative_idx(&self, i: usize) -> Self {
        let mut acc = HashMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e != 0 {
                let mut nm = m.clone();
                nm.0[i] -= 1;
                *acc.entry(nm).or_insert_with(Coeff::zero) += c * rat(e as i64);
            }
        }
        Self::from_map(&self.ctx, acc)
    }

    /// Exponentwise minimum over the invertible variables (zero elsewhere).
    pub fn invertible_content(&self) -> Monomial {
        let n = self.ctx.nvars();
        let mut content = Monomial::one(n);
        for i in 0..n {
            if self.ctx.is_invertible(i) {
                content.0[i] = self.terms.iter().map(|(m, _)| m.0[i]).min().unwrap_or(0);
            }
        }
        content
    }

    /// Divides out the invertible content; returns the normalized polynomial
    /// and the monomial that was removed.
    pub fn clear_units(&self) -> (Self, Monomial) {
        let content = self.invertible_content();
        if content.is_one() {
            return (self.clone(), content);
        }
        let inv = Monomial(content.0.iter().map(|e| -e).collect());
        let p = Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(&inv), c.clone()))
                .collect(),
        };
        (p, content)
    }

    /// Reinterprets the polynomial in another context with the same variable
    /// names for every variable it uses.
    pub fn to_context(&self, target: &Arc<VarContext>) -> Result<Self, PolyError> {
        if self.ctx.same(target) {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self
            .ctx
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.nvars());
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    match map[i] {
                        Some(j) => nm.0[j] = e,
                        None => {
                            return Err(PolyError::UnknownVariable(self.ctx.name(i).to_string()))
                        }
                    }
                }
            }
            terms.push((nm, c.clone()));
        }
        Self::from_terms(target, terms)
    }

    /// Common weighted degree of all terms. Variables missing from `weights`
    /// have weight 0; the zero polynomial reports weight 0.
    pub fn weight_of(&self, weights: &BTreeMap<String, i64>) -> Result<i64, PolyError> {
        let w: Vec<i64> = self
            .ctx
            .names()
            .iter()
            .map(|n| weights.get(n).copied().unwrap_or(0))
            .collect();
        let mut found = None;
        for (m, _) in &self.terms {
            let d: i64 = m.0.iter().zip(&w).map(|(&e, &wi)| e as i64 * wi).sum();
            match found {
                None => found = Some(d),
                Some(prev) if prev != d => return Err(PolyError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(found.unwrap_or(0))
    }

    pub fn substitute(&self, s: &SubstitutionMap) -> Result<Self, PolyError> {
        s.apply(self)
    }
}

fn check_exponents(ctx: &VarContext, m: &Monomial) -> Result<(), PolyError> {
    for (i, &e) in m.0.iter().enumerate() {
        if e < 0 && !ctx.is_invertible(i) {
            return Err(PolyError::NegativeExponent(ctx.name(i).to_string()));
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ctx.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.ctx.name(i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomial context mismatch")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Coeff::one())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Simultaneous substitution of polynomials for variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionMap {
    target: Arc<VarContext>,
    assignments: BTreeMap<String, Polynomial>,
}

impl SubstitutionMap {
    pub fn new(target: &Arc<VarContext>) -> Self {
        SubstitutionMap {
            target: target.clone(),
            assignments: BTreeMap::new(),
        }
    }

    /// Every variable of `ctx` mapped to the same-named variable of `target`.
    pub fn identity(ctx: &VarContext, target: &Arc<VarContext>) -> Result<Self, PolyError> {
        let mut s = Self::new(target);
        for n in ctx.names() {
            s.assign(n, Polynomial::var(target, n)?)?;
        }
        Ok(s)
    }

    pub fn target(&self) -> &Arc<VarContext> {
        &self.target
    }

    /// Assigns (or reassigns) the image of `name`.
    pub fn assign(&mut self, name: &str, image: Polynomial) -> Result<&mut Self, PolyError> {
        if !image.ctx.same(&self.target) {
            return Err(PolyError::ContextMismatch);
        }
        self.assignments.insert(name.to_string(), image);
        Ok(self)
    }

    pub fn with(mut self, name: &str, image: Polynomial) -> Result<Self, PolyError> {
        self.assign(name, image)?;
        Ok(self)
    }

    /// Assigns by parsing `image` in the target context.
    pub fn with_parsed(self, name: &str, image: &str) -> Result<Self, PolyError> {
        let p = Polynomial::parse(&self.target, image)?;
        self.with(name, p)
    }

    pub fn get(&self, name: &str) -> Option<&Polynomial> {
        self.assignments.get(name)
    }

    pub fn assignments(&self) -> &BTreeMap<String, Polynomial> {
        &self.assignments
    }

    fn image(&self, ctx: &VarContext, i: usize) -> Result<&Polynomial, PolyError> {
        let name = ctx.name(i);
        let img = self
            .assignments
            .get(name)
            .ok_or_else(|| PolyError::UnassignedVariable(name.to_string()))?;
        if ctx.is_invertible(i) && !img.is_laurent_unit() {
            return Err(PolyError::NonUnitImage(name.to_string()));
        }
        Ok(img)
    }

    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, PolyError> {
        Ok(self.apply_tracking(p)?.0)
    }

    /// Substitutes and also reports, per invertible target variable, the
    /// power that clears every denominator produced factor by factor before
    /// terms are combined (e.g. `l^3 ↦ l^-3` contributes 3).
    pub fn apply_tracking(
        &self,
        p: &Polynomial,
    ) -> Result<(Polynomial, BTreeMap<String, i32>), PolyError> {
        let src = p.ctx.clone();
        let support = p.support();
        let mut images = HashMap::new();
        for &i in &support {
            images.insert(i, self.image(&src, i)?);
        }
        let tgt = &self.target;
        let inv_idx: Vec<usize> = (0..tgt.nvars()).filter(|&j| tgt.is_invertible(j)).collect();
        let mut powers: HashMap<(usize, i32), (Polynomial, Vec<i32>)> = HashMap::new();
        let mut result = Polynomial::zero(tgt);
        let mut cleared = vec![0i32; inv_idx.len()];
        for (m, c) in &p.terms {
            let mut term = Polynomial::constant(tgt, c.clone());
            let mut denom = vec![0i32; inv_idx.len()];
            for &i in &support {
                let e = m.0[i];
                if e == 0 {
                    continue;
                }
                if !powers.contains_key(&(i, e)) {
                    let img = images[&i];
                    let pw = img
                        .powi(e)
                        .ok_or_else(|| PolyError::NonUnitImage(src.name(i).to_string()))?;
                    let mins = inv_idx
                        .iter()
                        .map(|&j| pw.terms.iter().map(|(tm, _)| tm.0[j]).min().unwrap_or(0))
                        .collect();
                    powers.insert((i, e), (pw, mins));
                }
                let (pw, mins) = &powers[&(i, e)];
                for (d, &mn) in denom.iter_mut().zip(mins) {
                    *d += (-mn).max(0);
                }
                term = term.checked_mul(pw)?;
            }
            for (cl, d) in cleared.iter_mut().zip(&denom) {
                *cl = (*cl).max(*d);
            }
            result = result.checked_add(&term)?;
        }
        let cleared = inv_idx
            .iter()
            .zip(cleared)
            .map(|(&j, e)| (tgt.name(j).to_string(), e))
            .collect();
        Ok((result, cleared))
    }

    /// `v ↦ then(self(v))`: apply `self` first, then `then`.
    pub fn compose(&self, then: &SubstitutionMap) -> Result<SubstitutionMap, PolyError> {
        let mut out = SubstitutionMap::new(&then.target);
        for (name, img) in &self.assignments {
            out.assign(name, then.apply(img)?)?;
        }
        Ok(out)
    }
}
