//! Sparse multivariate polynomials over [`Rat`].
//!
//! The variable set is fixed: `T`, `X`, `Y` generate the base ring, and `P`
//! is the rectified coordinate standing for `X + T*Y`. Terms live in a map
//! keyed by [`Monomial`] under a canonical graded-lexicographic order: the
//! grade is the total degree in the `X`-like variables (`P`, `X`, `Y`), ties
//! break lexicographically with priority `P > X > Y > T`. Text output lists
//! terms in descending canonical order, so printing is deterministic and
//! suitable for golden-file comparison.

use crate::rat::Rat;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A variable of the engine.
///
/// The `Ord` derived here (`T < P < X < Y`) is the display order inside a
/// monomial; it is unrelated to the canonical term order, which compares
/// variables by [`Var::priority`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Var {
    T,
    P,
    X,
    Y,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::P, Var::X, Var::Y];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "T",
            Var::P => "P",
            Var::X => "X",
            Var::Y => "Y",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "T" => Some(Var::T),
            "P" => Some(Var::P),
            "X" => Some(Var::X),
            "Y" => Some(Var::Y),
            _ => None,
        }
    }

    /// Weight of the variable in the grading of the canonical order.
    fn xy_weight(self) -> u32 {
        match self {
            Var::T => 0,
            Var::P | Var::X | Var::Y => 1,
        }
    }

    /// Lexicographic tie-break priority, highest first: `P > X > Y > T`.
    const PRIORITY: [Var; 4] = [Var::P, Var::X, Var::Y, Var::T];
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A power product of variables. Zero exponents are never stored, so two
/// monomials are equal exactly when their exponent maps are.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: BTreeMap<Var, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial::power(v, 1)
    }

    pub fn power(v: Var, e: u32) -> Self {
        let mut exps = BTreeMap::new();
        if e > 0 {
            exps.insert(v, e);
        }
        Monomial { exps }
    }

    /// Builds a monomial from `(variable, exponent)` pairs, accumulating
    /// duplicates and dropping zero exponents.
    pub fn from_exponents(it: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut m = Monomial::one();
        for (v, e) in it {
            if e > 0 {
                let slot = m.exps.entry(v).or_insert(0);
                *slot = slot.checked_add(e).expect("exponent overflow");
            }
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.exps.get(&v).copied().unwrap_or(0)
    }

    /// Exponent pairs in display order (`T`, `P`, `X`, `Y`).
    pub fn exponents(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    /// Exponent arithmetic is checked: overflowing `u32` would silently
    /// corrupt the algebra, so it panics instead.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let slot = exps.entry(v).or_insert(0);
            *slot = slot.checked_add(e).expect("exponent overflow");
        }
        Monomial { exps }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self
                .exps
                .iter()
                .map(|(&v, &x)| (v, x.checked_mul(e).expect("exponent overflow")))
                .collect(),
        }
    }

    /// Monomial with the exponent of `v` removed.
    pub fn without(&self, v: Var) -> Monomial {
        let mut exps = self.exps.clone();
        exps.remove(&v);
        Monomial { exps }
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.values().sum()
    }

    /// Degree in the `X`-like variables (`P`, `X`, `Y` weigh 1, `T` weighs 0).
    pub fn xy_degree(&self) -> u32 {
        self.exps.iter().map(|(v, e)| v.xy_weight() * e).sum()
    }

    pub fn weighted_degree(&self, weights: &BTreeMap<Var, i64>) -> i64 {
        self.exps
            .iter()
            .map(|(v, &e)| weights.get(v).copied().unwrap_or(0) * i64::from(e))
            .sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.xy_degree().cmp(&other.xy_degree()).then_with(|| {
            for v in Var::PRIORITY {
                match self.exponent(v).cmp(&other.exponent(v)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.exponents().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial with exact rational coefficients. The zero
/// polynomial has an empty term map; explicit zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Rat::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v), Rat::one())
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.insert_add(m, c);
        }
        p
    }

    fn insert_add(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
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

    /// Formal partial derivative with respect to `v`. Satisfies the Leibniz
    /// rule by construction of the power rule term by term.
    pub fn partial_derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut lowered = m.without(v);
            if e > 1 {
                lowered = lowered.mul(&Monomial::power(v, e - 1));
            }
            out.insert_add(lowered, c * Rat::from_int(i64::from(e)));
        }
        out
    }

    /// Minimum `T`-exponent over all terms; `None` stands for `+∞` (the zero
    /// polynomial).
    pub fn t_valuation(&self) -> Option<u32> {
        self.valuation_in(Var::T)
    }

    pub fn valuation_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v)).min()
    }

    /// Maximum of the weight-dot-exponent over all terms; `None` stands for
    /// `-∞` (the zero polynomial).
    pub fn weighted_degree(&self, weights: &BTreeMap<Var, i64>) -> Option<i64> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    /// Degree in the `X`-like variables; `None` for the zero polynomial.
    pub fn xy_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.xy_degree()).max()
    }

    /// Maximum exponent of `v`; `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v)).max()
    }

    pub fn involves(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    /// Image of the substitution `v ↦ replacement`, all other variables
    /// fixed. This is the unique ring homomorphism extending that assignment.
    pub fn substitute(&self, v: Var, replacement: &Poly) -> Poly {
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v) as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * replacement;
                powers.push(next);
            }
            let rest = Poly::monomial(m.without(v), c.clone());
            out = &out + &(&rest * &powers[e]);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_add(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_poly_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $trait<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Renders `mag * m` for a positive magnitude, omitting redundant pieces:
/// a unit magnitude prints as the bare monomial, a trivial monomial as the
/// bare magnitude.
pub(crate) fn write_term(f: &mut fmt::Formatter<'_>, mag: &Rat, m: &Monomial) -> fmt::Result {
    if m.is_one() {
        write!(f, "{mag}")
    } else if mag.is_one() {
        write!(f, "{m}")
    } else {
        write!(f, "{mag}*{m}")
    }
}

/// True when `-{m}` would be misparsed: the grammar binds `^` tighter than a
/// leading `-`, so `-X^2` reads as `(-X)^2`. A leading negative unit
/// coefficient must then be spelled `-1*X^2`.
pub(crate) fn leading_minus_needs_unit_coeff(m: &Monomial) -> bool {
    m.exponents().next().is_some_and(|(_, e)| e >= 2)
}

/// Renders a term in leading position with a negative sign already emitted;
/// guards unit coefficients against the `(-base)^e` hazard.
pub(crate) fn write_leading_negated_term(
    f: &mut fmt::Formatter<'_>,
    mag: &Rat,
    m: &Monomial,
) -> fmt::Result {
    if mag.is_one() && !m.is_one() && leading_minus_needs_unit_coeff(m) {
        write!(f, "1*{m}")
    } else {
        write_term(f, mag, m)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                    write_leading_negated_term(f, &mag, m)?;
                } else {
                    write_term(f, &mag, m)?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
                write_term(f, &mag, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
