//! The quadratic extension `B = Q[T,X,Y][z] / (z^2 - q)` and the subring
//! `S ⊂ B` cut out by a numerical-semigroup condition on `T`-exponents.
//!
//! `(1, z)` is a free module basis over the base polynomial ring, so every
//! element has the unique normal form `f0 + f1*z`; arithmetic reduces `z^2`
//! to `q` and never produces higher `z`-degree. The subring is a membership
//! predicate, not a quotient construction: an element belongs to `S` exactly
//! when every term of both components has an allowed `T`-exponent.

use crate::poly::{self, Poly, Var};
use crate::rat::Rat;
use serde::Serialize;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("relation polynomial mentions `{0}`, which is not a base variable")]
    RelationOutsideBase(Var),
    #[error("numerical semigroup generators must be positive integers with gcd 1")]
    DegenerateSemigroup,
    #[error("the zero element has no valuation")]
    ZeroValuation,
    #[error("element is not a member of the subring")]
    NotInSubring,
}

/// The ambient extension ring: an ordered list of base variables and the
/// relation polynomial `q` with `z^2 = q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtRingSpec {
    base_vars: Vec<Var>,
    q: Poly,
}

impl ExtRingSpec {
    /// Fails if `q` involves a variable outside the base ring.
    pub fn new(base_vars: Vec<Var>, q: Poly) -> Result<Self, RingError> {
        for v in Var::ALL {
            if q.involves(v) && !base_vars.contains(&v) {
                return Err(RingError::RelationOutsideBase(v));
            }
        }
        Ok(ExtRingSpec { base_vars, q })
    }

    pub fn base_vars(&self) -> &[Var] {
        &self.base_vars
    }

    /// The square of `z`.
    pub fn q(&self) -> &Poly {
        &self.q
    }
}

/// Normal form `f0 + f1*z` of an element of the extension ring. Equality is
/// componentwise; the `z`-degree never exceeds one.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ExtElem {
    f0: Poly,
    f1: Poly,
}

impl ExtElem {
    pub fn new(f0: Poly, f1: Poly) -> Self {
        ExtElem { f0, f1 }
    }

    pub fn zero() -> Self {
        ExtElem::default()
    }

    pub fn one() -> Self {
        ExtElem::from_poly(Poly::one())
    }

    pub fn z() -> Self {
        ExtElem::new(Poly::zero(), Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        ExtElem::new(p, Poly::zero())
    }

    pub fn scalar(c: Rat) -> Self {
        ExtElem::from_poly(Poly::constant(c))
    }

    pub fn f0(&self) -> &Poly {
        &self.f0
    }

    pub fn f1(&self) -> &Poly {
        &self.f1
    }

    pub fn is_zero(&self) -> bool {
        self.f0.is_zero() && self.f1.is_zero()
    }

    /// Product in the extension ring:
    /// `(x0 + x1 z)(y0 + y1 z) = x0 y0 + x1 y1 q + (x0 y1 + x1 y0) z`.
    pub fn mul(&self, other: &ExtElem, spec: &ExtRingSpec) -> ExtElem {
        ExtElem {
            f0: &(&self.f0 * &other.f0) + &(&(&self.f1 * &other.f1) * spec.q()),
            f1: &(&self.f0 * &other.f1) + &(&self.f1 * &other.f0),
        }
    }

    /// Product with a base-ring polynomial; needs no relation.
    pub fn mul_poly(&self, p: &Poly) -> ExtElem {
        ExtElem {
            f0: &self.f0 * p,
            f1: &self.f1 * p,
        }
    }

    pub fn scale(&self, c: &Rat) -> ExtElem {
        ExtElem {
            f0: self.f0.scale(c),
            f1: self.f1.scale(c),
        }
    }

    pub fn pow(&self, e: u32, spec: &ExtRingSpec) -> ExtElem {
        let mut result = ExtElem::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, spec);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, spec);
            }
        }
        result
    }

    /// Minimum `T`-exponent over both components; `None` for zero.
    pub fn t_valuation(&self) -> Option<u32> {
        match (self.f0.t_valuation(), self.f1.t_valuation()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, b) => b,
        }
    }

    /// Maximum degree in the `X`-like variables over both components.
    pub fn xy_degree(&self) -> Option<u32> {
        self.f0.xy_degree().max(self.f1.xy_degree())
    }
}

impl Add for &ExtElem {
    type Output = ExtElem;
    fn add(self, rhs: &ExtElem) -> ExtElem {
        ExtElem {
            f0: &self.f0 + &rhs.f0,
            f1: &self.f1 + &rhs.f1,
        }
    }
}

impl Sub for &ExtElem {
    type Output = ExtElem;
    fn sub(self, rhs: &ExtElem) -> ExtElem {
        ExtElem {
            f0: &self.f0 - &rhs.f0,
            f1: &self.f1 - &rhs.f1,
        }
    }
}

impl Neg for &ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        ExtElem {
            f0: -&self.f0,
            f1: -&self.f1,
        }
    }
}

impl Add for ExtElem {
    type Output = ExtElem;
    fn add(self, rhs: ExtElem) -> ExtElem {
        &self + &rhs
    }
}

impl Sub for ExtElem {
    type Output = ExtElem;
    fn sub(self, rhs: ExtElem) -> ExtElem {
        &self - &rhs
    }
}

impl Neg for ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        -&self
    }
}

/// Writes the `z`-component as a single summand. Returns the sign to emit
/// and a closure-free body via a small buffer type.
fn z_segment(f1: &Poly) -> Option<(bool, String)> {
    if f1.is_zero() {
        return None;
    }
    if f1.num_terms() == 1 {
        let (m, c) = f1.terms().next().expect("nonzero");
        let mag = c.abs();
        let body = if m.is_one() {
            if mag.is_one() {
                "z".to_string()
            } else {
                format!("{mag}*z")
            }
        } else if mag.is_one() {
            format!("{m}*z")
        } else {
            format!("{mag}*{m}*z")
        };
        Some((c.is_negative(), body))
    } else {
        Some((false, format!("({f1})*z")))
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.f0.is_zero(), z_segment(&self.f1)) {
            (true, None) => f.write_str("0"),
            (false, None) => write!(f, "{}", self.f0),
            (true, Some((neg, body))) => {
                if neg {
                    // Same hazard as in Poly: a leading `-` must not capture a
                    // power, so `-T^2*z` is spelled `-1*T^2*z`.
                    let needs_unit = self.f1.terms().next().is_some_and(|(m, c)| {
                        c.abs().is_one() && poly::leading_minus_needs_unit_coeff(m)
                    });
                    if needs_unit {
                        write!(f, "-1*{body}")
                    } else {
                        write!(f, "-{body}")
                    }
                } else {
                    f.write_str(&body)
                }
            }
            (false, Some((neg, body))) => {
                write!(f, "{}", self.f0)?;
                f.write_str(if neg { " - " } else { " + " })?;
                f.write_str(&body)
            }
        }
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A numerical semigroup given by generators: the set of all non-negative
/// integer combinations. Construction computes the finite gap set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NumericalSemigroup {
    generators: Vec<u32>,
    gaps: Vec<u32>,
}

impl NumericalSemigroup {
    pub fn new(generators: &[u32]) -> Result<Self, RingError> {
        if generators.is_empty() || generators.contains(&0) {
            return Err(RingError::DegenerateSemigroup);
        }
        let mut gens: Vec<u32> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        let g = gens.iter().copied().fold(0u32, gcd);
        if g != 1 {
            return Err(RingError::DegenerateSemigroup);
        }
        // Reachability sieve; stop once min(gens) consecutive members appear,
        // after which every larger integer is a member.
        let min_gen = gens[0] as usize;
        let cap = 1usize << 16;
        let mut reachable = vec![false; cap];
        reachable[0] = true;
        let mut run = 0usize;
        let mut frontier = 0usize;
        for n in 0..cap {
            if !reachable[n] {
                run = 0;
                continue;
            }
            for &g in &gens {
                let m = n + g as usize;
                if m < cap {
                    reachable[m] = true;
                }
            }
            run = if n > 0 && reachable[n - 1] {
                run + 1
            } else {
                1
            };
            if run >= min_gen {
                frontier = n;
                break;
            }
        }
        if frontier == 0 && min_gen > 1 {
            return Err(RingError::DegenerateSemigroup);
        }
        let gaps = (0..frontier)
            .filter(|&n| !reachable[n])
            .map(|n| n as u32)
            .collect();
        Ok(NumericalSemigroup {
            generators: gens,
            gaps,
        })
    }

    pub fn contains(&self, n: u32) -> bool {
        self.gaps.binary_search(&n).is_err()
    }

    /// The finitely many non-members, in increasing order.
    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Membership predicate for the subring: every term of both components must
/// carry an exponent of the gap variable that lies in the semigroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubringSpec {
    gap_var: Var,
    semigroup: NumericalSemigroup,
}

impl SubringSpec {
    pub fn new(gap_var: Var, semigroup: NumericalSemigroup) -> Self {
        SubringSpec { gap_var, semigroup }
    }

    pub fn gap_var(&self) -> Var {
        self.gap_var
    }

    pub fn semigroup(&self) -> &NumericalSemigroup {
        &self.semigroup
    }

    pub fn allows(&self, exponent: u32) -> bool {
        self.semigroup.contains(exponent)
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        p.terms()
            .all(|(m, _)| self.allows(m.exponent(self.gap_var)))
    }

    pub fn contains(&self, x: &ExtElem) -> bool {
        self.contains_poly(x.f0()) && self.contains_poly(x.f1())
    }
}

/// Valuation of a subring element in the gap variable, over both components.
/// For a semigroup with gap set `{1}` the result is never 1: divisibility by
/// the gap variable automatically refines to divisibility by its square.
pub fn valuation_refine(x: &ExtElem, sub: &SubringSpec) -> Result<u32, RingError> {
    if x.is_zero() {
        return Err(RingError::ZeroValuation);
    }
    if !sub.contains(x) {
        return Err(RingError::NotInSubring);
    }
    let v = x
        .f0()
        .valuation_in(sub.gap_var())
        .into_iter()
        .chain(x.f1().valuation_in(sub.gap_var()))
        .min()
        .expect("nonzero element has a valuation");
    // the valuation is itself the exponent of some term, so membership
    // forces it into the semigroup and past every gap
    debug_assert!(sub.allows(v));
    Ok(v)
}
