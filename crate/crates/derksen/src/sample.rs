//! Seeded random element generators for the verification report and the
//! property suites.
//!
//! The distributions are fixed so that failures reproduce from a seed:
//! rational coefficients have numerator in `-10..=10` and denominator in
//! `1..=10`, and random ring elements combine up to 6 monomials with
//! per-variable exponents at most 4.

use crate::poly::{Monomial, Poly, Var};
use crate::rat::Rat;
use crate::rings::{ExtElem, ExtRingSpec, SubringSpec};
use rand::Rng;

pub const MAX_TERMS: usize = 6;
pub const MAX_EXP: u32 = 4;

pub fn rat<R: Rng>(rng: &mut R) -> Rat {
    Rat::new(rng.random_range(-10..=10), rng.random_range(1..=10))
}

pub fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let r = rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn monomial<R: Rng>(rng: &mut R, vars: &[Var]) -> Monomial {
    Monomial::from_exponents(vars.iter().map(|&v| (v, rng.random_range(0..=MAX_EXP))))
}

pub fn poly<R: Rng>(rng: &mut R, vars: &[Var]) -> Poly {
    let n = rng.random_range(0..=MAX_TERMS);
    Poly::from_terms((0..n).map(|_| (monomial(rng, vars), rat(rng))))
}

/// A random element of the extension ring over the base variables.
pub fn ext_elem<R: Rng>(rng: &mut R) -> ExtElem {
    let vars = [Var::T, Var::X, Var::Y];
    ExtElem::new(poly(rng, &vars), poly(rng, &vars))
}

pub fn nonzero_ext_elem<R: Rng>(rng: &mut R) -> ExtElem {
    loop {
        let e = ext_elem(rng);
        if !e.is_zero() {
            return e;
        }
    }
}

/// A random element of `Q[T, z, P]`, i.e. of the kernel of the straightened
/// derivation, expanded back to base coordinates. Not necessarily a subring
/// member.
pub fn kernel_coord_elem<R: Rng>(rng: &mut R, spec: &ExtRingSpec) -> ExtElem {
    let p = &Poly::var(Var::X) + &(&Poly::var(Var::T) * &Poly::var(Var::Y));
    let n = rng.random_range(0..=MAX_TERMS);
    let mut acc = ExtElem::zero();
    for _ in 0..n {
        let t_exp = rng.random_range(0..=MAX_EXP);
        let p_exp = rng.random_range(0..=MAX_EXP);
        let part = (&Poly::var(Var::T).pow(t_exp) * &p.pow(p_exp)).scale(&rat(rng));
        let elem = if rng.random_range(0..=1) == 0 {
            ExtElem::from_poly(part)
        } else {
            ExtElem::from_poly(part).mul(&ExtElem::z(), spec)
        };
        acc = &acc + &elem;
    }
    acc
}

/// A random subring element: monomials over the base variables whose
/// gap-variable exponents are drawn from the allowed set only.
pub fn subring_elem<R: Rng>(rng: &mut R, sub: &SubringSpec) -> ExtElem {
    let allowed: Vec<u32> = (0..=MAX_EXP + 1).filter(|&e| sub.allows(e)).collect();
    let component = |rng: &mut R| {
        let n = rng.random_range(0..=MAX_TERMS);
        Poly::from_terms((0..n).map(|_| {
            let t_exp = allowed[rng.random_range(0..allowed.len())];
            let m = Monomial::from_exponents([
                (Var::T, t_exp),
                (Var::X, rng.random_range(0..=MAX_EXP)),
                (Var::Y, rng.random_range(0..=MAX_EXP)),
            ]);
            (m, rat(rng))
        }))
    };
    let f0 = component(rng);
    let f1 = component(rng);
    ExtElem::new(f0, f1)
}

/// A random kernel element of the subring: a combination of the monomials
/// `T^m * P^k * z^e` with `m ≠ 1`, and `m ≥ 2` whenever `k ≥ 1`.
pub fn subring_kernel_elem<R: Rng>(rng: &mut R, spec: &ExtRingSpec) -> ExtElem {
    let p = &Poly::var(Var::X) + &(&Poly::var(Var::T) * &Poly::var(Var::Y));
    let n = rng.random_range(0..=MAX_TERMS);
    let mut acc = ExtElem::zero();
    for _ in 0..n {
        let p_exp = rng.random_range(0..=MAX_EXP);
        let t_exp = if p_exp == 0 {
            // anything in the semigroup
            *[0u32, 2, 3, 4, 5]
                .get(rng.random_range(0..5))
                .expect("in range")
        } else {
            rng.random_range(2..=MAX_EXP + 1)
        };
        let part = (&Poly::var(Var::T).pow(t_exp) * &p.pow(p_exp)).scale(&rat(rng));
        let elem = if rng.random_range(0..=1) == 0 {
            ExtElem::from_poly(part)
        } else {
            ExtElem::from_poly(part).mul(&ExtElem::z(), spec)
        };
        acc = &acc + &elem;
    }
    acc
}
