//! Derivations of the extension ring, given by images of the generators.
//!
//! A derivation is determined by where it sends the base variables and `z`;
//! it extends to the whole ring by linearity and the Leibniz rule. Because
//! the ring is a quotient, an arbitrary assignment need not be well defined:
//! the relation `z^2 = q` forces `2*z*D(z) = D(q)`, which
//! [`Derivation::is_well_defined`] checks as an exact identity.
//!
//! Local nilpotency is only semi-decidable by iteration, so
//! [`Derivation::nilpotency_index`] and [`Derivation::is_lnd`] run under an
//! explicit budget and report `Exceeded` honestly instead of claiming
//! non-nilpotency.

use crate::poly::Var;
use crate::rat::Rat;
use crate::rings::{ExtElem, ExtRingSpec, SubringSpec};
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("no image provided for base variable `{0}`")]
    MissingImage(Var),
    #[error("image provided for `{0}`, which is not a base variable")]
    UnknownVariable(Var),
    #[error("generator `{0}` does not lie in the subring")]
    GeneratorOutsideSubring(String),
    #[error("element did not reach zero within {max_iter} applications")]
    BudgetExceeded { max_iter: usize },
}

/// A derivation of the extension ring, stored as generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    images: BTreeMap<Var, ExtElem>,
    z_image: ExtElem,
}

impl Derivation {
    /// Requires exactly one image per base variable of `spec`.
    pub fn new(
        spec: &ExtRingSpec,
        images: impl IntoIterator<Item = (Var, ExtElem)>,
        z_image: ExtElem,
    ) -> Result<Self, DerivationError> {
        let images: BTreeMap<Var, ExtElem> = images.into_iter().collect();
        for v in images.keys() {
            if !spec.base_vars().contains(v) {
                return Err(DerivationError::UnknownVariable(*v));
            }
        }
        for v in spec.base_vars() {
            if !images.contains_key(v) {
                return Err(DerivationError::MissingImage(*v));
            }
        }
        Ok(Derivation { images, z_image })
    }

    pub fn zero(spec: &ExtRingSpec) -> Self {
        Derivation {
            images: spec
                .base_vars()
                .iter()
                .map(|&v| (v, ExtElem::zero()))
                .collect(),
            z_image: ExtElem::zero(),
        }
    }

    pub fn image(&self, v: Var) -> &ExtElem {
        self.images.get(&v).expect("image for every base variable")
    }

    pub fn z_image(&self) -> &ExtElem {
        &self.z_image
    }

    pub fn negated(&self) -> Derivation {
        Derivation {
            images: self.images.iter().map(|(&v, e)| (v, -e)).collect(),
            z_image: -&self.z_image,
        }
    }

    /// The derivation `f*D`, acting as `x ↦ f*D(x)`.
    pub fn scaled(&self, f: &ExtElem, spec: &ExtRingSpec) -> Derivation {
        Derivation {
            images: self
                .images
                .iter()
                .map(|(&v, e)| (v, f.mul(e, spec)))
                .collect(),
            z_image: f.mul(&self.z_image, spec),
        }
    }

    /// Applies the derivation by linearity and Leibniz:
    /// `D(f0 + f1 z) = Σ_v D(v) ∂_v(f0) + (Σ_v D(v) ∂_v(f1)) z + f1 D(z)`.
    ///
    /// The components of `x` must be polynomials in the base variables of
    /// `spec`; rectified coordinates have to be expanded first.
    pub fn apply(&self, x: &ExtElem, spec: &ExtRingSpec) -> ExtElem {
        debug_assert!(
            Var::ALL.iter().all(|&v| {
                spec.base_vars().contains(&v) || (!x.f0().involves(v) && !x.f1().involves(v))
            }),
            "element mentions a variable without an image"
        );
        let mut d0 = ExtElem::zero();
        let mut d1 = ExtElem::zero();
        for (&v, img) in &self.images {
            d0 = &d0 + &img.mul_poly(&x.f0().partial_derivative(v));
            d1 = &d1 + &img.mul_poly(&x.f1().partial_derivative(v));
        }
        let z_part = d1.mul(&ExtElem::z(), spec);
        let from_z = self.z_image.mul_poly(x.f1());
        &(&d0 + &z_part) + &from_z
    }

    /// The assignment descends to the quotient iff `2*z*D(z) = D(q)`.
    pub fn is_well_defined(&self, spec: &ExtRingSpec) -> bool {
        let mut dq = ExtElem::zero();
        for (&v, img) in &self.images {
            dq = &dq + &img.mul_poly(&spec.q().partial_derivative(v));
        }
        let lhs = ExtElem::z()
            .mul(&self.z_image, spec)
            .scale(&Rat::from_int(2));
        lhs == dq
    }

    /// True when every generator image stays in the subring. By linearity
    /// and Leibniz this extends to the whole subring, so checking the
    /// generators suffices. Errors if a supposed generator is not itself a
    /// subring member.
    pub fn preserves_subring(
        &self,
        sub: &SubringSpec,
        generators: &[ExtElem],
        spec: &ExtRingSpec,
    ) -> Result<bool, DerivationError> {
        for g in generators {
            if !sub.contains(g) {
                return Err(DerivationError::GeneratorOutsideSubring(g.to_string()));
            }
        }
        Ok(generators
            .iter()
            .all(|g| sub.contains(&self.apply(g, spec))))
    }

    pub fn in_kernel(&self, x: &ExtElem, spec: &ExtRingSpec) -> bool {
        self.apply(x, spec).is_zero()
    }

    /// Iterates the derivation on `x` until zero or until `max_iter`
    /// applications have been spent. The returned chain starts at `x` itself
    /// and, when the index is reached, ends at the zero element.
    pub fn nilpotency_index(
        &self,
        x: &ExtElem,
        spec: &ExtRingSpec,
        max_iter: usize,
    ) -> NilpotencyReport {
        assert!(max_iter >= 1, "iteration budget must be positive");
        let mut iterates = vec![x.clone()];
        if x.is_zero() {
            return NilpotencyReport {
                element: x.clone(),
                index: NilpotencyIndex::Reached(0),
                iterates,
            };
        }
        for n in 1..=max_iter {
            let next = self.apply(iterates.last().expect("nonempty"), spec);
            let zero = next.is_zero();
            iterates.push(next);
            if zero {
                return NilpotencyReport {
                    element: x.clone(),
                    index: NilpotencyIndex::Reached(n),
                    iterates,
                };
            }
        }
        NilpotencyReport {
            element: x.clone(),
            index: NilpotencyIndex::Exceeded,
            iterates,
        }
    }

    /// Budgeted local-nilpotency check over a generating set. A `false`
    /// answer means "not proven locally nilpotent within the budget"; the
    /// offending generators carry `Exceeded` indices in the report.
    pub fn is_lnd(&self, generators: &[ExtElem], spec: &ExtRingSpec, max_iter: usize) -> LndReport {
        let reports: Vec<NilpotencyReport> = generators
            .iter()
            .map(|g| self.nilpotency_index(g, spec, max_iter))
            .collect();
        LndReport {
            locally_nilpotent: reports
                .iter()
                .all(|r| matches!(r.index, NilpotencyIndex::Reached(_))),
            reports,
        }
    }

    /// The exponential `Σ_n D^n(x)/n!`, a finite sum when the chain of
    /// iterates terminates. Division by `n!` is what forces rational rather
    /// than integer coefficients.
    pub fn exp(
        &self,
        x: &ExtElem,
        spec: &ExtRingSpec,
        max_iter: usize,
    ) -> Result<ExtElem, DerivationError> {
        let mut acc = ExtElem::zero();
        let mut iterate = x.clone();
        let mut factorial = Rat::one();
        for n in 0..=max_iter {
            if n > 0 {
                factorial *= &Rat::from_int(n as i64);
                iterate = self.apply(&iterate, spec);
            }
            if iterate.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &iterate.scale(&factorial.recip());
        }
        Err(DerivationError::BudgetExceeded { max_iter })
    }
}

/// Witness index for a single element: either the least `n` with
/// `D^n(x) = 0`, or `Exceeded` when the budget ran out first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilpotencyIndex {
    Reached(usize),
    Exceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyReport {
    pub element: ExtElem,
    pub index: NilpotencyIndex,
    pub iterates: Vec<ExtElem>,
}

impl NilpotencyReport {
    /// Record form `{element, index | "exceeded", chain: [...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let index = match self.index {
            NilpotencyIndex::Reached(n) => json!(n),
            NilpotencyIndex::Exceeded => json!("exceeded"),
        };
        json!({
            "element": self.element.to_string(),
            "index": index,
            "chain": self.iterates.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LndReport {
    pub locally_nilpotent: bool,
    pub reports: Vec<NilpotencyReport>,
}

impl LndReport {
    /// Per-generator indices, when every chain terminated.
    pub fn indices(&self) -> Option<Vec<usize>> {
        self.reports
            .iter()
            .map(|r| match r.index {
                NilpotencyIndex::Reached(n) => Some(n),
                NilpotencyIndex::Exceeded => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::rings::NumericalSemigroup;

    fn t() -> Poly {
        Poly::var(Var::T)
    }
    fn x() -> Poly {
        Poly::var(Var::X)
    }
    fn y() -> Poly {
        Poly::var(Var::Y)
    }
    fn p() -> Poly {
        &x() + &(&t() * &y())
    }

    fn standard_spec() -> ExtRingSpec {
        let q = &(&t().pow(8) * &p().pow(2)) + &Poly::one();
        ExtRingSpec::new(vec![Var::T, Var::X, Var::Y], q).unwrap()
    }

    fn standard_derivation(spec: &ExtRingSpec) -> Derivation {
        Derivation::new(
            spec,
            [
                (Var::T, ExtElem::zero()),
                (Var::X, ExtElem::from_poly(t().pow(3))),
                (Var::Y, ExtElem::from_poly(-&t().pow(2))),
            ],
            ExtElem::zero(),
        )
        .unwrap()
    }

    fn standard_sub() -> SubringSpec {
        SubringSpec::new(Var::T, NumericalSemigroup::new(&[2, 3]).unwrap())
    }

    fn generators() -> Vec<ExtElem> {
        vec![
            ExtElem::from_poly(t().pow(2)),
            ExtElem::from_poly(t().pow(3)),
            ExtElem::from_poly(x()),
            ExtElem::from_poly(y()),
            ExtElem::z(),
        ]
    }

    #[test]
    fn rectified_coordinate_is_killed() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        assert!(d.apply(&ExtElem::from_poly(p()), &spec).is_zero());
    }

    #[test]
    fn image_of_x() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        assert_eq!(
            d.apply(&ExtElem::from_poly(x()), &spec),
            ExtElem::from_poly(t().pow(3))
        );
    }

    #[test]
    fn leibniz_on_a_product() {
        // D(X*Y) = T^3*Y - T^2*X by expanding the product rule
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        let expected = ExtElem::from_poly(&(&t().pow(3) * &y()) - &(&t().pow(2) * &x()));
        assert_eq!(d.apply(&ExtElem::from_poly(&x() * &y()), &spec), expected);
    }

    #[test]
    fn well_definedness() {
        let spec = standard_spec();
        assert!(standard_derivation(&spec).is_well_defined(&spec));

        // X ↦ 1 does not kill q, so it cannot descend
        let bad = Derivation::new(
            &spec,
            [
                (Var::T, ExtElem::zero()),
                (Var::X, ExtElem::one()),
                (Var::Y, ExtElem::zero()),
            ],
            ExtElem::zero(),
        )
        .unwrap();
        assert!(!bad.is_well_defined(&spec));

        // with q = 1, well-definedness reduces to D(z) = 0
        let trivial = ExtRingSpec::new(vec![Var::T, Var::X, Var::Y], Poly::one()).unwrap();
        let dz0 = Derivation::new(
            &trivial,
            [
                (Var::T, ExtElem::one()),
                (Var::X, ExtElem::z()),
                (Var::Y, ExtElem::zero()),
            ],
            ExtElem::zero(),
        )
        .unwrap();
        assert!(dz0.is_well_defined(&trivial));
        let dz1 = Derivation::new(
            &trivial,
            [
                (Var::T, ExtElem::zero()),
                (Var::X, ExtElem::zero()),
                (Var::Y, ExtElem::zero()),
            ],
            ExtElem::one(),
        )
        .unwrap();
        assert!(!dz1.is_well_defined(&trivial));
    }

    #[test]
    fn subring_preservation() {
        let spec = standard_spec();
        let sub = standard_sub();
        let d = standard_derivation(&spec);
        assert_eq!(d.preserves_subring(&sub, &generators(), &spec), Ok(true));

        let gap = Derivation::new(
            &spec,
            [
                (Var::T, ExtElem::zero()),
                (Var::X, ExtElem::from_poly(t())),
                (Var::Y, ExtElem::zero()),
            ],
            ExtElem::zero(),
        )
        .unwrap();
        assert_eq!(gap.preserves_subring(&sub, &generators(), &spec), Ok(false));

        assert_eq!(
            Derivation::zero(&spec).preserves_subring(&sub, &generators(), &spec),
            Ok(true)
        );

        let bad_gen = vec![ExtElem::from_poly(t())];
        assert!(matches!(
            d.preserves_subring(&sub, &bad_gen, &spec),
            Err(DerivationError::GeneratorOutsideSubring(_))
        ));
    }

    #[test]
    fn nilpotency_chains() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);

        let rep = d.nilpotency_index(&ExtElem::from_poly(x()), &spec, 10);
        assert_eq!(rep.index, NilpotencyIndex::Reached(2));
        assert_eq!(
            rep.iterates,
            vec![
                ExtElem::from_poly(x()),
                ExtElem::from_poly(t().pow(3)),
                ExtElem::zero()
            ]
        );

        let rep = d.nilpotency_index(&ExtElem::z(), &spec, 10);
        assert_eq!(rep.index, NilpotencyIndex::Reached(1));

        // X*D is not locally nilpotent: iterates on Y are -T^(2+3n)*X forever
        let scaled = d.scaled(&ExtElem::from_poly(x()), &spec);
        let rep = scaled.nilpotency_index(&ExtElem::from_poly(y()), &spec, 10);
        assert_eq!(rep.index, NilpotencyIndex::Exceeded);
        for (n, it) in rep.iterates.iter().skip(1).enumerate() {
            let expected = ExtElem::from_poly(-&(&t().pow(2 + 3 * n as u32) * &x()));
            assert_eq!(it, &expected);
        }
    }

    #[test]
    fn lnd_table() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        let report = d.is_lnd(&generators(), &spec, 10);
        assert!(report.locally_nilpotent);
        assert_eq!(report.indices(), Some(vec![1, 1, 2, 2, 1]));

        let scaled = d.scaled(&ExtElem::from_poly(x()), &spec);
        let report = scaled.is_lnd(&generators(), &spec, 10);
        assert!(!report.locally_nilpotent);
        assert_eq!(report.indices(), None);

        let zero = Derivation::zero(&spec);
        let report = zero.is_lnd(&generators(), &spec, 10);
        assert!(report.locally_nilpotent);
        assert_eq!(report.indices(), Some(vec![1, 1, 1, 1, 1]));
    }

    #[test]
    fn kernel_membership() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        assert!(d.in_kernel(&ExtElem::from_poly(&t().pow(2) * &p()), &spec));
        assert!(!d.in_kernel(&ExtElem::from_poly(x()), &spec));
        // products and sums of kernel elements stay in the kernel
        let e = &ExtElem::z().mul(&ExtElem::from_poly(p().pow(3)), &spec)
            + &ExtElem::from_poly(t().pow(7));
        assert!(d.in_kernel(&e, &spec));
    }

    #[test]
    fn exponential_images() {
        let spec = standard_spec();
        let d = standard_derivation(&spec);
        assert_eq!(
            d.exp(&ExtElem::from_poly(x()), &spec, 16).unwrap(),
            ExtElem::from_poly(&x() + &t().pow(3))
        );
        assert_eq!(
            d.exp(&ExtElem::from_poly(y()), &spec, 16).unwrap(),
            ExtElem::from_poly(&y() - &t().pow(2))
        );
        // kernel elements are fixed
        assert_eq!(
            d.exp(&ExtElem::from_poly(p()), &spec, 16).unwrap(),
            ExtElem::from_poly(p())
        );
        // budget failure is an error, not a wrong answer
        let scaled = d.scaled(&ExtElem::from_poly(x()), &spec);
        assert_eq!(
            scaled.exp(&ExtElem::from_poly(y()), &spec, 8),
            Err(DerivationError::BudgetExceeded { max_iter: 8 })
        );
    }

    #[test]
    fn constructor_validation() {
        let spec = standard_spec();
        assert_eq!(
            Derivation::new(
                &spec,
                [(Var::T, ExtElem::zero()), (Var::X, ExtElem::zero())],
                ExtElem::zero()
            ),
            Err(DerivationError::MissingImage(Var::Y))
        );
        assert_eq!(
            Derivation::new(
                &spec,
                [
                    (Var::T, ExtElem::zero()),
                    (Var::X, ExtElem::zero()),
                    (Var::Y, ExtElem::zero()),
                    (Var::P, ExtElem::zero()),
                ],
                ExtElem::zero()
            ),
            Err(DerivationError::UnknownVariable(Var::P))
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_rat() -> impl Strategy<Value = Rat> {
            (-10i64..=10, 1i64..=10).prop_map(|(n, d)| Rat::new(n, d))
        }

        fn arb_poly() -> impl Strategy<Value = Poly> {
            proptest::collection::vec(((0u32..=3, 0u32..=2, 0u32..=2), arb_rat()), 0..=4).prop_map(
                |terms| {
                    Poly::from_terms(terms.into_iter().map(|((a, b, c), r)| {
                        (
                            crate::poly::Monomial::from_exponents([
                                (Var::T, a),
                                (Var::X, b),
                                (Var::Y, c),
                            ]),
                            r,
                        )
                    }))
                },
            )
        }

        fn arb_ext() -> impl Strategy<Value = ExtElem> {
            (arb_poly(), arb_poly()).prop_map(|(f0, f1)| ExtElem::new(f0, f1))
        }

        /// random element of the kernel: a combination of T^a * P^b * z^e
        fn arb_kernel_elem() -> impl Strategy<Value = ExtElem> {
            proptest::collection::vec(((0u32..=3, 0u32..=2, 0u8..=1), arb_rat()), 0..=4).prop_map(
                |parts| {
                    let spec = standard_spec();
                    let mut acc = ExtElem::zero();
                    for ((a, b, e), c) in parts {
                        let poly = (&t().pow(a) * &p().pow(b)).scale(&c);
                        let elem = if e == 0 {
                            ExtElem::from_poly(poly)
                        } else {
                            ExtElem::from_poly(poly).mul(&ExtElem::z(), &spec)
                        };
                        acc = &acc + &elem;
                    }
                    acc
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn leibniz_rule(a in arb_ext(), b in arb_ext()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                let lhs = d.apply(&a.mul(&b, &spec), &spec);
                let rhs = &a.mul(&d.apply(&b, &spec), &spec) + &b.mul(&d.apply(&a, &spec), &spec);
                prop_assert_eq!(lhs, rhs);
            }
        }

        proptest! {
            #[test]
            fn linearity(a in arb_ext(), b in arb_ext(), c in arb_rat(), k in arb_rat()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                let combo = &a.scale(&c) + &b.scale(&k);
                let lhs = d.apply(&combo, &spec);
                let rhs = &d.apply(&a, &spec).scale(&c) + &d.apply(&b, &spec).scale(&k);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn kernel_is_a_subalgebra(a in arb_kernel_elem(), b in arb_kernel_elem()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                prop_assert!(d.in_kernel(&a, &spec));
                prop_assert!(d.in_kernel(&b, &spec));
                prop_assert!(d.in_kernel(&(&a + &b), &spec));
                prop_assert!(d.in_kernel(&a.mul(&b, &spec), &spec));
            }

            #[test]
            fn kernel_times_non_kernel_stays_out(a in arb_kernel_elem(), b in arb_ext()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                prop_assume!(!a.is_zero());
                prop_assume!(!d.in_kernel(&b, &spec));
                let product_image = d.apply(&a.mul(&b, &spec), &spec);
                prop_assert_eq!(&product_image, &a.mul(&d.apply(&b, &spec), &spec));
                prop_assert!(!product_image.is_zero());
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn exp_is_multiplicative(a in arb_ext(), b in arb_ext()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                let lhs = d.exp(&a.mul(&b, &spec), &spec, 32).unwrap();
                let rhs = d
                    .exp(&a, &spec, 32)
                    .unwrap()
                    .mul(&d.exp(&b, &spec, 32).unwrap(), &spec);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn exp_of_negation_is_inverse(a in arb_ext()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                let there = d.exp(&a, &spec, 32).unwrap();
                let back = d.negated().exp(&there, &spec, 32).unwrap();
                prop_assert_eq!(back, a);
            }

            #[test]
            fn kernel_scaled_derivation_is_lnd(f in arb_kernel_elem()) {
                let spec = standard_spec();
                let d = standard_derivation(&spec);
                let report = d.scaled(&f, &spec).is_lnd(&generators(), &spec, 10);
                prop_assert!(report.locally_nilpotent);
            }
        }
    }
}
