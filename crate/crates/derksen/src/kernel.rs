//! Kernel analysis in rectified coordinates.
//!
//! The substitution `P = X + T*Y` straightens the derivation: membership in
//! the kernel of the extension-ring derivation becomes "no `Y` after the
//! rewrite", kernel elements of the subring are spanned by monomials
//! `T^m * P^k * z^e`, and the question whether a target kernel element is
//! generated by bounded-degree kernel elements modulo a power of `T` becomes
//! an exact linear system. The verdict ships with a witness that an
//! independent checker can replay: a solution vector for feasible systems, a
//! row combination exhibiting `0 = 1` for infeasible ones.

use crate::derivation::Derivation;
use crate::linalg::{solve_linear, Mat, SolveOutcome};
use crate::poly::{Monomial, Poly, Var};
use crate::rat::Rat;
use crate::rings::{ExtElem, ExtRingSpec, SubringSpec};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("element is not in the kernel")]
    NotInKernel,
    #[error("element is not in the subring")]
    NotInSubring,
}

/// An element written in the coordinates `(T, P, Y, z)` with `X = P - T*Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCoordElem {
    g0: Poly,
    g1: Poly,
}

impl PCoordElem {
    pub fn new(g0: Poly, g1: Poly) -> Self {
        PCoordElem { g0, g1 }
    }

    pub fn g0(&self) -> &Poly {
        &self.g0
    }

    pub fn g1(&self) -> &Poly {
        &self.g1
    }
}

impl fmt::Display for PCoordElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&ExtElem::new(self.g0.clone(), self.g1.clone()), f)
    }
}

/// The expansion of `P` in base coordinates: `X + T*Y`.
pub fn p_expanded() -> Poly {
    &Poly::var(Var::X) + &(&Poly::var(Var::T) * &Poly::var(Var::Y))
}

/// Exact rewrite via `X = P - T*Y`; inverse of [`from_p_coordinates`].
pub fn to_p_coordinates(x: &ExtElem) -> PCoordElem {
    let replacement = &Poly::var(Var::P) - &(&Poly::var(Var::T) * &Poly::var(Var::Y));
    PCoordElem {
        g0: x.f0().substitute(Var::X, &replacement),
        g1: x.f1().substitute(Var::X, &replacement),
    }
}

/// Exact rewrite via `P = X + T*Y`.
pub fn from_p_coordinates(x: &PCoordElem) -> ExtElem {
    let replacement = p_expanded();
    ExtElem::new(
        x.g0.substitute(Var::P, &replacement),
        x.g1.substitute(Var::P, &replacement),
    )
}

/// Kernel test through the coordinate change: an element is annihilated by
/// the straightened derivation exactly when its rectified form is free of
/// `Y`, i.e. lies in `Q[T, z, P]`.
pub fn kernel_membership_via_coordinates(x: &ExtElem) -> bool {
    let p = to_p_coordinates(x);
    !p.g0.involves(Var::Y) && !p.g1.involves(Var::Y)
}

/// A monomial `T^t * P^p * z^z` of the rectified kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct KernelMonomial {
    pub t_exp: u32,
    pub p_exp: u32,
    pub z_exp: u8,
}

impl KernelMonomial {
    pub fn new(t_exp: u32, p_exp: u32, z_exp: u8) -> Self {
        debug_assert!(z_exp <= 1);
        KernelMonomial {
            t_exp,
            p_exp,
            z_exp,
        }
    }

    /// Expansion into base coordinates.
    pub fn expand(&self) -> ExtElem {
        let poly = &Poly::var(Var::T).pow(self.t_exp) * &p_expanded().pow(self.p_exp);
        if self.z_exp == 0 {
            ExtElem::from_poly(poly)
        } else {
            ExtElem::new(Poly::zero(), poly)
        }
    }

    /// Recognizes an element that is exactly one rectified monomial with
    /// coefficient 1.
    pub fn from_element(x: &ExtElem) -> Option<KernelMonomial> {
        let p = to_p_coordinates(x);
        let (z_exp, poly, other) = if p.g1().is_zero() {
            (0u8, p.g0(), p.g1())
        } else {
            (1u8, p.g1(), p.g0())
        };
        if !other.is_zero() || poly.num_terms() != 1 {
            return None;
        }
        let (m, c) = poly.terms().next().expect("single term");
        if !c.is_one() || m.exponent(Var::X) != 0 || m.exponent(Var::Y) != 0 {
            return None;
        }
        Some(KernelMonomial::new(
            m.exponent(Var::T),
            m.exponent(Var::P),
            z_exp,
        ))
    }
}

// listing order: by P-exponent, then T-exponent, then z-exponent
impl Ord for KernelMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p_exp, self.t_exp, self.z_exp).cmp(&(other.p_exp, other.t_exp, other.z_exp))
    }
}

impl PartialOrd for KernelMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for KernelMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.t_exp {
            0 => {}
            1 => parts.push("T".into()),
            e => parts.push(format!("T^{e}")),
        }
        match self.p_exp {
            0 => {}
            1 => parts.push("P".into()),
            e => parts.push(format!("P^{e}")),
        }
        if self.z_exp == 1 {
            parts.push("z".into());
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// All kernel monomials of the subring within the given bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelBasis {
    pub xy_degree: u32,
    pub t_degree: u32,
    pub monomials: Vec<KernelMonomial>,
}

/// Enumerates `T^m * P^k * z^e` with `k ≤ d_xy`, `m ≤ d_t`, `e ∈ {0,1}`,
/// keeping the monomials whose expansion lies in the subring; every kept
/// monomial is double-checked against the derivation kernel.
pub fn kernel_basis(
    sub: &SubringSpec,
    deriv: &Derivation,
    spec: &ExtRingSpec,
    d_xy: u32,
    d_t: u32,
) -> KernelBasis {
    let mut monomials = Vec::new();
    for k in 0..=d_xy {
        for m in 0..=d_t {
            for e in 0..=1u8 {
                let cand = KernelMonomial::new(m, k, e);
                let expanded = cand.expand();
                if sub.contains(&expanded) && deriv.in_kernel(&expanded, spec) {
                    monomials.push(cand);
                }
            }
        }
    }
    monomials.sort();
    KernelBasis {
        xy_degree: d_xy,
        t_degree: d_t,
        monomials,
    }
}

/// Drops every term with `T`-exponent at least `n` from both components;
/// computing with exact arithmetic first and truncating after is the same as
/// working modulo `(T^n)`.
pub fn truncate_mod_t(x: &ExtElem, n: u32) -> ExtElem {
    assert!(n >= 1, "modulus exponent must be positive");
    let filter = |p: &Poly| {
        Poly::from_terms(
            p.terms()
                .filter(|(m, _)| m.exponent(Var::T) < n)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    };
    ExtElem::new(filter(x.f0()), filter(x.f1()))
}

/// The structural dichotomy for kernel elements of the subring: either the
/// element involves no `X`-like variable at all (its rectified form has
/// `P`-degree zero), or every term touching `X` or `Y` carries `T`-exponent
/// at least 2. Errors if the preconditions (kernel and subring membership)
/// fail.
pub fn claim_check(
    x: &ExtElem,
    sub: &SubringSpec,
    deriv: &Derivation,
    spec: &ExtRingSpec,
) -> Result<bool, KernelError> {
    if !deriv.in_kernel(x, spec) {
        return Err(KernelError::NotInKernel);
    }
    if !sub.contains(x) {
        return Err(KernelError::NotInSubring);
    }
    let p = to_p_coordinates(x);
    let in_tz = !p.g0().involves(Var::P) && !p.g1().involves(Var::P);
    if in_tz {
        return Ok(true);
    }
    let xy_terms_divisible = |poly: &Poly| {
        poly.terms().all(|(m, _)| {
            m.exponent(Var::X) == 0 && m.exponent(Var::Y) == 0 || m.exponent(Var::T) >= 2
        })
    };
    Ok(xy_terms_divisible(x.f0()) && xy_terms_divisible(x.f1()))
}

/// A coefficient basis element `T^s * z^e` for the linear system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CoeffBasisElem {
    pub t_exp: u32,
    pub z_exp: u8,
}

impl CoeffBasisElem {
    fn expand(&self) -> ExtElem {
        let poly = Poly::var(Var::T).pow(self.t_exp);
        if self.z_exp == 0 {
            ExtElem::from_poly(poly)
        } else {
            ExtElem::new(Poly::zero(), poly)
        }
    }
}

impl fmt::Display for CoeffBasisElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&KernelMonomial::new(self.t_exp, 0, self.z_exp), f)
    }
}

/// Row key of the constraint matrix: one base-coordinate monomial together
/// with a `z`-exponent. Ordered by descending canonical monomial order, then
/// by `z`-exponent, so certificates are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowKey {
    pub monomial: Monomial,
    pub z_exp: u8,
}

impl Ord for RowKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .monomial
            .cmp(&self.monomial)
            .then(self.z_exp.cmp(&other.z_exp))
    }
}

impl PartialOrd for RowKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.monomial.is_one(), self.z_exp) {
            (true, 0) => f.write_str("1"),
            (true, _) => f.write_str("z"),
            (false, 0) => write!(f, "{}", self.monomial),
            (false, _) => write!(f, "{}*z", self.monomial),
        }
    }
}

impl Serialize for RowKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Verdict of the obstruction system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Feasible { solution: Vec<Rat> },
    Infeasible { witness: Vec<Rat> },
}

/// The exact linear system asking whether `target ≡ f0 + Σ_i f_i*F_i`
/// modulo `(T^modulus)`, where the `F_i` are the kernel monomials with
/// `P`-exponent in `1..=d` and `T`-exponent below the modulus, and every
/// coefficient ranges over the subring span `{T^s * z^e}` truncated at the
/// modulus. Products `F_i*F_j` vanish modulo `T^4` because each factor has
/// `T`-valuation at least 2, which is why a single linear layer suffices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCertificate {
    pub d: u32,
    pub modulus: u32,
    pub target: KernelMonomial,
    pub generators: Vec<KernelMonomial>,
    pub coeff_basis: Vec<CoeffBasisElem>,
    pub rows: Vec<RowKey>,
    pub matrix: Mat,
    pub rhs: Vec<Rat>,
    pub verdict: Verdict,
    pub description: String,
}

impl ObstructionCertificate {
    pub fn is_infeasible(&self) -> bool {
        matches!(self.verdict, Verdict::Infeasible { .. })
    }

    /// Replays the verdict against the stored system without repeating the
    /// elimination: a solution must satisfy `A·x = b`, a witness must
    /// satisfy `yᵀA = 0` and `yᵀb ≠ 0`.
    pub fn validate(&self) -> bool {
        if self.matrix.rows() != self.rows.len()
            || self.rhs.len() != self.rows.len()
            || self.matrix.cols() != self.coeff_basis.len() * (1 + self.generators.len())
        {
            return false;
        }
        match &self.verdict {
            Verdict::Feasible { solution } => {
                solution.len() == self.matrix.cols() && self.matrix.mul_vec(solution) == self.rhs
            }
            Verdict::Infeasible { witness } => {
                if witness.len() != self.matrix.rows() {
                    return false;
                }
                let yt_a = self.matrix.left_mul_vec(witness);
                let yt_b = witness
                    .iter()
                    .zip(&self.rhs)
                    .fold(Rat::zero(), |acc, (y, b)| acc + &(y * b));
                yt_a.iter().all(Rat::is_zero) && !yt_b.is_zero()
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

impl Serialize for ObstructionCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ObstructionCertificate", 10)?;
        s.serialize_field("d", &self.d)?;
        s.serialize_field("modulus", &self.modulus)?;
        s.serialize_field("target", &self.target.to_string())?;
        s.serialize_field(
            "generators",
            &self
                .generators
                .iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>(),
        )?;
        s.serialize_field(
            "coefficient_basis",
            &self
                .coeff_basis
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>(),
        )?;
        s.serialize_field("rows", &self.rows)?;
        s.serialize_field("matrix", &self.matrix)?;
        s.serialize_field("rhs", &self.rhs)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("description", &self.description)?;
        s.end()
    }
}

/// The default obstruction target `T^2 * P^(d+1)`: a kernel element of the
/// subring whose `X,Y`-degree exceeds by one what degree-`d` generators can
/// reach modulo `T^modulus`.
pub fn default_obstruction_target(d: u32) -> KernelMonomial {
    KernelMonomial::new(2, d + 1, 0)
}

/// Builds and solves the obstruction system for the default target.
pub fn obstruction_certificate(
    sub: &SubringSpec,
    deriv: &Derivation,
    spec: &ExtRingSpec,
    d: u32,
    modulus: u32,
) -> ObstructionCertificate {
    obstruction_certificate_for_target(sub, deriv, spec, d, modulus, default_obstruction_target(d))
}

/// Same system with an arbitrary target monomial; used for positive controls
/// where the target is itself one of the generators.
pub fn obstruction_certificate_for_target(
    sub: &SubringSpec,
    deriv: &Derivation,
    spec: &ExtRingSpec,
    d: u32,
    modulus: u32,
    target: KernelMonomial,
) -> ObstructionCertificate {
    assert!(d >= 1, "generator degree bound must be positive");
    assert!(modulus >= 1, "modulus exponent must be positive");

    // kernel monomials with P-exponent 1..=d and T-exponent below the modulus
    let basis = kernel_basis(sub, deriv, spec, d, modulus.saturating_sub(1));
    let generators: Vec<KernelMonomial> = basis
        .monomials
        .into_iter()
        .filter(|m| m.p_exp >= 1)
        .collect();

    // coefficient span: T^s * z^e with s in the semigroup and s < modulus
    let coeff_basis: Vec<CoeffBasisElem> = (0..modulus)
        .filter(|&s| sub.allows(s))
        .flat_map(|s| [0u8, 1].map(|e| CoeffBasisElem { t_exp: s, z_exp: e }))
        .collect();

    // columns: the free coefficient block, then one block per generator
    let mut columns: Vec<ExtElem> = Vec::new();
    for c in &coeff_basis {
        columns.push(truncate_mod_t(&c.expand(), modulus));
    }
    for g in &generators {
        let expanded = g.expand();
        for c in &coeff_basis {
            columns.push(truncate_mod_t(&c.expand().mul(&expanded, spec), modulus));
        }
    }
    let rhs_elem = truncate_mod_t(&target.expand(), modulus);

    // row keys: every monomial appearing in any column or in the target
    let mut keys: BTreeSet<RowKey> = BTreeSet::new();
    let mut collect = |e: &ExtElem| {
        for (m, _) in e.f0().terms() {
            keys.insert(RowKey {
                monomial: m.clone(),
                z_exp: 0,
            });
        }
        for (m, _) in e.f1().terms() {
            keys.insert(RowKey {
                monomial: m.clone(),
                z_exp: 1,
            });
        }
    };
    for col in &columns {
        collect(col);
    }
    collect(&rhs_elem);
    let rows: Vec<RowKey> = keys.into_iter().collect();

    let coordinate = |e: &ExtElem, key: &RowKey| -> Rat {
        if key.z_exp == 0 {
            e.f0().coefficient(&key.monomial)
        } else {
            e.f1().coefficient(&key.monomial)
        }
    };
    let mut matrix = Mat::zeros(rows.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, key) in rows.iter().enumerate() {
            let c = coordinate(col, key);
            if !c.is_zero() {
                matrix.set(i, j, c);
            }
        }
    }
    let rhs: Vec<Rat> = rows.iter().map(|key| coordinate(&rhs_elem, key)).collect();

    let verdict = match solve_linear(&matrix, &rhs).expect("dimensions agree by construction") {
        SolveOutcome::Solution(solution) => Verdict::Feasible { solution },
        SolveOutcome::Infeasible { witness } => Verdict::Infeasible { witness },
    };

    let description = format!(
        "Asks whether {target} is congruent to f0 + sum_i f_i*F_i modulo (T^{modulus}), \
         where the F_i are the kernel monomials T^m*P^k*z^e of the subring with 1 <= k <= {d} \
         and m < {modulus}, and each coefficient ranges over the span of {{T^s*z^e : s in the \
         exponent semigroup, s < {modulus}}}. Products of two elements of T-valuation >= 2 \
         have T-valuation >= 4, so modulo (T^4) any representation of the target over a \
         finite generating set whose members have T-valuation >= 2 and X,Y-degree <= {d} \
         reduces exactly to this linear form; an infeasibility witness y with y'A = 0 and \
         y'b != 0 certifies that no such representation exists. The low-valuation constraint \
         rows that carry the X,Y-degree comparison are unreachable by higher products at any \
         modulus."
    );

    ObstructionCertificate {
        d,
        modulus,
        target,
        generators,
        coeff_basis,
        rows,
        matrix,
        rhs,
        verdict,
        description,
    }
}
