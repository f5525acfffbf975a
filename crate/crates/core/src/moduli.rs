//! Moduli-space and Fourier-Mukai partner criteria phrased on lattices.
//!
//! Ampleness is not decidable from a Gram matrix, so every routine that needs
//! an ample class works with an [`AmpleChamber`]: a user-declared chamber cut
//! out by a root set and a reference class.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{extended_gcd_list, is_squarefree, require_odd_prime};
use crate::error::{Error, Result};
use crate::lattice::{DiscriminantGroup, Lattice, Sublattice};
use crate::matrix::IntMatrix;
use crate::mukai::{MukaiLattice, MukaiVector};
use crate::transforms::{line_bundle_twist, shift, swap_outer, RootSet, Transform};

/// `M_h(v)` is nonempty when `v` is primitive and isotropic.
pub fn moduli_nonempty(l: &MukaiLattice, v: &MukaiVector) -> Result<bool> {
    Ok(v.is_primitive() && l.norm(v)?.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineModuli {
    pub fine: bool,
    /// A vector `w` with `<v, w> = 1`, when one exists.
    pub witness: Option<MukaiVector>,
}

/// Decides whether `<v, -> : Z + NS + Z -> Z` is surjective and, if so, returns a
/// preimage of 1 built from the extended gcd of `<v, e_i>` over the standard basis.
pub fn fine_moduli(l: &MukaiLattice, v: &MukaiVector) -> Result<FineModuli> {
    l.check(v)?;
    let pairings = l.gram().mul_vec(&v.to_coords())?;
    let (g, coeffs) = extended_gcd_list(&pairings);
    if !g.is_one() {
        return Ok(FineModuli { fine: false, witness: None });
    }
    let w = MukaiVector::from_coords(&coeffs)?;
    debug_assert!(l.pairing(v, &w)?.is_one());
    Ok(FineModuli { fine: true, witness: Some(w) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankChange {
    pub word: Transform,
    pub vector: MukaiVector,
    /// Number of twist exponents `n` examined (0 when no twist search was needed).
    pub candidates_tried: usize,
    /// Class `L` whose powers were tried, when a search happened.
    pub twist_class: Option<Vec<BigInt>>,
}

/// Moves `v` by twists, the outer swap and the shift until its rank is positive
/// and prime to `p`.
///
/// When `p` divides both `r` and `s`, `v` must pair to 1 with some Mukai vector
/// and twists by `n L` for `n = 0..p-1` are tried until `s + n (l.L) + r n^2 L^2/2` is nonzero mod `p`. The supplied
/// `ample` class is used when `l.L` is prime to `p`; otherwise the middle part
/// of the fine-moduli witness is used, which always pairs to 1 mod `p` with `l`.
pub fn change_rank(l: &MukaiLattice, v: &MukaiVector, p: &BigInt, ample: &[BigInt]) -> Result<RankChange> {
    require_odd_prime(p)?;
    l.check(v)?;
    let divides = |x: &BigInt| (x % p).is_zero();
    let mut word = Transform::identity(l);
    let mut cur = v.clone();
    let mut candidates_tried = 0;
    let mut twist_class = None;

    if divides(&cur.r) {
        if divides(&cur.s) {
            let Some(witness) = fine_moduli(l, v)?.witness else {
                return Err(Error::Precondition("no Mukai vector pairs to 1 with v".into()));
            };
            let ns = l.ns();
            let class = if !divides(&ns.pair(&cur.c1, ample)?) { ample.to_vec() } else { witness.c1.clone() };
            let lc = ns.pair(&cur.c1, &class)?;
            let half_sq = ns.norm(&class)? / 2;
            let mut found = None;
            let mut n = BigInt::zero();
            while &n < p {
                candidates_tried += 1;
                let s_n = &cur.s + &n * &lc + &cur.r * &n * &n * &half_sq;
                if !divides(&s_n) {
                    found = Some(n.clone());
                    break;
                }
                n += 1;
            }
            let Some(n) = found else {
                return Err(Error::Assertion(format!(
                    "no twist exponent in [0, {p}) made the last component prime to p"
                )));
            };
            let c: Vec<BigInt> = class.iter().map(|x| x * &n).collect();
            let t = line_bundle_twist(l, &c)?;
            cur = t.apply(&cur)?;
            word = t.compose(&word)?;
            twist_class = Some(class);
        }
        let sw = swap_outer(l);
        cur = sw.apply(&cur)?;
        word = sw.compose(&word)?;
    }
    if cur.r.is_negative() {
        let sh = shift(l);
        cur = sh.apply(&cur)?;
        word = sh.compose(&word)?;
    }
    debug_assert!(cur.r.is_positive() && !divides(&cur.r));
    Ok(RankChange { word, vector: cur, candidates_tried, twist_class })
}

/// A chamber standing in for the ample cone: positive square, nonnegative on
/// every root, positive against the reference class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmpleChamber {
    pub roots: RootSet,
    pub reference: Vec<BigInt>,
}

impl AmpleChamber {
    pub fn new(ns: &Lattice, roots: RootSet, reference: Vec<BigInt>) -> Result<Self> {
        if !ns.norm(&reference)?.is_positive() {
            return Err(Error::Precondition("reference class must have positive square".into()));
        }
        Ok(AmpleChamber { roots, reference })
    }

    pub fn contains(&self, ns: &Lattice, x: &[BigInt]) -> Result<bool> {
        if !ns.norm(x)?.is_positive() || !ns.pair(x, &self.reference)?.is_positive() {
            return Ok(false);
        }
        for r in self.roots.roots() {
            if ns.pair(x, r)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovedVector {
    pub word: Transform,
    pub vector: MukaiVector,
    /// Coefficients of the twist class on the candidate list.
    pub coefficients: Vec<BigInt>,
}

/// Twists `v = (r, l, s)` by a class `L` in the span of `candidates` so that the new
/// middle component `l + r L` is in the chamber and outside `pN + Γ`.
///
/// Coefficient vectors in `[-radius, radius]^k` are tried in order of increasing
/// L1 norm, then lexicographically.
pub fn improve_vector(
    l: &MukaiLattice,
    v: &MukaiVector,
    gamma: &Sublattice,
    candidates: &[Vec<BigInt>],
    chamber: &AmpleChamber,
    p: &BigInt,
    radius: u32,
) -> Result<ImprovedVector> {
    let ns = l.ns();
    l.check(v)?;
    if gamma.ambient() != ns {
        return Err(Error::Precondition("Γ must be a sublattice of NS".into()));
    }
    if gamma.rank() >= ns.rank() {
        return Err(Error::Precondition("Γ must have non-maximal rank".into()));
    }
    if candidates.is_empty() {
        return Err(Error::Precondition("at least one candidate ample class is required".into()));
    }
    for c in candidates {
        if c.len() != ns.rank() {
            return Err(Error::DimensionMismatch { expected: ns.rank(), got: c.len() });
        }
    }
    require_odd_prime(p)?;

    let k = candidates.len();
    let r = radius as i64;
    let mut coeff_vectors: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![-r; k];
    loop {
        coeff_vectors.push(cur.clone());
        let mut i = k;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if cur[i] < r {
                cur[i] += 1;
                break true;
            }
            cur[i] = -r;
        };
        if !advanced {
            break;
        }
    }
    coeff_vectors.sort_by_key(|c| (c.iter().map(|x| x.abs()).sum::<i64>(), c.clone()));

    for coeffs in coeff_vectors {
        let mut class = vec![BigInt::zero(); ns.rank()];
        for (c, cand) in coeffs.iter().zip(candidates) {
            for (x, y) in class.iter_mut().zip(cand) {
                *x += BigInt::from(*c) * y;
            }
        }
        let middle: Vec<BigInt> = v.c1.iter().zip(&class).map(|(a, b)| a + &v.r * b).collect();
        if !chamber.contains(ns, &middle)? {
            continue;
        }
        if gamma.coset_witness(&middle, p)?.is_some() {
            continue;
        }
        let word = if class.iter().all(Zero::is_zero) { Transform::identity(l) } else { line_bundle_twist(l, &class)? };
        let vector = word.apply(v)?;
        return Ok(ImprovedVector { word, vector, coefficients: coeffs.into_iter().map(BigInt::from).collect() });
    }
    Err(Error::SearchExhausted(format!(
        "no twist with coefficients in [-{radius}, {radius}] puts the class in the chamber outside pN + Γ"
    )))
}

/// Default search radius `2p`.
pub fn default_improve_radius(p: &BigInt) -> u32 {
    u32::try_from(p * 2u32).unwrap_or(u32::MAX)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturatedSpan {
    /// Saturation of `F + Z l` in `N`.
    pub e: Sublattice,
    pub determinant: BigInt,
    pub disc: DiscriminantGroup,
}

impl SaturatedSpan {
    /// `|E^vee / E|` is 1 or `p`.
    pub fn disc_is_trivial_or_p(&self, p: &BigInt) -> bool {
        let order = self.disc.order();
        order.is_one() || &order == p
    }

    /// Order of the `p`-primary part of `E^vee / E`.
    pub fn p_primary_order(&self, p: &BigInt) -> BigInt {
        let mut order = BigInt::one();
        for d in &self.disc.invariant_factors {
            let mut d = d.clone();
            while (&d % p).is_zero() {
                d /= p;
                order *= p;
            }
        }
        order
    }

    pub fn squarefree_discriminant(&self) -> bool {
        is_squarefree(&self.determinant)
    }
}

/// Checks the hypotheses on `(N, F, l)`:
/// `F` of rank 2 and primitive, the form on `F` invertible mod `p`, `l` outside `pN + F`.
pub fn check_span_preconditions(n: &Lattice, f: &Sublattice, l: &[BigInt], p: &BigInt) -> Result<()> {
    require_odd_prime(p)?;
    if f.ambient() != n {
        return Err(Error::Precondition("F must be a sublattice of N".into()));
    }
    if f.rank() != 2 {
        return Err(Error::Precondition(format!("F must have rank 2, got {}", f.rank())));
    }
    if !f.is_primitive() {
        return Err(Error::Precondition("N/F has torsion (F is not saturated)".into()));
    }
    let det_f = f.gram().determinant()?;
    if (&det_f % p).is_zero() {
        return Err(Error::Precondition(format!(
            "F/pF -> (F/pF)^vee is not an isomorphism: det(F) = {det_f} is divisible by {p}"
        )));
    }
    if f.coset_witness(l, p)?.is_some() {
        return Err(Error::Precondition("l lies in pN + F".into()));
    }
    Ok(())
}

/// Saturation `E` of `F + Z l` with its discriminant data, without asserting anything about it.
pub fn saturated_span(n: &Lattice, f: &Sublattice, l: &[BigInt], p: &BigInt) -> Result<SaturatedSpan> {
    check_span_preconditions(n, f, l, p)?;
    let gens = f.basis().stack(&IntMatrix::from_rows_with_cols(vec![l.to_vec()], n.rank())?)?;
    let e = Sublattice::span(n.clone(), &gens)?.saturate();
    if e.rank() != 3 {
        return Err(Error::Assertion(format!("saturation of F + Zl has rank {}, expected 3", e.rank())));
    }
    let determinant = e.gram().determinant()?;
    if determinant.is_zero() {
        return Err(Error::Assertion("form restricted to E is degenerate".into()));
    }
    let disc = e.lattice()?.discriminant_group();
    Ok(SaturatedSpan { e, determinant, disc })
}

/// The supersingular lattice step: `E = sat(F + Z l)` must have rank 3,
/// `|E^vee/E|` in `{1, p}` and squarefree discriminant; anything else is an assertion failure.
pub fn section7_pipeline(n: &Lattice, f: &Sublattice, l: &[BigInt], p: &BigInt) -> Result<SaturatedSpan> {
    let span = saturated_span(n, f, l, p)?;
    if !span.disc_is_trivial_or_p(p) {
        return Err(Error::Assertion(format!(
            "|E^vee/E| = {} (invariant factors {:?}) is neither 1 nor {p}",
            span.disc.order(),
            span.disc.invariant_factors.iter().map(ToString::to_string).collect::<Vec<_>>()
        )));
    }
    if !span.squarefree_discriminant() {
        return Err(Error::Assertion(format!("det(E) = {} is not squarefree", span.determinant)));
    }
    Ok(span)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartnerCriterion {
    /// Picard number at least 11.
    PicardAtLeastEleven,
    /// Picard number at least 3 with squarefree discriminant; an imported
    /// characteristic-zero result (Hosono-Lian-Oguiso-Yau), not proved here.
    SquarefreeDiscriminant,
    /// Rank 22 with `p`-elementary discriminant group of rank `2 sigma_0`.
    ShiodaSupersingular { sigma0: u32 },
}

impl PartnerCriterion {
    pub fn describe(&self) -> String {
        match self {
            PartnerCriterion::PicardAtLeastEleven => "unique partner (Picard number >= 11)".into(),
            PartnerCriterion::SquarefreeDiscriminant => {
                "unique partner (rank >= 3, squarefree discriminant; imported characteristic-0 criterion)".into()
            }
            PartnerCriterion::ShiodaSupersingular { sigma0 } => {
                format!("Shioda-supersingular (sigma0 = {sigma0}), unique partner")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartnerVerdict {
    pub fired: Vec<PartnerCriterion>,
}

impl PartnerVerdict {
    pub fn unique(&self) -> bool {
        !self.fired.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.fired.is_empty() {
            "finitely many partners".into()
        } else {
            self.fired.iter().map(PartnerCriterion::describe).collect::<Vec<_>>().join("; ")
        }
    }
}

/// Which uniqueness criteria apply to a K3 surface with Picard lattice `n` in characteristic `p`.
pub fn partner_uniqueness(n: &Lattice, p: &BigInt) -> Result<PartnerVerdict> {
    require_odd_prime(p)?;
    let mut fired = Vec::new();
    let rank = n.rank();
    if rank >= 11 {
        fired.push(PartnerCriterion::PicardAtLeastEleven);
    }
    if rank >= 3 && is_squarefree(n.determinant()) {
        fired.push(PartnerCriterion::SquarefreeDiscriminant);
    }
    if rank == 22 {
        if let Ok(a) = n.artin_invariant(p) {
            fired.push(PartnerCriterion::ShiodaSupersingular { sigma0: a.sigma0 });
        }
    }
    Ok(PartnerVerdict { fired })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftHypotheses {
    pub saturated: bool,
    pub rank_at_most_nine: bool,
    pub contains_ample: bool,
}

impl LiftHypotheses {
    pub fn holds(&self) -> bool {
        self.saturated && self.rank_at_most_nine && self.contains_ample
    }
}

/// `E` saturated in `N`, of rank at most 9, containing the given ample witness.
pub fn char0_lift_hypotheses(n: &Lattice, e: &Sublattice, ample: &[BigInt]) -> Result<LiftHypotheses> {
    if e.ambient() != n {
        return Err(Error::Precondition("E must be a sublattice of N".into()));
    }
    Ok(LiftHypotheses {
        saturated: e.is_primitive(),
        rank_at_most_nine: e.rank() <= 9,
        contains_ample: e.contains(ample)?,
    })
}

/// `gcd(r, p) = 1` and `r > 0`.
pub fn rank_is_good(v: &MukaiVector, p: &BigInt) -> bool {
    v.r.is_positive() && v.r.gcd(p).is_one()
}
