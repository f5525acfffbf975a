//! Integral lattices given by Gram matrices, their discriminant groups, and
//! sublattice operations (saturation, complements, cosets of `pN + Γ`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{dot, require_prime};
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A free lattice with a nondegenerate symmetric integral bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    det: BigInt,
    even: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_hyperbolic(&self) -> bool {
        self.positive == 1
    }
}

/// Validates a Gram matrix. Evenness is reported, not required.
pub fn validate_lattice(gram: IntMatrix) -> Result<Lattice> {
    Lattice::new(gram)
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: gram.rows(), cols: gram.cols() });
        }
        if let Some((row, col)) = gram.is_symmetric() {
            return Err(Error::NotSymmetric { row, col });
        }
        let det = gram.determinant()?;
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let even = (0..gram.rows()).all(|i| gram[(i, i)].is_even());
        Ok(Lattice { gram, det, even })
    }

    /// Validation that additionally insists on an even form.
    pub fn new_even(gram: IntMatrix) -> Result<Self> {
        let l = Self::new(gram)?;
        l.require_even()?;
        Ok(l)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    /// The hyperbolic plane `U`.
    pub fn hyperbolic_plane() -> Self {
        Self::from_i64(&[&[0, 1], &[1, 0]]).expect("U is valid")
    }

    pub fn direct_sum(parts: &[Lattice]) -> Result<Self> {
        let blocks: Vec<IntMatrix> = parts.iter().map(|l| l.gram.clone()).collect();
        Self::new(IntMatrix::direct_sum(&blocks))
    }

    pub fn require_even(&self) -> Result<()> {
        match (0..self.rank()).find(|&i| self.gram[(i, i)].is_odd()) {
            Some(index) => Err(Error::NotEven { index }),
            None => Ok(()),
        }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn determinant(&self) -> &BigInt {
        &self.det
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    fn check_len(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.len() });
        }
        Ok(())
    }

    /// `x . y` under the Gram matrix.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        self.check_len(x)?;
        Ok(dot(x, &self.gram.mul_vec(y)?))
    }

    pub fn norm(&self, x: &[BigInt]) -> Result<BigInt> {
        self.pair(x, x)
    }

    /// `G x`, the functional `y -> x . y` in dual coordinates.
    pub fn dual_image(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.gram.mul_vec(x)
    }

    /// Inertia of the real form, by exact rational congruence diagonalisation.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> =
            (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(self.gram[(i, j)].clone())).collect()).collect();
        let (mut positive, mut negative) = (0, 0);
        while !a.is_empty() {
            let m = a.len();
            let pivot = match (0..m).find(|&i| !a[i][i].is_zero()) {
                Some(i) => i,
                None => {
                    let Some((i, j)) =
                        (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
                    else {
                        break;
                    };
                    // e_i <- e_i + e_j makes the diagonal entry 2 a_ij
                    let row_j = a[j].clone();
                    for (x, v) in a[i].iter_mut().zip(row_j) {
                        *x += v;
                    }
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[i] += v;
                    }
                    i
                }
            };
            let d = a[pivot][pivot].clone();
            if d.is_positive() {
                positive += 1;
            } else {
                negative += 1;
            }
            let rest: Vec<usize> = (0..m).filter(|&k| k != pivot).collect();
            a = rest
                .iter()
                .map(|&r| rest.iter().map(|&c| &a[r][c] - &a[r][pivot] * &a[pivot][c] / &d).collect())
                .collect();
        }
        Signature { positive, negative }
    }

    /// `L^vee / L` from the Smith form of the Gram matrix.
    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let s = self.gram.smith();
        DiscriminantGroup { invariant_factors: s.diag.into_iter().filter(|d| !d.is_one()).collect() }
    }

    /// Artin invariant `sigma_0` of a lattice whose discriminant group is
    /// `(Z/p)^(2 sigma_0)`.
    pub fn artin_invariant(&self, p: &BigInt) -> Result<ArtinInvariant> {
        require_prime(p)?;
        let disc = self.discriminant_group();
        if let Some(bad) = disc.invariant_factors.iter().find(|d| *d != p) {
            return Err(Error::Precondition(format!(
                "discriminant group has a factor Z/{bad}, not annihilated by {p}"
            )));
        }
        let dim = disc.invariant_factors.len();
        if dim % 2 == 1 {
            return Err(Error::Precondition(format!("p-rank {dim} of the discriminant group is odd")));
        }
        let sigma0 = (dim / 2) as u32;
        let in_range = (1..=10).contains(&sigma0);
        let warning = match (in_range, self.rank()) {
            (true, _) => None,
            (false, 22) => {
                return Err(Error::Precondition(format!(
                    "Artin invariant {sigma0} outside [1, 10] for a rank-22 lattice"
                )))
            }
            (false, r) => Some(format!("sigma0 = {sigma0} outside [1,10] (rank {r}, bound not enforced)")),
        };
        Ok(ArtinInvariant { sigma0, warning })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinInvariant {
    pub sigma0: u32,
    pub warning: Option<String>,
}

/// Finite abelian group `N^vee / N`, stored by invariant factors `d_1 | d_2 | ...`, all `> 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    pub invariant_factors: Vec<BigInt>,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Number of cyclic factors (the minimal number of generators).
    pub fn length(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }
}

/// A sublattice of an ambient lattice, given by a basis in ambient coordinates (rows).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    basis: IntMatrix,
}

/// `l = sum gamma_coeffs[i] * basis[i] + p * x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetWitness {
    pub gamma_coeffs: Vec<BigInt>,
    pub x: Vec<BigInt>,
}

impl Sublattice {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.cols() != ambient.rank() {
            return Err(Error::DimensionMismatch { expected: ambient.rank(), got: basis.cols() });
        }
        if basis.rank() != basis.rows() {
            return Err(Error::DependentRows);
        }
        Ok(Sublattice { ambient, basis })
    }

    pub fn from_rows(ambient: Lattice, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = ambient.rank();
        Self::new(ambient, IntMatrix::from_rows_with_cols(rows, cols)?)
    }

    /// Sublattice spanned by arbitrary (possibly dependent) generators.
    pub fn span(ambient: Lattice, generators: &IntMatrix) -> Result<Self> {
        if generators.cols() != ambient.rank() {
            return Err(Error::DimensionMismatch { expected: ambient.rank(), got: generators.cols() });
        }
        let basis = generators.hermite();
        Ok(Sublattice { ambient, basis })
    }

    pub fn zero(ambient: Lattice) -> Self {
        let n = ambient.rank();
        Sublattice { ambient, basis: IntMatrix::zeros(0, n) }
    }

    pub fn whole(ambient: Lattice) -> Self {
        let n = ambient.rank();
        Sublattice { ambient, basis: IntMatrix::identity(n) }
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Restricted form `B G B^T`.
    pub fn gram(&self) -> IntMatrix {
        self.basis
            .mul(self.ambient.gram())
            .and_then(|bg| bg.mul(&self.basis.transpose()))
            .expect("basis width matches ambient rank")
    }

    /// The sublattice as a lattice in its own right; fails if the restricted form degenerates.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram())
    }

    /// Hermite basis, canonical for the row span.
    pub fn canonical_basis(&self) -> IntMatrix {
        self.basis.hermite()
    }

    pub fn same_span(&self, other: &Sublattice) -> bool {
        self.canonical_basis() == other.canonical_basis()
    }

    /// Membership of an ambient vector in the integer row span.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        self.ambient.check_len(v)?;
        let h = self.canonical_basis();
        let mut v = v.to_vec();
        for row in h.row_iter() {
            let c = row.iter().position(|x| !x.is_zero()).expect("hermite rows are nonzero");
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return Ok(false);
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi -= &q * ri;
            }
        }
        Ok(v.iter().all(Zero::is_zero))
    }

    /// The primitive closure `(Q B) cap Z^n`, returned in Hermite form.
    pub fn saturate(&self) -> Sublattice {
        let s = self.basis.smith();
        let rank = s.diag.len();
        let rows: Vec<Vec<BigInt>> = (0..rank).map(|i| s.v_inv.row(i).to_vec()).collect();
        let sat = IntMatrix::from_rows_with_cols(rows, self.ambient.rank()).expect("uniform rows");
        Sublattice { ambient: self.ambient.clone(), basis: sat.hermite() }
    }

    /// `[saturate(S) : S]`, the product of the Smith invariants of the basis.
    pub fn saturation_index(&self) -> BigInt {
        self.basis.smith().diag.iter().product()
    }

    pub fn is_primitive(&self) -> bool {
        self.same_span(&self.saturate())
    }

    /// All ambient vectors orthogonal to every basis row (a saturated sublattice).
    pub fn orthogonal_complement(&self) -> Sublattice {
        // x G B^T = 0
        let m = self.ambient.gram().mul(&self.basis.transpose()).expect("basis width matches ambient rank");
        let kernel = m.left_kernel();
        Sublattice { ambient: self.ambient.clone(), basis: kernel.hermite() }
    }

    /// Solves `l = gamma + p x` with `gamma` in this sublattice; `None` when `l` is not in `pN + Γ`.
    pub fn coset_witness(&self, l: &[BigInt], p: &BigInt) -> Result<Option<CosetWitness>> {
        require_prime(p)?;
        self.ambient.check_len(l)?;
        let k = self.rank();
        let n = self.ambient.rank();
        let md = |x: &BigInt| x.mod_floor(p);
        // Echelon rows over F_p, each carrying its combination of basis rows.
        let mut echelon: Vec<(usize, Vec<BigInt>, Vec<BigInt>)> = Vec::new();
        for i in 0..k {
            let mut row: Vec<BigInt> = self.basis.row(i).iter().map(md).collect();
            let mut tag = vec![BigInt::zero(); k];
            tag[i] = BigInt::one();
            reduce_mod_p(&mut row, &mut tag, &echelon, p);
            if let Some(piv) = row.iter().position(|x| !x.is_zero()) {
                let inv = mod_inverse(&row[piv], p);
                for x in row.iter_mut().chain(tag.iter_mut()) {
                    *x = (&*x * &inv).mod_floor(p);
                }
                echelon.push((piv, row, tag));
            }
        }
        let mut target: Vec<BigInt> = l.iter().map(md).collect();
        let mut combo = vec![BigInt::zero(); k];
        reduce_mod_p(&mut target, &mut combo, &echelon, p);
        if target.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        // reduce_mod_p subtracted the combination; negate to get l = sum c_i b_i (mod p)
        let gamma_coeffs: Vec<BigInt> = combo.iter().map(|c| (-c).mod_floor(p)).collect();
        let gamma = self.basis.vec_mul(&gamma_coeffs)?;
        let mut x = Vec::with_capacity(n);
        for (li, gi) in l.iter().zip(&gamma) {
            let (q, r) = (li - gi).div_rem(p);
            if !r.is_zero() {
                return Err(Error::Assertion("coset residual not divisible by p".into()));
            }
            x.push(q);
        }
        Ok(Some(CosetWitness { gamma_coeffs, x }))
    }
}

fn reduce_mod_p(row: &mut [BigInt], tag: &mut [BigInt], echelon: &[(usize, Vec<BigInt>, Vec<BigInt>)], p: &BigInt) {
    for (piv, erow, etag) in echelon {
        if row[*piv].is_zero() {
            continue;
        }
        let f = row[*piv].clone();
        for (x, e) in row.iter_mut().zip(erow) {
            *x = (&*x - &f * e).mod_floor(p);
        }
        for (x, e) in tag.iter_mut().zip(etag) {
            *x = (&*x - &f * e).mod_floor(p);
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

/// True iff `l` lies in `pN + Γ`.
pub fn in_coset(n: &Lattice, l: &[BigInt], p: &BigInt, gamma: &Sublattice) -> Result<bool> {
    if gamma.ambient() != n {
        return Err(Error::Precondition("Γ is not a sublattice of N".into()));
    }
    Ok(gamma.coset_witness(l, p)?.is_some())
}
