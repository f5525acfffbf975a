//! The extended Néron-Severi lattice `Z + NS + Z` with the Mukai pairing.
//!
//! Coordinates are ordered `(r, b_1..b_rho, s)`. The outer pair carries the
//! form `-(a c' + a' c)` and the middle block carries the NS Gram matrix, so
//! `<(a,b,c),(a',b',c')> = b.b' - a c' - a' c`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Signature};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiLattice {
    ns: Lattice,
    gram: IntMatrix,
}

/// `(r, c1, s)`: rank, first Chern class in NS coordinates, and the degree-four part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c1: Vec<BigInt>,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, c1: Vec<BigInt>, s: impl Into<BigInt>) -> Self {
        MukaiVector { r: r.into(), c1, s: s.into() }
    }

    /// Builds from the flat coordinate list `(r, b.., s)`.
    pub fn from_coords(coords: &[BigInt]) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: coords.len() });
        }
        let last = coords.len() - 1;
        Ok(MukaiVector { r: coords[0].clone(), c1: coords[1..last].to_vec(), s: coords[last].clone() })
    }

    pub fn to_coords(&self) -> Vec<BigInt> {
        let mut v = Vec::with_capacity(self.c1.len() + 2);
        v.push(self.r.clone());
        v.extend(self.c1.iter().cloned());
        v.push(self.s.clone());
        v
    }

    pub fn ns_rank(&self) -> usize {
        self.c1.len()
    }

    /// `(1, 0, 0)`, the class of the fundamental cycle.
    pub fn unit(rho: usize) -> Self {
        MukaiVector::new(1, vec![BigInt::zero(); rho], 0)
    }

    /// `(0, 0, 1)`, the class of a point.
    pub fn point(rho: usize) -> Self {
        MukaiVector::new(0, vec![BigInt::zero(); rho], 1)
    }

    pub fn is_primitive(&self) -> bool {
        crate::arith::gcd_list(&self.to_coords()).is_one()
    }

    pub fn neg(&self) -> Self {
        MukaiVector { r: -&self.r, c1: self.c1.iter().map(|x| -x).collect(), s: -&self.s }
    }
}

impl MukaiLattice {
    pub fn new(ns: Lattice) -> Self {
        let rho = ns.rank();
        let n = rho + 2;
        let mut gram = IntMatrix::zeros(n, n);
        gram[(0, n - 1)] = -BigInt::one();
        gram[(n - 1, 0)] = -BigInt::one();
        for i in 0..rho {
            for j in 0..rho {
                gram[(i + 1, j + 1)] = ns.gram()[(i, j)].clone();
            }
        }
        MukaiLattice { ns, gram }
    }

    pub fn ns(&self) -> &Lattice {
        &self.ns
    }

    pub fn rho(&self) -> usize {
        self.ns.rank()
    }

    /// `rho + 2`.
    pub fn total_rank(&self) -> usize {
        self.ns.rank() + 2
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    /// The Mukai lattice itself as a lattice (unimodular iff NS is).
    pub fn as_lattice(&self) -> Lattice {
        Lattice::new(self.gram.clone()).expect("U + NS is nondegenerate")
    }

    pub fn signature(&self) -> Signature {
        let s = self.ns.signature();
        Signature { positive: s.positive + 1, negative: s.negative + 1 }
    }

    pub fn check(&self, v: &MukaiVector) -> Result<()> {
        if v.ns_rank() != self.rho() {
            return Err(Error::DimensionMismatch { expected: self.rho(), got: v.ns_rank() });
        }
        Ok(())
    }

    pub fn unit(&self) -> MukaiVector {
        MukaiVector::unit(self.rho())
    }

    pub fn point(&self) -> MukaiVector {
        MukaiVector::point(self.rho())
    }

    pub fn pairing(&self, u: &MukaiVector, v: &MukaiVector) -> Result<BigInt> {
        mukai_pairing(self, u, v)
    }

    pub fn norm(&self, v: &MukaiVector) -> Result<BigInt> {
        mukai_pairing(self, v, v)
    }
}

/// `<u, v> = b.b' - a c' - a' c`.
pub fn mukai_pairing(l: &MukaiLattice, u: &MukaiVector, v: &MukaiVector) -> Result<BigInt> {
    l.check(u)?;
    l.check(v)?;
    let bb = l.ns.pair(&u.c1, &v.c1)?;
    Ok(bb - &u.r * &v.s - &v.r * &u.s)
}

/// Mukai vector `(r, c1, r + c1^2/2 - c2)` of a sheaf with the given Chern data.
pub fn mukai_vector(l: &MukaiLattice, r: BigInt, c1: Vec<BigInt>, c2: BigInt) -> Result<MukaiVector> {
    if c1.len() != l.rho() {
        return Err(Error::DimensionMismatch { expected: l.rho(), got: c1.len() });
    }
    let sq = l.ns.norm(&c1)?;
    let half = BigRational::new(sq.clone(), BigInt::from(2));
    if !half.is_integer() {
        return Err(Error::OddSelfIntersection(sq.to_string()));
    }
    let s = &r + half.to_integer() - c2;
    Ok(MukaiVector { r, c1, s })
}

/// `chi(E, F) = -<v(E), v(F)>`.
pub fn euler_pairing(l: &MukaiLattice, u: &MukaiVector, v: &MukaiVector) -> Result<BigInt> {
    Ok(-mukai_pairing(l, u, v)?)
}

/// `dim Ext^1(E, E) = v^2 + 2` for a simple sheaf `E` with Mukai vector `v`.
pub fn deformation_dimension(l: &MukaiLattice, v: &MukaiVector) -> Result<BigInt> {
    Ok(l.norm(v)? + 2)
}

/// An integer matrix preserving the Mukai form: `M^T G M = G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    matrix: IntMatrix,
}

/// Exact check of `M^T G M = G`.
pub fn is_isometry(m: &IntMatrix, l: &MukaiLattice) -> Result<bool> {
    let n = l.total_rank();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.rows().max(m.cols()) });
    }
    let lhs = m.transpose().mul(l.gram())?.mul(m)?;
    Ok(&lhs == l.gram())
}

impl Isometry {
    pub fn new(l: &MukaiLattice, matrix: IntMatrix) -> Result<Self> {
        if !is_isometry(&matrix, l)? {
            return Err(Error::Precondition("matrix does not preserve the Mukai pairing".into()));
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(l: &MukaiLattice) -> Self {
        Isometry { matrix: IntMatrix::identity(l.total_rank()) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &MukaiVector) -> Result<MukaiVector> {
        MukaiVector::from_coords(&self.matrix.mul_vec(&v.to_coords())?)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        Ok(Isometry { matrix: self.matrix.mul(&other.matrix)? })
    }

    /// Exact inverse `G^{-1} M^T G`; valid because `M^T G M = G`.
    pub fn inverse(&self, l: &MukaiLattice) -> Result<Isometry> {
        let g = l.gram();
        let g_inv = RationalInverse::new(g)?;
        Ok(Isometry { matrix: g_inv.mul(&self.matrix.transpose().mul(g)?)? })
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant().expect("square")
    }

    /// Restriction to the middle block, meaningful when `(1,0,0)` and `(0,0,1)` are fixed.
    pub fn ns_block(&self) -> IntMatrix {
        let n = self.size();
        let rows = (1..n - 1).map(|i| (1..n - 1).map(|j| self.matrix[(i, j)].clone()).collect()).collect();
        IntMatrix::from_rows_with_cols(rows, n - 2).expect("square block")
    }
}

/// `G^{-1}` held as `adj / det`; products with it are divided exactly at the end.
struct RationalInverse {
    adj: IntMatrix,
    det: BigInt,
}

impl RationalInverse {
    fn new(g: &IntMatrix) -> Result<Self> {
        let n = g.rows();
        let det = g.determinant()?;
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        // adjugate through cofactors; sizes here are at most 24
        let mut adj = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor_rows: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| g[(r, c)].clone()).collect())
                    .collect();
                let minor = IntMatrix::from_rows_with_cols(minor_rows, n - 1)?.determinant()?;
                adj[(i, j)] = if (i + j) % 2 == 0 { minor } else { -minor };
            }
        }
        Ok(RationalInverse { adj, det })
    }

    fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        let prod = self.adj.mul(rhs)?;
        let mut out = IntMatrix::zeros(prod.rows(), prod.cols());
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                let (q, r) = prod[(i, j)].div_rem(&self.det);
                if !r.is_zero() {
                    return Err(Error::Assertion("inverse of an isometry is not integral".into()));
                }
                out[(i, j)] = q;
            }
        }
        Ok(out)
    }
}
