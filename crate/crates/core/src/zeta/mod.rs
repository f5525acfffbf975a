//! Frobenius characteristic polynomials on `H^2` of a K3 surface over `F_q`.

pub mod points;
pub mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::arith::{prime_power_exponent, require_odd_prime, valuation};
use crate::error::{Error, Result};
use poly::{complex_roots, RatPoly};

pub use points::{trace_consistency, GaloisField, Hypersurface, TraceConsistency};

/// Second Betti number of a K3 surface.
pub const B2: usize = 22;

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusData {
    p: BigInt,
    q: BigInt,
    /// `a_0 .. a_22`, ascending, `a_22 = 1`.
    charpoly: Vec<BigInt>,
}

impl FrobeniusData {
    /// Ascending coefficients `a_0 .. a_22`.
    pub fn new(p: BigInt, q: BigInt, charpoly: Vec<BigInt>) -> Result<Self> {
        require_odd_prime(&p)?;
        if prime_power_exponent(&q, &p).is_none_or(|e| e == 0) {
            return Err(Error::Malformed(format!("q = {q} is not a positive power of p = {p}")));
        }
        if charpoly.len() != B2 + 1 {
            return Err(Error::Malformed(format!(
                "characteristic polynomial must have {} coefficients, got {}",
                B2 + 1,
                charpoly.len()
            )));
        }
        if !charpoly[B2].is_one() {
            return Err(Error::Malformed("characteristic polynomial must be monic".into()));
        }
        if charpoly[0].is_zero() {
            return Err(Error::Malformed("constant coefficient must be nonzero".into()));
        }
        Ok(FrobeniusData { p, q, charpoly })
    }

    /// Descending coefficients `a_22 .. a_0`.
    pub fn from_descending(p: BigInt, q: BigInt, mut coeffs: Vec<BigInt>) -> Result<Self> {
        coeffs.reverse();
        FrobeniusData::new(p, q, coeffs)
    }

    /// Accepts either coefficient order, taking whichever end equals 1 as the leading coefficient.
    /// Ascending order wins when both ends are 1.
    pub fn from_either_order(p: BigInt, q: BigInt, coeffs: Vec<BigInt>) -> Result<Self> {
        let ascending = coeffs.last().is_some_and(One::is_one) || !coeffs.first().is_some_and(One::is_one);
        if ascending {
            FrobeniusData::new(p, q, coeffs)
        } else {
            FrobeniusData::from_descending(p, q, coeffs)
        }
    }

    /// `prod (t - root)^mult`; multiplicities must sum to 22.
    pub fn from_linear_factors(p: BigInt, q: BigInt, factors: &[(BigInt, usize)]) -> Result<Self> {
        let mut c = vec![BigInt::one()];
        for (root, mult) in factors {
            for _ in 0..*mult {
                let mut next = vec![BigInt::zero(); c.len() + 1];
                for (i, a) in c.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * root;
                }
                c = next;
            }
        }
        FrobeniusData::new(p, q, c)
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn charpoly(&self) -> &[BigInt] {
        &self.charpoly
    }

    /// First index `i` violating `a_i q^{2i} = a_0 a_{22-i}`; index 22 stands for `a_0 != ±q^22`.
    pub fn duality_failure(&self) -> Option<usize> {
        let a = &self.charpoly;
        let q22: BigInt = Pow::pow(&self.q, B2 as u32);
        if a[0].abs() != q22 {
            return Some(B2);
        }
        let q2 = &self.q * &self.q;
        let mut pow = BigInt::one();
        for i in 0..=B2 {
            if &a[i] * &pow != &a[0] * &a[B2 - i] {
                return Some(i);
            }
            pow *= &q2;
        }
        None
    }

    pub fn duality_holds(&self) -> bool {
        self.duality_failure().is_none()
    }

    /// Largest `| |α|/q - 1 |` over the distinct complex roots `α`.
    pub fn max_root_deviation(&self) -> f64 {
        let scaled = RatPoly::from_ints(&self.charpoly)
            .scale_argument(&BigRational::from_integer(self.q.clone()))
            .squarefree_part();
        complex_roots(&scaled.to_f64()).iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn weil_validate(&self, tol: f64) -> WeilReport {
        let deviation = self.max_root_deviation();
        WeilReport {
            duality: self.duality_holds(),
            duality_failure: self.duality_failure(),
            root_modulus: deviation <= tol,
            max_root_deviation: deviation,
            tolerance: tol,
        }
    }

    /// Power sums `p_1 .. p_n` of the roots, by Newton's identities.
    pub fn power_sums(&self, n: usize) -> Vec<BigInt> {
        // c_j: coefficient of t^{22-j}
        let c: Vec<&BigInt> = (0..=B2).map(|j| &self.charpoly[B2 - j]).collect();
        let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
        p.push(BigInt::from(B2));
        for k in 1..=n {
            let mut s = BigInt::zero();
            for j in 1..=k.min(B2) {
                if j == k {
                    s += c[j] * BigInt::from(k);
                } else {
                    s += c[j] * &p[k - j];
                }
            }
            p.push(-s);
        }
        p.remove(0);
        p
    }

    /// `Tr(F^n | H^2)`.
    pub fn trace(&self, n: usize) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::Precondition("n must be positive".into()));
        }
        Ok(self.power_sums(n).pop().unwrap())
    }

    fn require_duality(&self) -> Result<()> {
        match self.duality_failure() {
            None => Ok(()),
            Some(i) => Err(Error::Precondition(format!("functional equation fails at coefficient {i}"))),
        }
    }

    /// `#X(F_{q^n}) = 1 + q^{2n} + Tr(F^n | H^2)`.
    pub fn point_count(&self, n: usize) -> Result<BigInt> {
        self.require_duality()?;
        let t = self.trace(n)?;
        Ok(BigInt::one() + Pow::pow(&self.q, 2 * n as u32) + t)
    }

    /// Trace of `F^n` on the Mukai crystal `H^0(-1) + H^2 + H^4(1)`: `Tr(F^n | H^2) + 2 q^n`.
    pub fn mukai_trace(&self, n: usize) -> Result<BigInt> {
        self.require_duality()?;
        let t = self.trace(n)?;
        Ok(t + BigInt::from(2) * Pow::pow(&self.q, n as u32))
    }

    pub fn newton_polygon(&self) -> NewtonPolygon {
        newton_polygon(&self.charpoly, &self.p, &self.q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeilReport {
    pub duality: bool,
    pub duality_failure: Option<usize>,
    pub root_modulus: bool,
    pub max_root_deviation: f64,
    pub tolerance: f64,
}

impl WeilReport {
    pub fn passes(&self) -> bool {
        self.duality && self.root_modulus
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaComparison {
    pub equal: bool,
    /// Smallest `n` with `#X(F_{q^n}) != #Y(F_{q^n})`.
    pub witness: Option<usize>,
}

/// Equality of zeta functions, equivalently of characteristic polynomials on `H^2`.
pub fn zeta_equal(a: &FrobeniusData, b: &FrobeniusData) -> Result<ZetaComparison> {
    if a.q != b.q {
        return Err(Error::Precondition(format!("different base fields: q = {} and q = {}", a.q, b.q)));
    }
    if a.charpoly == b.charpoly {
        return Ok(ZetaComparison { equal: true, witness: None });
    }
    let (sa, sb) = (a.power_sums(B2), b.power_sums(B2));
    let witness = sa.iter().zip(&sb).position(|(x, y)| x != y).map(|i| i + 1);
    debug_assert!(witness.is_some());
    Ok(ZetaComparison { equal: false, witness })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlopeClass {
    Supersingular,
    FiniteHeight(u64),
    /// Smallest slope not of the form `1 - 1/h`.
    Unclassified,
}

impl fmt::Display for SlopeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlopeClass::Supersingular => write!(f, "supersingular"),
            SlopeClass::FiniteHeight(h) => write!(f, "finite height {h}"),
            SlopeClass::Unclassified => write!(f, "unclassified"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Hull vertices `(i, v_p(a_i))`.
    pub vertices: Vec<(usize, u64)>,
    /// Root valuations divided by `v_p(q)`, ascending, with multiplicity.
    pub slopes: Vec<BigRational>,
    pub class: SlopeClass,
}

/// Lower convex hull of `(i, v_p(a_i))` over the nonzero coefficients.
pub fn newton_polygon(coeffs: &[BigInt], p: &BigInt, q: &BigInt) -> NewtonPolygon {
    let e = prime_power_exponent(q, p).unwrap_or(1).max(1);
    let pts: Vec<(usize, u64)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| valuation(c, p).map(|v| (i, v))).collect();
    let mut hull: Vec<(usize, u64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            let lhs = (y2 as i128 - y1 as i128) * (pt.0 as i128 - x1 as i128);
            let rhs = (pt.1 as i128 - y1 as i128) * (x2 as i128 - x1 as i128);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let dx = (x2 - x1) as i64;
        let s = BigRational::new(BigInt::from(y1 as i64 - y2 as i64), BigInt::from(dx * e as i64));
        for _ in 0..dx {
            slopes.push(s.clone());
        }
    }
    slopes.sort();
    let class = classify(&slopes);
    NewtonPolygon { vertices: hull, slopes, class }
}

fn classify(slopes: &[BigRational]) -> SlopeClass {
    let one = BigRational::one();
    if slopes.iter().all(|s| s == &one) {
        return SlopeClass::Supersingular;
    }
    let Some(min) = slopes.first() else {
        return SlopeClass::Unclassified;
    };
    let gap = &one - min;
    if !gap.is_positive() || !gap.numer().is_one() {
        return SlopeClass::Unclassified;
    }
    match u64::try_from(gap.denom().clone()) {
        Ok(h) => SlopeClass::FiniteHeight(h),
        Err(_) => SlopeClass::Unclassified,
    }
}
