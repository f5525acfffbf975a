//! Cohomological actions of standard Fourier-Mukai kernels on `Z + NS + Z`.
//!
//! A [`Transform`] is an isometry together with the word of generators that
//! produced it, so that any result can be rebuilt from the word alone. The
//! chamber walk and [`normalize`] put a filtered transform into the shape
//! where it fixes `(1,0,0)` and `(0,0,1)` and carries a reference class into
//! the chamber cut out by a supplied root set.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::IntMatrix;
use crate::mukai::{Isometry, MukaiLattice, MukaiVector};

/// One letter of a transform word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Tensoring with a line bundle of the given class.
    Twist(Vec<BigInt>),
    /// Spherical twist: the reflection in a vector of square `+-2`.
    Spherical(MukaiVector),
    /// Identity on the outer summands, `-1` on NS.
    MinusOnePic,
    /// Global `-1`.
    Shift,
    /// `(a, b, c) -> (c, -b, a)`: the shifted ideal of the diagonal followed by a shift.
    SwapOuter,
    /// Action of an identification of a moduli space with the target surface.
    ModuliIdentification(IntMatrix),
    /// An arbitrary isometry supplied by the caller.
    User(IntMatrix),
}

impl Generator {
    pub fn label(&self) -> &'static str {
        match self {
            Generator::Twist(_) => "twist",
            Generator::Spherical(_) => "spherical",
            Generator::MinusOnePic => "minus_one_pic",
            Generator::Shift => "shift",
            Generator::SwapOuter => "swap_outer",
            Generator::ModuliIdentification(_) => "moduli_identification",
            Generator::User(_) => "user",
        }
    }

    pub fn matrix(&self, l: &MukaiLattice) -> Result<IntMatrix> {
        let n = l.total_rank();
        match self {
            Generator::Twist(c) => twist_matrix(l, c),
            Generator::Spherical(v) => spherical_matrix(l, v),
            Generator::MinusOnePic => {
                let mut m = IntMatrix::identity(n).neg();
                m[(0, 0)] = BigInt::one();
                m[(n - 1, n - 1)] = BigInt::one();
                Ok(m)
            }
            Generator::Shift => Ok(IntMatrix::identity(n).neg()),
            Generator::SwapOuter => {
                let mut m = IntMatrix::identity(n).neg();
                m[(0, 0)] = BigInt::zero();
                m[(n - 1, n - 1)] = BigInt::zero();
                m[(0, n - 1)] = BigInt::one();
                m[(n - 1, 0)] = BigInt::one();
                Ok(m)
            }
            Generator::ModuliIdentification(m) | Generator::User(m) => {
                if !crate::mukai::is_isometry(m, l)? {
                    return Err(Error::Precondition("supplied matrix is not a Mukai isometry".into()));
                }
                Ok(m.clone())
            }
        }
    }

    /// The generator undoing this one.
    pub fn inverse(&self, l: &MukaiLattice) -> Result<Generator> {
        Ok(match self {
            Generator::Twist(c) => Generator::Twist(c.iter().map(|x| -x).collect()),
            Generator::ModuliIdentification(m) => {
                Generator::ModuliIdentification(Isometry::new(l, m.clone())?.inverse(l)?.into_matrix())
            }
            Generator::User(m) => Generator::User(Isometry::new(l, m.clone())?.inverse(l)?.into_matrix()),
            other => other.clone(),
        })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        match self {
            Generator::Twist(c) => write!(f, "twist({})", join(c)),
            Generator::Spherical(v) => write!(f, "spherical({})", join(&v.to_coords())),
            other => f.write_str(other.label()),
        }
    }
}

fn twist_matrix(l: &MukaiLattice, c: &[BigInt]) -> Result<IntMatrix> {
    let rho = l.rho();
    if c.len() != rho {
        return Err(Error::DimensionMismatch { expected: rho, got: c.len() });
    }
    let sq = l.ns().norm(c)?;
    if sq.is_odd() {
        return Err(Error::OddSelfIntersection(sq.to_string()));
    }
    let gc = l.ns().dual_image(c)?;
    let n = rho + 2;
    let mut m = IntMatrix::identity(n);
    for i in 0..rho {
        m[(i + 1, 0)] = c[i].clone();
        m[(n - 1, i + 1)] = gc[i].clone();
    }
    m[(n - 1, 0)] = sq / 2;
    Ok(m)
}

fn spherical_matrix(l: &MukaiLattice, v: &MukaiVector) -> Result<IntMatrix> {
    let sq = l.norm(v)?;
    let sign = if sq == BigInt::from(2) {
        BigInt::one()
    } else if sq == BigInt::from(-2) {
        -BigInt::one()
    } else {
        return Err(Error::Precondition(format!("spherical class must have square +-2, got {sq}")));
    };
    // x -> x - (2 <x,v> / <v,v>) v = x - sign <x,v> v
    let coords = v.to_coords();
    let gv = l.gram().mul_vec(&coords)?;
    let n = l.total_rank();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let d = &sign * &coords[i] * &gv[j];
            m[(i, j)] -= d;
        }
    }
    Ok(m)
}

/// An isometry of the Mukai lattice with the generator word that built it.
///
/// Words are stored in application order: the first generator acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    isometry: Isometry,
    word: Vec<Generator>,
}

impl Transform {
    pub fn identity(l: &MukaiLattice) -> Self {
        Transform { isometry: Isometry::identity(l), word: Vec::new() }
    }

    pub fn from_generator(l: &MukaiLattice, g: Generator) -> Result<Self> {
        let isometry = Isometry::new(l, g.matrix(l)?)?;
        Ok(Transform { isometry, word: vec![g] })
    }

    pub fn from_word(l: &MukaiLattice, word: Vec<Generator>) -> Result<Self> {
        let mut t = Transform::identity(l);
        for g in word {
            t = Transform::from_generator(l, g)?.compose(&t)?;
        }
        Ok(t)
    }

    /// Caller-supplied isometry, recorded as a single `user` letter.
    pub fn user(l: &MukaiLattice, matrix: IntMatrix) -> Result<Self> {
        Self::from_generator(l, Generator::User(matrix))
    }

    pub fn isometry(&self) -> &Isometry {
        &self.isometry
    }

    pub fn matrix(&self) -> &IntMatrix {
        self.isometry.matrix()
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    pub fn apply(&self, v: &MukaiVector) -> Result<MukaiVector> {
        self.isometry.apply(v)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Transform) -> Result<Transform> {
        let isometry = self.isometry.compose(&other.isometry)?;
        let mut word = other.word.clone();
        word.extend(self.word.iter().cloned());
        Ok(Transform { isometry, word })
    }

    /// `next` after `self`.
    pub fn then(&self, next: &Transform) -> Result<Transform> {
        next.compose(self)
    }

    pub fn inverse(&self, l: &MukaiLattice) -> Result<Transform> {
        let word = self.word.iter().rev().map(|g| g.inverse(l)).collect::<Result<Vec<_>>>()?;
        Ok(Transform { isometry: self.isometry.inverse(l)?, word })
    }

    /// Rebuilds the matrix from the word alone.
    pub fn replay(&self, l: &MukaiLattice) -> Result<IntMatrix> {
        let mut m = IntMatrix::identity(l.total_rank());
        for g in &self.word {
            m = g.matrix(l)?.mul(&m)?;
        }
        Ok(m)
    }

    pub fn replays_exactly(&self, l: &MukaiLattice) -> Result<bool> {
        Ok(&self.replay(l)? == self.matrix())
    }
}

/// `(a, b, c) -> (a, b + a L, c + b.L + a L^2/2)`.
pub fn line_bundle_twist(l: &MukaiLattice, c1: &[BigInt]) -> Result<Transform> {
    Transform::from_generator(l, Generator::Twist(c1.to_vec()))
}

/// Reflection in `v` for `<v,v> = +-2`.
pub fn spherical_twist(l: &MukaiLattice, v: &MukaiVector) -> Result<Transform> {
    Transform::from_generator(l, Generator::Spherical(v.clone()))
}

pub fn minus_one_pic(l: &MukaiLattice) -> Transform {
    Transform::from_generator(l, Generator::MinusOnePic).expect("diag(1,-1,1) is an isometry")
}

pub fn shift(l: &MukaiLattice) -> Transform {
    Transform::from_generator(l, Generator::Shift).expect("-1 is an isometry")
}

pub fn swap_outer(l: &MukaiLattice) -> Transform {
    Transform::from_generator(l, Generator::SwapOuter).expect("outer swap is an isometry")
}

/// The reflection `x -> x + (x.delta) delta` on NS, extended by the identity on
/// the outer summands, realised as `spherical(0, delta, 1)` after `twist(-delta)`.
pub fn ns_reflection(l: &MukaiLattice, delta: &[BigInt]) -> Result<Transform> {
    if l.ns().norm(delta)? != BigInt::from(-2) {
        return Err(Error::Precondition("reflection root must have square -2".into()));
    }
    let neg: Vec<BigInt> = delta.iter().map(|x| -x).collect();
    let twist = line_bundle_twist(l, &neg)?;
    let sph = spherical_twist(l, &MukaiVector::new(0, delta.to_vec(), 1))?;
    sph.compose(&twist)
}

/// True iff the transform maps `(0,0,1)` to `+-(0,0,1)`.
pub fn is_filtered(t: &Transform) -> bool {
    let m = t.matrix();
    let n = m.rows();
    let col = m.column(n - 1);
    col[..n - 1].iter().all(Zero::is_zero) && col[n - 1].abs().is_one()
}

/// Classes of square `-2` in a lattice, one per `+-` pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    roots: Vec<Vec<BigInt>>,
}

impl RootSet {
    pub fn new(ns: &Lattice, roots: Vec<Vec<BigInt>>) -> Result<Self> {
        for r in &roots {
            let sq = ns.norm(r)?;
            if sq != BigInt::from(-2) {
                return Err(Error::Precondition(format!("root has square {sq}, expected -2")));
            }
        }
        Ok(RootSet { roots })
    }

    pub fn empty() -> Self {
        RootSet { roots: Vec::new() }
    }

    pub fn roots(&self) -> &[Vec<BigInt>] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Flips each root onto the side where it pairs positively with `h`.
    pub fn oriented_towards(&self, ns: &Lattice, h: &[BigInt]) -> Result<RootSet> {
        let mut roots = Vec::with_capacity(self.roots.len());
        for r in &self.roots {
            let d = ns.pair(r, h)?;
            match d.sign() {
                num_bigint::Sign::Plus => roots.push(r.clone()),
                num_bigint::Sign::Minus => roots.push(r.iter().map(|x| -x).collect()),
                num_bigint::Sign::NoSign => {
                    return Err(Error::Precondition("reference class lies on a root wall".into()))
                }
            }
        }
        Ok(RootSet { roots })
    }
}

/// Every `delta` with `delta^2 = -2` and all coordinates in `[-bound, bound]`,
/// normalised so the first nonzero coordinate is positive, in lexicographic order.
pub fn enumerate_roots(ns: &Lattice, bound: u32) -> RootSet {
    let n = ns.rank();
    let b = i64::from(bound);
    let target = BigInt::from(-2);
    let mut roots = Vec::new();
    let mut coords = vec![-b; n];
    if n == 0 {
        return RootSet { roots };
    }
    loop {
        let first = coords.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) {
            let v: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
            if ns.norm(&v).expect("length matches") == target {
                roots.push(v);
            }
        }
        // odometer, last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                roots.sort();
                return RootSet { roots };
            }
            i -= 1;
            if coords[i] < b {
                coords[i] += 1;
                break;
            }
            coords[i] = -b;
        }
    }
}

/// `10 * bound * rho`, at least 1.
pub fn default_max_steps(bound: u32, rho: usize) -> usize {
    (10 * bound as usize * rho).max(1)
}

/// Sign of `x.h` for positive classes `x`, `h`: which component of the positive cone `x` is in.
pub fn positive_cone_side(ns: &Lattice, x: &[BigInt], h: &[BigInt]) -> Result<Ordering> {
    if !ns.norm(x)?.is_positive() {
        return Err(Error::Precondition("x^2 must be positive".into()));
    }
    if !ns.norm(h)?.is_positive() {
        return Err(Error::Precondition("h^2 must be positive".into()));
    }
    let d = ns.pair(x, h)?;
    if d.is_zero() {
        return Err(Error::Assertion("x.h = 0 for positive x, h; NS is not hyperbolic".into()));
    }
    Ok(d.cmp(&BigInt::zero()))
}

/// `x - (2 x.delta / delta^2) delta`.
pub fn reflect(ns: &Lattice, delta: &[BigInt], x: &[BigInt]) -> Result<Vec<BigInt>> {
    let dd = ns.norm(delta)?;
    let xd = ns.pair(x, delta)?;
    let (f, r) = (BigInt::from(2) * xd).div_rem(&dd);
    if !r.is_zero() {
        return Err(Error::Precondition("reflection is not integral".into()));
    }
    Ok(x.iter().zip(delta).map(|(a, d)| a - &f * d).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChamberStep {
    Reflect(Vec<BigInt>),
    MinusOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberWalk {
    pub steps: Vec<ChamberStep>,
    pub image: Vec<BigInt>,
}

impl ChamberWalk {
    /// Applies the steps to `x` from scratch.
    pub fn replay(&self, ns: &Lattice, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut y = x.to_vec();
        for s in &self.steps {
            y = match s {
                ChamberStep::MinusOne => y.iter().map(|a| -a).collect(),
                ChamberStep::Reflect(d) => reflect(ns, d, &y)?,
            };
        }
        Ok(y)
    }
}

/// Moves a positive class `x` into the chamber `{y : y.delta >= 0 for all roots, y.h > 0}`
/// using reflections in the supplied roots and `-1`. The reference `h` must lie
/// in the closed chamber (`h.delta >= 0`).
///
/// Each step reflects in the root with the most negative pairing, ties going to
/// the lexicographically smallest root.
pub fn chamber_walk(
    ns: &Lattice,
    roots: &RootSet,
    x: &[BigInt],
    h: &[BigInt],
    max_steps: usize,
) -> Result<ChamberWalk> {
    if !ns.norm(x)?.is_positive() {
        return Err(Error::Precondition("x^2 must be positive".into()));
    }
    if !ns.norm(h)?.is_positive() {
        return Err(Error::Precondition("h^2 must be positive".into()));
    }
    // h may sit on a wall; y.h then stays constant across that reflection and
    // only the step budget bounds the walk.
    for r in roots.roots() {
        if ns.pair(r, h)?.is_negative() {
            return Err(Error::Precondition("h is not inside the chamber of the root set".into()));
        }
    }
    let mut y = x.to_vec();
    let mut steps = Vec::new();
    loop {
        let yh = ns.pair(&y, h)?;
        if yh.is_zero() {
            return Err(Error::Assertion("walk reached y.h = 0; NS is not hyperbolic".into()));
        }
        let step = if yh.is_negative() {
            Some(ChamberStep::MinusOne)
        } else {
            let mut best: Option<(BigInt, &Vec<BigInt>)> = None;
            for r in roots.roots() {
                let d = ns.pair(&y, r)?;
                if !d.is_negative() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((bd, br)) => d < *bd || (d == *bd && r < *br),
                };
                if better {
                    best = Some((d, r));
                }
            }
            best.map(|(_, r)| ChamberStep::Reflect(r.clone()))
        };
        let Some(step) = step else {
            return Ok(ChamberWalk { steps, image: y });
        };
        if steps.len() == max_steps {
            return Err(Error::BudgetExhausted(max_steps));
        }
        y = match &step {
            ChamberStep::MinusOne => y.iter().map(|a| -a).collect(),
            ChamberStep::Reflect(d) => reflect(ns, d, &y)?,
        };
        steps.push(step);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    /// The correcting transform, to be applied after the input.
    pub word: Transform,
    /// `word` after the input: fixes `(1,0,0)` and `(0,0,1)`.
    pub normalized: Transform,
    pub walk: ChamberWalk,
}

/// Normalises a transform fixing `(0,0,1)` so that it also fixes `(1,0,0)` and
/// its NS part sends `h` into the chamber of `roots`.
pub fn normalize(
    l: &MukaiLattice,
    phi: &Transform,
    roots: &RootSet,
    h: &[BigInt],
    max_steps: usize,
) -> Result<Normalization> {
    let point = l.point();
    if phi.apply(&point)? != point {
        return Err(Error::Precondition(
            "transform must fix (0,0,1); compose with shift first if it is negated".into(),
        ));
    }
    let u = phi.apply(&l.unit())?;
    let bb = l.ns().norm(&u.c1)?;
    if !u.r.is_one() || &u.s * 2 != bb {
        return Err(Error::Precondition(format!(
            "image of (1,0,0) is not of the form (1, b, b^2/2): r = {}, s = {}",
            u.r, u.s
        )));
    }
    let neg_b: Vec<BigInt> = u.c1.iter().map(|x| -x).collect();
    let mut word = line_bundle_twist(l, &neg_b)?;
    let aligned = word.compose(phi)?;
    let g_h = aligned.isometry().ns_block().mul_vec(h)?;
    let walk = chamber_walk(l.ns(), roots, &g_h, h, max_steps)?;
    for step in &walk.steps {
        let t = match step {
            ChamberStep::MinusOne => minus_one_pic(l),
            ChamberStep::Reflect(d) => ns_reflection(l, d)?,
        };
        word = t.compose(&word)?;
    }
    let normalized = word.compose(phi)?;
    Ok(Normalization { word, normalized, walk })
}
