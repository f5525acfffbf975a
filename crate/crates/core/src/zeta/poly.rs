//! Dense univariate polynomials over Q and a complex root finder.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficients in ascending degree, trailing zeros removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        RatPoly::new(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect(),
        )
    }

    pub fn monic(&self) -> RatPoly {
        match self.0.last() {
            Some(lead) => RatPoly(self.0.iter().map(|c| c / lead).collect()),
            None => self.clone(),
        }
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().unwrap();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / lead;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly::new(r)
    }

    pub fn div_exact(&self, d: &RatPoly) -> RatPoly {
        let dd = d.degree();
        let lead = d.0.last().unwrap();
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / lead;
            for (i, c) in d.0.iter().enumerate() {
                r[shift + i] -= &f * c;
            }
            q[shift] = f;
            r.pop();
        }
        debug_assert!(r.iter().all(Zero::is_zero));
        RatPoly::new(q)
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors, monic.
    pub fn squarefree_part(&self) -> RatPoly {
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).monic()
    }

    /// `p(c t)`.
    pub fn scale_argument(&self, c: &BigRational) -> RatPoly {
        let mut pow = BigRational::one();
        let mut out = Vec::with_capacity(self.0.len());
        for a in &self.0 {
            out.push(a * &pow);
            pow *= c;
        }
        RatPoly::new(out)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of a polynomial with floating coefficients (ascending), by
/// Aberth-Ehrlich iteration followed by Newton polishing.
pub fn complex_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let start = radius.min(2.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(start, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *zi);
            let step = p / dp;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    z
}
