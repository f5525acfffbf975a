//! Finite fields `F_q` and brute-force point counts of projective hypersurfaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, require_odd_prime};
use crate::error::{Error, Result};

/// Fields larger than this are refused.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;
/// Projective spaces with more points than this are refused by the enumerator.
pub const MAX_PROJECTIVE_POINTS: u64 = 50_000_000;

/// `F_p[x] / (m(x))`, elements encoded as base-`p` digit strings of their coefficients.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u64,
    k: u32,
    q: u64,
    /// Monic, ascending, length `k + 1`.
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            for (i, m) in modulus.iter().enumerate().take(k) {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + (p - c) * m % p) % p;
            }
            prod[d] = 0;
        }
    }
    prod.truncate(k);
    prod
}

/// Remainder of `a` by monic `d` over `F_p`.
fn poly_rem(a: &[u64], d: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dd = d.len() - 1;
    while r.len() > dd {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if c != 0 {
            for (i, m) in d.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - c) * m % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn digits(mut n: u64, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(n % p);
        n /= p;
    }
    out
}

/// Monic irreducibility by trial division by every monic polynomial of degree at most `k/2`.
pub fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let k = modulus.len() - 1;
    if k == 0 {
        return false;
    }
    for d in 1..=k / 2 {
        for n in 0..p.pow(d as u32) {
            let mut f = digits(n, p, d);
            f.push(1);
            if poly_rem(modulus, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GaloisField {
    /// `F_q`. With no modulus the lexicographically first monic irreducible of degree `k`
    /// (ascending digits, lowest coefficient varying fastest) is used.
    pub fn new(q: u64, modulus: Option<Vec<u64>>) -> Result<Self> {
        if q > MAX_FIELD_SIZE {
            return Err(Error::Precondition(format!("field size {q} exceeds {MAX_FIELD_SIZE}")));
        }
        let (p, k) = prime_power(q).ok_or_else(|| Error::NotPrime(format!("{q} is not a prime power")))?;
        require_odd_prime(&BigInt::from(p))?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 {
                    return Err(Error::Malformed(format!(
                        "modulus must have degree {k} ({} coefficients), got {}",
                        k + 1,
                        m.len()
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::Malformed(format!("modulus coefficients must lie in [0, {p})")));
                }
                if m[k as usize] != 1 {
                    return Err(Error::Malformed("modulus must be monic".into()));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::Malformed("modulus is reducible over F_p".into()));
                }
                m
            }
            None => (0..p.pow(k))
                .map(|n| {
                    let mut f = digits(n, p, k as usize);
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .expect("an irreducible polynomial of every degree exists"),
        };
        let mut field = GaloisField { p, k, q, modulus, exp: Vec::new(), log: Vec::new() };
        field.build_tables();
        Ok(field)
    }

    fn build_tables(&mut self) {
        let order = (self.q - 1) as usize;
        let k = self.k as usize;
        for g in 1..self.q {
            let gd = digits(g, self.p, k);
            let mut exp = Vec::with_capacity(order);
            let mut cur = digits(1, self.p, k);
            let mut seen_one = false;
            for i in 0..order {
                let idx = self.encode(&cur);
                if i > 0 && idx == 1 {
                    seen_one = true;
                    break;
                }
                exp.push(idx as u32);
                cur = poly_mul_mod(&cur, &gd, &self.modulus, self.p);
            }
            if !seen_one && exp.len() == order {
                let mut log = vec![0u32; self.q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }

    fn encode(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, c: &BigInt) -> u64 {
        c.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[e as usize] as u64
    }

    pub fn pow(&self, a: u64, n: u32) -> u64 {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let e = (self.log[a as usize] as u64 * n as u64) % (self.q - 1);
        self.exp[e as usize] as u64
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1 && is_prime(&BigInt::from(p))).then_some((p, k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigInt,
    pub exponents: Vec<u32>,
}

/// A homogeneous polynomial with integer coefficients in `x0 .. x{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface {
    nvars: usize,
    degree: u32,
    terms: Vec<Term>,
}

impl Hypersurface {
    pub fn new(nvars: usize, terms: Vec<Term>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Malformed("at least one variable is required".into()));
        }
        let terms: Vec<Term> = terms.into_iter().filter(|t| !t.coeff.is_zero()).collect();
        let Some(first) = terms.first() else {
            return Err(Error::Malformed("the zero polynomial does not define a hypersurface".into()));
        };
        let degree: u32 = first.exponents.iter().sum();
        for t in &terms {
            if t.exponents.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: t.exponents.len() });
            }
            let d: u32 = t.exponents.iter().sum();
            if d != degree {
                return Err(Error::Malformed(format!("not homogeneous: degrees {degree} and {d}")));
            }
        }
        if degree == 0 {
            return Err(Error::Malformed("constant polynomial".into()));
        }
        Ok(Hypersurface { nvars, degree, terms })
    }

    /// Fermat hypersurface `x0^d + ... + x{n-1}^d`.
    pub fn fermat(nvars: usize, degree: u32) -> Self {
        let terms = (0..nvars)
            .map(|i| {
                let mut e = vec![0; nvars];
                e[i] = degree;
                Term { coeff: BigInt::from(1), exponents: e }
            })
            .collect();
        Hypersurface::new(nvars, terms).expect("Fermat polynomials are homogeneous")
    }

    /// Parses sums of monomials such as `x0^4 + 2*x1^4 - x2*x3^3`.
    /// The variable count is the largest index plus one unless `nvars` is given.
    pub fn parse(s: &str, nvars: Option<usize>) -> Result<Self> {
        let bad = |m: &str| Error::Malformed(format!("equation: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut raw_terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            let after_caret = prev == Some('^');
            let first = prev.is_none();
            prev = Some(ch);
            if (ch == '+' || ch == '-') && !after_caret {
                if !first {
                    if cur.is_empty() {
                        return Err(bad("empty term"));
                    }
                    raw_terms.push((negative, std::mem::take(&mut cur)));
                }
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("trailing sign"));
        }
        raw_terms.push((negative, cur));

        let mut parsed: Vec<(BigInt, Vec<(usize, u32)>)> = Vec::new();
        let mut max_var = 0usize;
        for (neg, text) in raw_terms {
            let mut coeff = BigInt::from(1);
            let mut powers = Vec::new();
            for factor in text.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, exp) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (rest, 1),
                    };
                    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(bad("variables are written x0, x1, ..."));
                    }
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                    if idx >= 64 {
                        return Err(bad("variable index too large"));
                    }
                    max_var = max_var.max(idx + 1);
                    powers.push((idx, exp));
                } else {
                    if !factor.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(bad(&format!("unrecognised factor {factor:?}")));
                    }
                    coeff *= factor.parse::<BigInt>().map_err(|_| bad("bad coefficient"))?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            parsed.push((coeff, powers));
        }
        let n = nvars.unwrap_or(max_var);
        if n < max_var {
            return Err(bad("variable index exceeds the declared variable count"));
        }
        let mut terms: Vec<Term> = Vec::new();
        for (coeff, powers) in parsed {
            let mut e = vec![0u32; n];
            for (i, d) in powers {
                e[i] = e[i].checked_add(d).ok_or_else(|| bad("exponent overflow"))?;
            }
            match terms.iter_mut().find(|t| t.exponents == e) {
                Some(t) => t.coeff += coeff,
                None => terms.push(Term { coeff, exponents: e }),
            }
        }
        Hypersurface::new(n, terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn evaluate(&self, field: &GaloisField, coeffs: &[u64], x: &[u64]) -> u64 {
        let mut acc = 0;
        for (t, &c) in self.terms.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            let mut v = c;
            for (&xi, &e) in x.iter().zip(&t.exponents) {
                if e > 0 {
                    v = field.mul(v, field.pow(xi, e));
                    if v == 0 {
                        break;
                    }
                }
            }
            acc = field.add(acc, v);
        }
        acc
    }

    /// Number of points of the hypersurface in `P^{n-1}(F_q)`.
    pub fn count_points(&self, field: &GaloisField) -> Result<u64> {
        let q = field.size();
        let n = self.nvars as u32;
        let total = (BigInt::from(q).pow(n) - 1u32) / BigInt::from(q - 1);
        if total > BigInt::from(MAX_PROJECTIVE_POINTS) {
            return Err(Error::Precondition(format!("P^{}(F_{q}) has {total} points, too many", n - 1)));
        }
        let coeffs: Vec<u64> = self.terms.iter().map(|t| field.from_int(&t.coeff)).collect();
        let mut count = 0u64;
        let mut x = vec![0u64; self.nvars];
        for lead in 0..self.nvars {
            // representatives with x[..lead] = 0, x[lead] = 1
            for v in x.iter_mut() {
                *v = 0;
            }
            x[lead] = 1;
            let free = self.nvars - lead - 1;
            let combos = q.pow(free as u32);
            for c in 0..combos {
                let mut c = c;
                for v in x[lead + 1..].iter_mut() {
                    *v = c % q;
                    c /= q;
                }
                if self.evaluate(field, &coeffs, &x) == 0 {
                    count += 1;
                }
            }
        }
        Ok(count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceConsistency {
    /// `Tr(F^n | H^2) = #X(F_{q^n}) - 1 - q^{2n}` for `n = 1, 2, ...`.
    pub traces: Vec<BigInt>,
    /// `|Tr(F^n)| <= 22 q^n` for every `n`.
    pub weil_bounds: bool,
    /// `e_2 = (t_1^2 - t_2)/2` is an integer.
    pub second_coefficient_integral: bool,
    /// When `t_2 = 22 q^2` every eigenvalue is `±q`, forcing `t_1 = 22q mod 2q`.
    pub extremal_case: bool,
}

impl TraceConsistency {
    pub fn holds(&self) -> bool {
        self.weil_bounds && self.second_coefficient_integral && self.extremal_case
    }
}

/// Checks point counts of a K3 surface over `F_q, F_{q^2}, ...` against the shape
/// forced by a degree-22 Frobenius with eigenvalues of modulus `q`.
pub fn trace_consistency(q: &BigInt, counts: &[BigInt]) -> TraceConsistency {
    let traces: Vec<BigInt> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i + 1) as u32;
            c - 1 - Pow::pow(q, 2 * n)
        })
        .collect();
    let weil_bounds = traces.iter().enumerate().all(|(i, t)| t.abs() <= BigInt::from(22) * Pow::pow(q, (i + 1) as u32));
    let (mut integral, mut extremal) = (true, true);
    if traces.len() >= 2 {
        let (t1, t2) = (&traces[0], &traces[1]);
        integral = (t1 * t1 - t2).is_even();
        if *t2 == BigInt::from(22) * q * q {
            let two_q = q * 2;
            extremal = (t1 - BigInt::from(22) * q).is_multiple_of(&two_q);
        }
    }
    TraceConsistency { traces, weil_bounds, second_coefficient_integral: integral, extremal_case: extremal }
}
