//! Exact arithmetic in cyclotomic fields.
//!
//! The Gram matrix of a labelled graph has entries `-cos(pi/m)`, which live in
//! the cyclotomic field `Q(zeta_n)` whenever `2m` divides `n`: the value
//! `2 cos(pi/m)` is `zeta_n^k + zeta_n^(n-k)` for `k = n/(2m)`. Representing
//! elements as rational polynomials in `zeta_n` reduced modulo the cyclotomic
//! polynomial lets us decide whether a determinant is exactly zero — the case
//! floating point cannot settle — and, for nonzero values, determine the sign
//! by certified rational interval evaluation of cosines.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

pub type Rat = BigRational;

fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Dense rational polynomials, ascending coefficients.

fn poly_trim(p: &mut Vec<Rat>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    poly_trim(&mut out);
    out
}

/// Long division; returns `(quotient, remainder)`.
fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem: Vec<Rat> = a.to_vec();
    poly_trim(&mut rem);
    let mut bt = b.to_vec();
    poly_trim(&mut bt);
    assert!(!bt.is_empty(), "division by zero polynomial");
    let db = bt.len() - 1;
    let lead = bt[db].clone();
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - db];
    while rem.len() > db {
        let da = rem.len() - 1;
        let coef = &rem[da] / &lead;
        quot[da - db] = coef.clone();
        for i in 0..=db {
            let t = &bt[i] * &coef;
            rem[da - db + i] -= t;
        }
        poly_trim(&mut rem);
        if rem.len() <= db {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

/// The `n`-th cyclotomic polynomial, computed by dividing `x^n - 1` by the
/// cyclotomic polynomials of the proper divisors of `n`.
fn cyclotomic_poly(n: u32, memo: &mut BTreeMap<u32, Vec<Rat>>) -> Vec<Rat> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut poly = vec![Rat::zero(); n as usize + 1];
    poly[0] = -Rat::one();
    poly[n as usize] = Rat::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_poly(d, memo);
            let (q, r) = poly_divmod(&poly, &phi_d);
            assert!(r.is_empty(), "cyclotomic division must be exact");
            poly = q;
        }
    }
    memo.insert(n, poly.clone());
    poly
}

// ---------------------------------------------------------------------------
// Field elements.

/// An element of `Q(zeta_n)`, as a rational polynomial in `zeta_n` of degree
/// below `deg(Phi_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyc {
    coeffs: Vec<Rat>,
}

impl Cyc {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The field `Q(zeta_n)` with its reduction polynomial.
pub struct CyclotomicField {
    pub n: u32,
    phi: Vec<Rat>,
    deg: usize,
}

impl CyclotomicField {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1);
        let mut memo = BTreeMap::new();
        let phi = cyclotomic_poly(n, &mut memo);
        let deg = phi.len() - 1;
        CyclotomicField { n, phi, deg }
    }

    fn reduce(&self, mut p: Vec<Rat>) -> Cyc {
        poly_trim(&mut p);
        if p.len() > self.deg {
            let (_, r) = poly_divmod(&p, &self.phi);
            p = r;
        }
        p.resize(self.deg.max(1), Rat::zero());
        Cyc { coeffs: p }
    }

    pub fn zero(&self) -> Cyc {
        self.reduce(Vec::new())
    }

    pub fn one(&self) -> Cyc {
        self.from_rat(Rat::one())
    }

    pub fn from_rat(&self, q: Rat) -> Cyc {
        self.reduce(vec![q])
    }

    pub fn zeta_pow(&self, k: u32) -> Cyc {
        let k = (k % self.n) as usize;
        let mut p = vec![Rat::zero(); k + 1];
        p[k] = Rat::one();
        self.reduce(p)
    }

    /// `2 cos(pi/m) = zeta_n^(n/2m) + zeta_n^(n - n/2m)`; requires `2m | n`.
    pub fn two_cos_pi_over(&self, m: u32) -> Cyc {
        assert!(m >= 2 && self.n.is_multiple_of(2 * m), "2m must divide n");
        let k = self.n / (2 * m);
        self.add(&self.zeta_pow(k), &self.zeta_pow(self.n - k))
    }

    pub fn add(&self, a: &Cyc, b: &Cyc) -> Cyc {
        let mut out = a.coeffs.clone();
        for (i, c) in b.coeffs.iter().enumerate() {
            out[i] += c;
        }
        self.reduce(out)
    }

    pub fn sub(&self, a: &Cyc, b: &Cyc) -> Cyc {
        let mut out = a.coeffs.clone();
        for (i, c) in b.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        self.reduce(out)
    }

    pub fn neg(&self, a: &Cyc) -> Cyc {
        Cyc {
            coeffs: a.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, a: &Cyc, b: &Cyc) -> Cyc {
        self.reduce(poly_mul(&a.coeffs, &b.coeffs))
    }

    /// Multiplicative inverse by the extended Euclidean algorithm on
    /// polynomials; `None` for zero.
    pub fn inv(&self, a: &Cyc) -> Option<Cyc> {
        if a.is_zero() {
            return None;
        }
        // Invariants: r0 = s0 * a (mod phi), r1 = s1 * a (mod phi).
        let mut r0 = self.phi.clone();
        let mut r1 = a.coeffs.clone();
        poly_trim(&mut r1);
        let mut s0: Vec<Rat> = Vec::new();
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let qs1 = poly_mul(&q, &s1);
            let mut s2 = s0.clone();
            s2.resize(s2.len().max(qs1.len()), Rat::zero());
            for (i, c) in qs1.iter().enumerate() {
                s2[i] -= c;
            }
            poly_trim(&mut s2);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is now a nonzero constant gcd (phi is irreducible).
        assert_eq!(r0.len(), 1, "cyclotomic polynomial must be irreducible");
        let scale = r0[0].recip();
        Some(self.reduce(s0.into_iter().map(|c| c * &scale).collect()))
    }

    pub fn div(&self, a: &Cyc, b: &Cyc) -> Option<Cyc> {
        Some(self.mul(a, &self.inv(b)?))
    }

    /// Numeric value of an element assumed real (invariant under complex
    /// conjugation); the imaginary parts of the monomials cancel exactly, so
    /// only cosines are summed.
    fn eval_f64(&self, a: &Cyc) -> Option<f64> {
        let mut sum = 0.0;
        let mut scale = 0.0;
        for (k, c) in a.coeffs.iter().enumerate() {
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            let angle = 2.0 * std::f64::consts::PI * k as f64 / self.n as f64;
            sum += cf * angle.cos();
            scale += cf.abs();
        }
        // Conservative ambiguity margin for the float path.
        if sum.abs() > 1e-12 * (scale + 1.0) {
            Some(sum)
        } else {
            None
        }
    }

    /// Sign of a real element: `-1`, `0`, or `1`. Exact zero is decided
    /// symbolically; nonzero signs come from floats when safely away from
    /// zero, otherwise from certified rational interval evaluation.
    ///
    /// Panics if the value is nonzero yet smaller than the hardcoded interval
    /// precision (~1e-45), which does not occur at desk scale.
    pub fn sign_of_real(&self, a: &Cyc) -> i32 {
        if a.is_zero() {
            return 0;
        }
        if let Some(v) = self.eval_f64(a) {
            return if v > 0.0 { 1 } else { -1 };
        }
        let mut total = Interval::point(Rat::zero());
        for (k, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cosv = cos_two_pi_ratio(k as u32, self.n);
            total = total.add(&cosv.scale(c));
        }
        match total.sign() {
            Some(s) => s,
            None => panic!(
                "sign of nonzero cyclotomic element could not be resolved at interval precision"
            ),
        }
    }

    /// Determinant over the field by Gaussian elimination with pivoting.
    pub fn determinant(&self, mat: &[Vec<Cyc>]) -> Cyc {
        let k = mat.len();
        if k == 0 {
            return self.one();
        }
        let mut m: Vec<Vec<Cyc>> = mat.to_vec();
        let mut det = self.one();
        for col in 0..k {
            let pivot_row = match (col..k).find(|&r| !m[r][col].is_zero()) {
                Some(r) => r,
                None => return self.zero(),
            };
            if pivot_row != col {
                m.swap(pivot_row, col);
                det = self.neg(&det);
            }
            let pivot = m[col][col].clone();
            det = self.mul(&det, &pivot);
            let pivot_inv = self.inv(&pivot).expect("pivot is nonzero");
            for row in col + 1..k {
                if m[row][col].is_zero() {
                    continue;
                }
                let factor = self.mul(&m[row][col], &pivot_inv);
                for c in col..k {
                    let t = self.mul(&factor, &m[col][c]);
                    m[row][c] = self.sub(&m[row][c], &t);
                }
            }
        }
        det
    }
}

// ---------------------------------------------------------------------------
// Certified rational intervals for cos(2*pi*k/n).

#[derive(Debug, Clone)]
struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    fn point(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    fn mul(&self, other: &Interval) -> Interval {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    fn scale(&self, c: &Rat) -> Interval {
        if c.is_negative() {
            Interval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Interval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    fn widen(&self, eps: &Rat) -> Interval {
        Interval {
            lo: &self.lo - eps,
            hi: &self.hi + eps,
        }
    }

    fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }
}

/// Pi truncated to 60 decimal digits, as a certified rational interval.
fn pi_interval() -> Interval {
    let digits = "3141592653589793238462643383279502884197169399375105820974944";
    let num: BigInt = digits.parse().unwrap();
    let den = BigInt::from(10u8).pow(60);
    let lo = Rat::new(num.clone(), den.clone());
    let hi = Rat::new(num + BigInt::one(), den);
    Interval { lo, hi }
}

/// Taylor evaluation of cos on an interval `r` with `0 <= r < pi/2 + eps`,
/// via Horner in `y = r^2` plus an explicit tail bound.
fn cos_small(r: &Interval) -> Interval {
    const TERMS: i64 = 26;
    let y = r.mul(r);
    let mut acc = Interval::point(Rat::zero());
    let mut fact = Rat::one();
    // Coefficients from highest to lowest for Horner.
    let mut coeffs = Vec::new();
    for j in 0..TERMS {
        if j > 0 {
            fact *= rat(2 * j - 1) * rat(2 * j);
        }
        let c = if j % 2 == 0 {
            fact.recip()
        } else {
            -fact.recip()
        };
        coeffs.push(c);
    }
    for c in coeffs.iter().rev() {
        acc = acc.mul(&y).add(&Interval::point(c.clone()));
    }
    let tail = tail_bound(&y.hi, TERMS);
    acc.widen(&tail)
}

/// Same for sin, as `r * (Horner in r^2)`.
fn sin_small(r: &Interval) -> Interval {
    const TERMS: i64 = 26;
    let y = r.mul(r);
    let mut acc = Interval::point(Rat::zero());
    let mut fact = Rat::one();
    let mut coeffs = Vec::new();
    for j in 0..TERMS {
        if j > 0 {
            fact *= rat(2 * j) * rat(2 * j + 1);
        }
        let c = if j % 2 == 0 {
            fact.recip()
        } else {
            -fact.recip()
        };
        coeffs.push(c);
    }
    for c in coeffs.iter().rev() {
        acc = acc.mul(&y).add(&Interval::point(c.clone()));
    }
    let tail = tail_bound(&y.hi, TERMS);
    r.mul(&acc.widen(&tail))
}

/// `y^terms / (2*terms)!` dominates the omitted alternating tail once the
/// terms are decreasing, which holds here since `y <= 2.5 << (2*terms)^2`.
fn tail_bound(y_hi: &Rat, terms: i64) -> Rat {
    let mut bound = Rat::one();
    for _ in 0..terms {
        bound *= y_hi;
    }
    let mut fact = Rat::one();
    for j in 1..=(2 * terms) {
        fact *= rat(j);
    }
    bound / fact
}

/// Certified interval for `cos(2*pi*k/n)` with `0 <= k < n`: quadrant
/// reduction is exact (the quadrant index is the rational `4k/n` floored),
/// leaving a Taylor evaluation on `[0, pi/2)`.
fn cos_two_pi_ratio(k: u32, n: u32) -> Interval {
    let k = k % n;
    // x = 2*pi*k/n = q*(pi/2) + c*pi with exact rationals q, c.
    let q = (4 * k) / n;
    let c = Rat::new(BigInt::from(4 * k - q * n), BigInt::from(2 * n));
    let pi = pi_interval();
    let r = pi.scale(&c);
    match q % 4 {
        0 => cos_small(&r),
        1 => sin_small(&r).neg(),
        2 => cos_small(&r).neg(),
        _ => sin_small(&r),
    }
}
