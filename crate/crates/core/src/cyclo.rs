//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! A [`Cyclo`] holds rational coordinates in the power basis
//! {1, zeta, ..., zeta^(phi(N)-1)} modulo the N-th cyclotomic polynomial, so
//! equality is decidable by coefficient comparison after lifting two values
//! to a common order. Heavy character-sum kernels do not work on `Cyclo`
//! directly; they accumulate integer exponent histograms ([`Hist`], one
//! signed weight per power of zeta_N) and reduce once at the end.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{euler_phi, lcm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycloError {
    #[error("value is not rational")]
    NotRational,
    #[error("value is not a rational integer")]
    NotIntegral,
    #[error("target order {target} is not a multiple of {have}")]
    BadOrderLift { have: u64, target: u64 },
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (ascending degree, monic) of the N-th cyclotomic polynomial,
/// computed by exact division of x^N - 1 by the proper-divisor cyclotomics.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    if let Some(hit) = cyclotomic_cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let result: Vec<BigInt> = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // x^n - 1
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::one();
        for d in crate::arith::divisors(n) {
            if d == n {
                continue;
            }
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
        num
    };
    let arc = Arc::new(result);
    cyclotomic_cache()
        .lock()
        .unwrap()
        .insert(n, arc.clone());
    arc
}

/// Exact division of integer polynomials (panics if not exact; internal use
/// on cyclotomic factors only).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let qd = num.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for i in 0..dd {
                rem[k + i] -= &c * &den[i];
            }
            rem[k + dd] = BigInt::zero();
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// In-place remainder of `v` modulo the N-th cyclotomic polynomial; truncates
/// to phi(N) coordinates. Generic over BigInt and BigRational coefficients.
fn reduce_mod_cyclotomic<T>(n: u64, v: &mut Vec<T>, phi: &[BigInt], lift: impl Fn(&BigInt) -> T)
where
    T: Clone + Zero + std::ops::SubAssign + std::ops::Mul<Output = T>,
{
    let deg = phi.len() - 1;
    let _ = n;
    while v.len() > deg {
        let k = v.len() - 1;
        let c = std::mem::replace(&mut v[k], T::zero());
        if !c.is_zero() {
            for i in 0..deg {
                let t = c.clone() * lift(&phi[i]);
                v[k - deg + i] -= t;
            }
        }
        v.pop();
    }
    v.resize(deg, T::zero());
}

/// An exact element of Q(zeta_N) in the power basis modulo Phi_N.
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u64,
    c: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { n: 1, c: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclo { n: 1, c: vec![BigRational::one()] }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclo { n: 1, c: vec![r] }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(k)))
    }

    pub fn from_bigint(k: BigInt) -> Self {
        Self::from_rational(BigRational::from(k))
    }

    /// zeta_N^k (k reduced mod N).
    pub fn root(n: u64, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = BigRational::one();
        let phi = cyclotomic_polynomial(n);
        reduce_mod_cyclotomic(n, &mut v, &phi, |b| BigRational::from(b.clone()));
        Cyclo { n, c: v }
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// Wrap coordinates already reduced modulo Phi_N (length phi(N)).
    pub(crate) fn from_reduced_coeffs(n: u64, c: Vec<BigRational>) -> Cyclo {
        debug_assert_eq!(c.len() as u64, euler_phi(n));
        Cyclo { n, c }
    }

    /// Same algebraic number in Q(zeta_M) for N | M.
    pub fn raise_order(&self, m: u64) -> Result<Cyclo, CycloError> {
        if m % self.n != 0 {
            return Err(CycloError::BadOrderLift { have: self.n, target: m });
        }
        if m == self.n {
            return Ok(self.clone());
        }
        let stride = (m / self.n) as usize;
        let mut v = vec![BigRational::zero(); self.c.len() * stride];
        for (j, coef) in self.c.iter().enumerate() {
            if !coef.is_zero() {
                v[j * stride] = coef.clone();
            }
        }
        let phi = cyclotomic_polynomial(m);
        reduce_mod_cyclotomic(m, &mut v, &phi, |b| BigRational::from(b.clone()));
        Ok(Cyclo { n: m, c: v })
    }

    fn lift_pair(&self, other: &Cyclo) -> (Cyclo, Cyclo) {
        let m = lcm(self.n, other.n);
        (self.raise_order(m).unwrap(), other.raise_order(m).unwrap())
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let (mut a, b) = self.lift_pair(other);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| -x.clone()).collect() }
    }

    pub fn scalar_mul(&self, r: &BigRational) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| x * r).collect() }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        let (a, b) = self.lift_pair(other);
        let n = a.n;
        let mut v = vec![BigRational::zero(); 2 * a.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                v[i + j] += x * y;
            }
        }
        let phi = cyclotomic_polynomial(n);
        reduce_mod_cyclotomic(n, &mut v, &phi, |c| BigRational::from(c.clone()));
        Cyclo { n, c: v }
    }

    pub fn pow(&self, e: u64) -> Cyclo {
        let mut acc = Cyclo::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Galois automorphism zeta -> zeta^s for gcd(s, N) = 1.
    pub fn galois(&self, s: u64) -> Cyclo {
        assert_eq!(crate::arith::gcd(s % self.n, self.n), 1, "galois exponent not coprime");
        let s = s % self.n;
        let mut v = vec![BigRational::zero(); self.n as usize];
        for (j, coef) in self.c.iter().enumerate() {
            if !coef.is_zero() {
                let e = (j as u64 * s % self.n) as usize;
                v[e] += coef;
            }
        }
        let phi = cyclotomic_polynomial(self.n);
        reduce_mod_cyclotomic(self.n, &mut v, &phi, |b| BigRational::from(b.clone()));
        Cyclo { n: self.n, c: v }
    }

    /// Complex conjugation zeta -> zeta^(-1).
    pub fn conj(&self) -> Cyclo {
        if self.n <= 2 {
            return self.clone();
        }
        self.galois(self.n - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Result<BigRational, CycloError> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Ok(self.c[0].clone())
        } else {
            Err(CycloError::NotRational)
        }
    }

    pub fn as_integer(&self) -> Result<BigInt, CycloError> {
        let r = self.as_rational().map_err(|_| CycloError::NotIntegral)?;
        if r.denom().is_one() {
            Ok(r.numer().clone())
        } else {
            Err(CycloError::NotIntegral)
        }
    }

    /// Largest absolute value among numerators/denominators, in bits; used
    /// for report formatting decisions only.
    pub fn coeff_bits(&self) -> u64 {
        self.c
            .iter()
            .map(|r| r.numer().bits().max(r.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.lift_pair(other);
        a.c == b.c
    }
}

impl Eq for Cyclo {}

impl std::fmt::Display for Cyclo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Ok(r) = self.as_rational() {
            return write!(f, "{}", r);
        }
        let mut first = true;
        for (j, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "z{}^{}", self.n, j)?;
            } else {
                write!(f, "({})*z{}^{}", c, self.n, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Integer exponent histogram: Sum v[k] * zeta_n^k, held unreduced modulo
/// x^n - 1. Products are cyclic convolutions over i128; `to_cyclo` reduces
/// to the canonical power basis. The l1 norm of every operand is checked
/// before a convolution so the i128 accumulation provably cannot overflow.
#[derive(Clone, Debug)]
pub(crate) struct Hist {
    pub n: u64,
    pub v: Vec<i128>,
}

impl Hist {
    pub fn new(n: u64) -> Self {
        Hist { n, v: vec![0i128; n as usize] }
    }

    pub fn delta(n: u64, exp: i64, w: i128) -> Self {
        let mut h = Hist::new(n);
        h.add_exp(exp, w);
        h
    }

    #[inline]
    pub fn add_exp(&mut self, exp: i64, w: i128) {
        let e = exp.rem_euclid(self.n as i64) as usize;
        self.v[e] += w;
    }

    pub fn l1(&self) -> u128 {
        self.v.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// Multiply by zeta^k.
    pub fn shift(&self, k: i64) -> Hist {
        let n = self.n as usize;
        let k = k.rem_euclid(self.n as i64) as usize;
        let mut out = Hist::new(self.n);
        for (i, &x) in self.v.iter().enumerate() {
            if x != 0 {
                out.v[(i + k) % n] = x;
            }
        }
        out
    }

    /// Cyclic convolution (ring product in Z[x]/(x^n - 1)).
    pub fn conv(&self, other: &Hist) -> Hist {
        assert_eq!(self.n, other.n);
        let la = self.l1();
        let lb = other.l1();
        assert!(
            la.checked_mul(lb).map_or(false, |m| m < (i128::MAX as u128) / 2),
            "histogram convolution would overflow the exact i128 path"
        );
        let n = self.n as usize;
        let mut out = vec![0i128; n];
        for (i, &x) in self.v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            // indices split so that i + j wraps at most once
            let split = n - i;
            for (j, &y) in other.v[..split].iter().enumerate() {
                out[i + j] += x * y;
            }
            for (j, &y) in other.v[split..].iter().enumerate() {
                out[j] += x * y;
            }
        }
        Hist { n: self.n, v: out }
    }

    /// Replace the vector by its reduction modulo Phi_n (same algebraic
    /// value, usually much smaller l1 norm). Requires the reduced
    /// coordinates to be integers that fit i128, which holds for the
    /// algebraic-integer chains this crate builds.
    pub fn compress(&mut self) {
        use num_traits::ToPrimitive;
        let c = self.to_cyclo();
        let mut v = vec![0i128; self.n as usize];
        for (i, coef) in c.coeffs().iter().enumerate() {
            debug_assert!(coef.denom().is_one());
            v[i] = coef
                .numer()
                .to_i128()
                .expect("compressed histogram coordinate exceeds i128");
        }
        self.v = v;
    }

    /// Reduce to the canonical power-basis representation. An i128 synthetic
    /// division covers the common case; any overflow risk falls back to
    /// BigInt arithmetic.
    pub fn to_cyclo(&self) -> Cyclo {
        let phi = cyclotomic_polynomial(self.n);
        if let Some(c) = self.try_reduce_i128(&phi) {
            return Cyclo { n: self.n, c };
        }
        let mut v: Vec<BigInt> = self.v.iter().map(|&x| BigInt::from(x)).collect();
        reduce_mod_cyclotomic(self.n, &mut v, &phi, |b| b.clone());
        Cyclo {
            n: self.n,
            c: v.into_iter().map(BigRational::from).collect(),
        }
    }

    fn try_reduce_i128(&self, phi: &[BigInt]) -> Option<Vec<BigRational>> {
        use num_traits::ToPrimitive;
        let deg = phi.len() - 1;
        let phi_small: Option<Vec<i128>> = phi.iter().map(|c| c.to_i128()).collect();
        let phi_small = phi_small?;
        let mut v = self.v.clone();
        for k in (deg..v.len()).rev() {
            let c = std::mem::replace(&mut v[k], 0);
            if c != 0 {
                for i in 0..deg {
                    let t = c.checked_mul(phi_small[i])?;
                    v[k - deg + i] = v[k - deg + i].checked_sub(t)?;
                }
            }
        }
        v.truncate(deg);
        v.resize(deg, 0);
        Some(v.into_iter().map(|x| BigRational::from(BigInt::from(x))).collect())
    }
}

/// Archimedean bound helpers for the modular reconstruction engine: largest
/// possible power-basis coefficient of an element of Z[zeta_N] all of whose
/// complex embeddings are bounded by M, as log2(D_N) with
/// ‖coeffs‖_inf <= D_N * M. Uses Hadamard's bound on the inverse of the
/// primitive-root Vandermonde together with disc(Phi_N).
pub fn log2_coeff_amplification(n: u64) -> f64 {
    let phi = euler_phi(n) as f64;
    if n == 1 {
        return 0.0;
    }
    // |disc(Phi_N)| = N^phi / prod_{p | N} p^(phi/(p-1))
    let mut log2_disc = phi * (n as f64).log2();
    for (p, _) in crate::arith::factor(n) {
        log2_disc -= phi / ((p - 1) as f64) * (p as f64).log2();
    }
    let bound = phi.log2() + (phi - 1.0) / 2.0 * phi.log2() - 0.5 * log2_disc;
    bound.max(0.0) + 2.0 // safety margin bits
}
