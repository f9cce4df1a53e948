//! Precision-tracked numeric backend.
//!
//! Everything here is deterministic fixed-point arithmetic on `BigInt`
//! mantissas (value = m / 2^bits) with outward-rounded interval enclosures,
//! so every reported error bound is rigorous. Used for [`approx_cyclo`]
//! (complex evaluation of exact cyclotomic numbers) and for certified
//! root moduli of small characteristic polynomials.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclo::Cyclo;

/// Floor division by 2^k (num-bigint's shr already floors; keep a named
/// helper so the rounding direction is explicit at call sites).
fn shr_floor(m: &BigInt, k: u32) -> BigInt {
    m >> k
}

fn shr_ceil(m: &BigInt, k: u32) -> BigInt {
    -((-m) >> k)
}

/// Fixed-point real number m / 2^bits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Fx {
    m: BigInt,
    bits: u32,
}

impl Fx {
    fn zero(bits: u32) -> Self {
        Fx { m: BigInt::zero(), bits }
    }

    fn from_int(v: i64, bits: u32) -> Self {
        Fx { m: BigInt::from(v) << bits, bits }
    }

    fn from_ratio_floor(r: &BigRational, bits: u32) -> Self {
        let scaled = r * BigRational::from(BigInt::one() << bits);
        Fx { m: scaled.floor().to_integer(), bits }
    }

    fn from_ratio_ceil(r: &BigRational, bits: u32) -> Self {
        let scaled = r * BigRational::from(BigInt::one() << bits);
        Fx { m: scaled.ceil().to_integer(), bits }
    }

    fn to_ratio(&self) -> BigRational {
        BigRational::new(self.m.clone(), BigInt::one() << self.bits)
    }

    fn add(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.bits, o.bits);
        Fx { m: &self.m + &o.m, bits: self.bits }
    }

    fn sub(&self, o: &Fx) -> Fx {
        debug_assert_eq!(self.bits, o.bits);
        Fx { m: &self.m - &o.m, bits: self.bits }
    }

    fn neg(&self) -> Fx {
        Fx { m: -&self.m, bits: self.bits }
    }

    fn mul_floor(&self, o: &Fx) -> Fx {
        Fx { m: shr_floor(&(&self.m * &o.m), self.bits), bits: self.bits }
    }

    fn mul_ceil(&self, o: &Fx) -> Fx {
        Fx { m: shr_ceil(&(&self.m * &o.m), self.bits), bits: self.bits }
    }

    fn div_floor(&self, o: &Fx) -> Fx {
        assert!(!o.m.is_zero());
        let num: BigInt = &self.m << self.bits;
        let (q, r) = num_integer::Integer::div_mod_floor(&num, &o.m);
        let _ = r;
        Fx { m: q, bits: self.bits }
    }

    fn div_ceil(&self, o: &Fx) -> Fx {
        assert!(!o.m.is_zero());
        let num: BigInt = -(&self.m << self.bits);
        let (q, _) = num_integer::Integer::div_mod_floor(&num, &o.m);
        Fx { m: -q, bits: self.bits }
    }

    fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }
}

/// Certified real enclosure [lo, hi].
#[derive(Clone, Debug)]
pub(crate) struct Iv {
    lo: Fx,
    hi: Fx,
}

impl Iv {
    pub fn from_int(v: i64, bits: u32) -> Self {
        Iv { lo: Fx::from_int(v, bits), hi: Fx::from_int(v, bits) }
    }

    pub fn from_ratio(r: &BigRational, bits: u32) -> Self {
        Iv { lo: Fx::from_ratio_floor(r, bits), hi: Fx::from_ratio_ceil(r, bits) }
    }

    fn bits(&self) -> u32 {
        self.lo.bits
    }

    pub fn add(&self, o: &Iv) -> Iv {
        Iv { lo: self.lo.add(&o.lo), hi: self.hi.add(&o.hi) }
    }

    pub fn sub(&self, o: &Iv) -> Iv {
        Iv { lo: self.lo.sub(&o.hi), hi: self.hi.sub(&o.lo) }
    }

    pub fn neg(&self) -> Iv {
        Iv { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, o: &Iv) -> Iv {
        let cands_lo = [
            self.lo.mul_floor(&o.lo),
            self.lo.mul_floor(&o.hi),
            self.hi.mul_floor(&o.lo),
            self.hi.mul_floor(&o.hi),
        ];
        let cands_hi = [
            self.lo.mul_ceil(&o.lo),
            self.lo.mul_ceil(&o.hi),
            self.hi.mul_ceil(&o.lo),
            self.hi.mul_ceil(&o.hi),
        ];
        Iv {
            lo: cands_lo.iter().min().unwrap().clone(),
            hi: cands_hi.iter().max().unwrap().clone(),
        }
    }

    /// Division for denominators bounded away from zero.
    pub fn div(&self, o: &Iv) -> Iv {
        assert!(
            o.lo.m.sign() == o.hi.m.sign() && !o.lo.m.is_zero(),
            "interval division by an interval containing zero"
        );
        let cands_lo = [
            self.lo.div_floor(&o.lo),
            self.lo.div_floor(&o.hi),
            self.hi.div_floor(&o.lo),
            self.hi.div_floor(&o.hi),
        ];
        let cands_hi = [
            self.lo.div_ceil(&o.lo),
            self.lo.div_ceil(&o.hi),
            self.hi.div_ceil(&o.lo),
            self.hi.div_ceil(&o.hi),
        ];
        Iv {
            lo: cands_lo.iter().min().unwrap().clone(),
            hi: cands_hi.iter().max().unwrap().clone(),
        }
    }

    pub fn scale_pow2(&self, k: i32) -> Iv {
        if k >= 0 {
            Iv {
                lo: Fx { m: &self.lo.m << k as u32, bits: self.lo.bits },
                hi: Fx { m: &self.hi.m << k as u32, bits: self.hi.bits },
            }
        } else {
            Iv {
                lo: Fx { m: shr_floor(&self.lo.m, (-k) as u32), bits: self.lo.bits },
                hi: Fx { m: shr_ceil(&self.hi.m, (-k) as u32), bits: self.hi.bits },
            }
        }
    }

    /// Enclosure of sqrt for nonnegative intervals.
    pub fn sqrt(&self) -> Iv {
        assert!(!self.lo.is_negative(), "sqrt of an interval with negative part");
        let bits = self.bits();
        // sqrt(m / 2^b) = sqrt(m * 2^b) / 2^b
        let lo_arg: BigInt = &self.lo.m << bits;
        let hi_arg: BigInt = &self.hi.m << bits;
        let lo_root = lo_arg.sqrt(); // floor sqrt
        let mut hi_root = hi_arg.sqrt();
        if &hi_root * &hi_root < hi_arg {
            hi_root += 1;
        }
        Iv { lo: Fx { m: lo_root, bits }, hi: Fx { m: hi_root, bits } }
    }

    pub fn midpoint(&self) -> BigRational {
        (self.lo.to_ratio() + self.hi.to_ratio()) / BigRational::from(BigInt::from(2))
    }

    pub fn radius(&self) -> BigRational {
        (self.hi.to_ratio() - self.lo.to_ratio()) / BigRational::from(BigInt::from(2))
    }

    pub fn upper(&self) -> BigRational {
        self.hi.to_ratio()
    }

    pub fn lower(&self) -> BigRational {
        self.lo.to_ratio()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.m.is_positive() && !self.hi.m.is_negative()
    }
}

/// Enclosure of pi by Machin's formula with explicit tail bounds.
pub(crate) fn pi(bits: u32) -> Iv {
    // pi = 16 arctan(1/5) - 4 arctan(1/239)
    let a5 = arctan_inv(5, bits);
    let a239 = arctan_inv(239, bits);
    a5.scale_pow2(4).sub(&a239.scale_pow2(2))
}

/// Enclosure of arctan(1/x) for integer x >= 2 via the alternating series.
fn arctan_inv(x: i64, bits: u32) -> Iv {
    let guard = bits + 16;
    let mut term = BigRational::new(BigInt::one(), BigInt::from(x));
    let x2 = BigRational::from(BigInt::from(x * x));
    let mut acc = BigRational::zero();
    let mut k = 0u32;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << guard);
    let mut sign = BigRational::one();
    loop {
        let contrib = &term / BigRational::from(BigInt::from(2 * k as i64 + 1));
        acc += &sign * &contrib;
        term /= &x2;
        sign = -sign;
        k += 1;
        // alternating series: truncation error below first omitted term
        if &term / BigRational::from(BigInt::from(2 * k as i64 + 1)) < eps {
            break;
        }
    }
    let lo = Fx::from_ratio_floor(&(&acc - &eps), bits);
    let hi = Fx::from_ratio_ceil(&(&acc + &eps), bits);
    Iv { lo, hi }
}

/// Complex interval.
#[derive(Clone, Debug)]
pub(crate) struct CIv {
    pub re: Iv,
    pub im: Iv,
}

impl CIv {
    pub fn from_ratio(re: &BigRational, im: &BigRational, bits: u32) -> Self {
        CIv { re: Iv::from_ratio(re, bits), im: Iv::from_ratio(im, bits) }
    }

    pub fn zero(bits: u32) -> Self {
        CIv { re: Iv::from_int(0, bits), im: Iv::from_int(0, bits) }
    }

    pub fn one(bits: u32) -> Self {
        CIv { re: Iv::from_int(1, bits), im: Iv::from_int(0, bits) }
    }

    pub fn add(&self, o: &CIv) -> CIv {
        CIv { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CIv) -> CIv {
        CIv { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &CIv) -> CIv {
        let rr = self.re.mul(&o.re);
        let ii = self.im.mul(&o.im);
        let ri = self.re.mul(&o.im);
        let ir = self.im.mul(&o.re);
        CIv { re: rr.sub(&ii), im: ri.add(&ir) }
    }

    pub fn div(&self, o: &CIv) -> CIv {
        let den = o.re.mul(&o.re).add(&o.im.mul(&o.im));
        let num = self.mul(&CIv { re: o.re.clone(), im: o.im.neg() });
        CIv { re: num.re.div(&den), im: num.im.div(&den) }
    }

    pub fn abs(&self) -> Iv {
        let s = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        // clip tiny negative lower bounds produced by outward rounding
        let s = Iv {
            lo: if s.lo.is_negative() { Fx::zero(s.lo.bits) } else { s.lo },
            hi: s.hi,
        };
        s.sqrt()
    }

    pub fn scale(&self, r: &Iv) -> CIv {
        CIv { re: self.re.mul(r), im: self.im.mul(r) }
    }
}

/// sin and cos enclosures for theta = 2 pi j / n.
fn unit_root(n: u64, j: u64, bits: u32) -> CIv {
    let two_pi = pi(bits).scale_pow2(1);
    let frac = BigRational::new(BigInt::from(j), BigInt::from(n));
    let theta = two_pi.mul(&Iv::from_ratio(&frac, bits));
    // quadrant reduction: theta = k * pi/2 + r with r in [0, pi/2)
    let quarter = pi(bits).scale_pow2(-1);
    let approx = (frac * BigRational::from(BigInt::from(4))).floor().to_integer();
    let mut k: i64 = approx.to_i64().unwrap();
    let mut r = theta.sub(&quarter.mul(&Iv::from_int(k, bits)));
    // outward rounding can leave r slightly out of range; nudge k
    while r.lo.is_negative() {
        k -= 1;
        r = r.add(&quarter);
    }
    while r.lower() > quarter.upper() {
        k += 1;
        r = r.sub(&quarter);
    }
    let (s, c) = sin_cos_small(&r, bits);
    match k.rem_euclid(4) {
        0 => CIv { re: c, im: s },
        1 => CIv { re: s.neg(), im: c },
        2 => CIv { re: c.neg(), im: s.neg() },
        _ => CIv { re: s, im: c.neg() },
    }
}

/// Taylor enclosures of (sin r, cos r) for r in [0, pi/2 + eps].
fn sin_cos_small(r: &Iv, bits: u32) -> (Iv, Iv) {
    let mut sin = r.clone();
    let mut cos = Iv::from_int(1, bits);
    let r2 = r.mul(r);
    let mut term_s = r.clone();
    let mut term_c = Iv::from_int(1, bits);
    let mut k = 1u32;
    // alternating tail: error below the first omitted term, which the stop
    // condition keeps under 2^-(bits-2); widen by +/- 2^-(bits-2)
    let eps = Iv {
        lo: Fx { m: BigInt::from(-4), bits },
        hi: Fx { m: BigInt::from(4), bits },
    };
    loop {
        // next sin term: (-1)^k r^(2k+1)/(2k+1)!
        let denom_s = Iv::from_int((2 * k as i64) * (2 * k as i64 + 1), bits);
        term_s = term_s.mul(&r2).div(&denom_s);
        let denom_c = Iv::from_int((2 * k as i64 - 1) * (2 * k as i64), bits);
        term_c = term_c.mul(&r2).div(&denom_c);
        if k % 2 == 1 {
            sin = sin.sub(&term_s);
            cos = cos.sub(&term_c);
        } else {
            sin = sin.add(&term_s);
            cos = cos.add(&term_c);
        }
        k += 1;
        // stop when the next terms are below one ulp; widen by eps to cover
        // the alternating-series tail
        let small = term_s.upper().abs() < BigRational::new(BigInt::one(), BigInt::one() << (bits - 2))
            && term_c.upper().abs() < BigRational::new(BigInt::one(), BigInt::one() << (bits - 2));
        if small || k > bits {
            break;
        }
    }
    (sin.add(&eps), cos.add(&eps))
}

/// Table of enclosures of zeta_n^j for j = 0..n, built from one Taylor
/// evaluation and iterated interval multiplication.
pub(crate) fn unit_root_table(n: u64, bits: u32) -> Vec<CIv> {
    let base = unit_root(n, 1, bits);
    let mut out = Vec::with_capacity(n as usize);
    out.push(CIv::one(bits));
    for j in 1..n {
        let prev = out[(j - 1) as usize].clone();
        out.push(prev.mul(&base));
    }
    out
}

/// A complex approximation with a rigorous absolute error bound: the true
/// value lies within `err` of (re, im).
#[derive(Clone, Debug)]
pub struct ComplexApprox {
    pub re: BigRational,
    pub im: BigRational,
    pub err: BigRational,
}

impl ComplexApprox {
    /// |value| is within err of this midpoint modulus (coarse but rigorous:
    /// | |z| - |m| | <= |z - m|).
    pub fn abs_midpoint(&self) -> BigRational {
        // rational sqrt upper estimate via integer sqrt at 2^-120 granularity
        let s = &self.re * &self.re + &self.im * &self.im;
        rational_sqrt_approx(&s)
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        format!(
            "{}{}{}i (±{})",
            decimal_of(&self.re, digits),
            if self.im.is_negative() { " - " } else { " + " },
            decimal_of(&self.im.abs(), digits),
            decimal_of(&self.err, 3.min(digits)),
        )
    }
}

/// Decimal rendering with `digits` fractional digits, round-to-nearest.
pub fn decimal_of(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (r * BigRational::from(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let mag = scaled.magnitude().to_string();
    let mag = if mag.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (int_part, frac_part) = mag.split_at(mag.len() - digits as usize);
    if digits == 0 {
        format!("{}{}", if neg { "-" } else { "" }, int_part)
    } else {
        format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
    }
}

fn rational_sqrt_approx(s: &BigRational) -> BigRational {
    let shift = 240u32;
    let scaled = (s * BigRational::from(BigInt::one() << shift)).to_integer();
    if scaled.is_negative() {
        return BigRational::zero();
    }
    BigRational::new(scaled.sqrt(), BigInt::one() << (shift / 2))
}

/// Evaluate an exact cyclotomic number as a complex enclosure at exactly
/// `bits` of working precision (callers supply their own guard bits).
pub(crate) fn cyclo_enclosure(x: &Cyclo, bits: u32) -> CIv {
    let n = x.order();
    let table = unit_root_table(n, bits);
    let mut acc = CIv::zero(bits);
    for (j, c) in x.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let coef = Iv::from_ratio(c, bits);
        acc = acc.add(&table[j].scale(&coef));
    }
    acc
}

/// Certified upper bound on the complex absolute value of an exact
/// cyclotomic number.
pub fn cyclo_abs_upper(x: &Cyclo, bits: u32) -> BigRational {
    cyclo_enclosure(x, bits + 32).abs().upper()
}

/// Numeric-assisted integer extraction: when a value is known a priori to
/// be a rational integer (point counts), round its certified enclosure.
/// Returns None unless the enclosure pins one integer with error < 1/4.
/// Exact mode stays the default and the reference everywhere.
pub fn round_to_integer(x: &Cyclo, bits: u32) -> Option<BigInt> {
    let enc = cyclo_enclosure(x, bits + 32);
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if enc.im.lower() < -quarter.clone() || enc.im.upper() > quarter {
        return None;
    }
    let lo = enc.re.lower();
    let hi = enc.re.upper();
    if &hi - &lo > BigRational::new(BigInt::one(), BigInt::from(2)) {
        return None;
    }
    let mid = (lo + hi) / BigRational::from(BigInt::from(2));
    Some(mid.round().to_integer())
}

/// Complex evaluation of a cyclotomic number with a rigorous error bound.
/// Doubling `bits` at least halves the attainable error bound.
pub fn approx_cyclo(x: &Cyclo, bits: u32) -> ComplexApprox {
    assert!(bits >= 53, "precision below 53 bits is not supported");
    let enc = cyclo_enclosure(x, bits + 32);
    let err = {
        let r = enc.re.radius() + enc.im.radius();
        // add one ulp at the output precision for the midpoint rounding
        r + BigRational::new(BigInt::one(), BigInt::one() << bits)
    };
    ComplexApprox { re: enc.re.midpoint(), im: enc.im.midpoint(), err }
}

/// Certified moduli of all complex roots of the polynomial
/// c_0 + c_1 x + ... + c_k x^k (exact cyclotomic coefficients, c_k != 0):
/// returns per-root enclosures [lo, hi] of |root|.
///
/// Runs Durand-Kerner on fixed-point midpoints, then certifies each
/// approximation with Weierstrass disks: the disk around z_j of radius
/// k * |P(z_j) / (lc * prod_{i != j} (z_j - z_i))| contains a true root, and
/// pairwise disjoint disks isolate exactly one root each.
pub fn poly_root_moduli(coeffs: &[Cyclo], bits: u32) -> Result<Vec<(BigRational, BigRational)>, String> {
    let deg = coeffs.len() - 1;
    assert!(deg >= 1);
    let work = bits + 64;
    let cs: Vec<CIv> = coeffs.iter().map(|c| cyclo_enclosure(c, work)).collect();
    // midpoint copies for iteration
    let mid = |c: &CIv| {
        CIv::from_ratio(&c.re.midpoint(), &c.im.midpoint(), work)
    };
    let cm: Vec<CIv> = cs.iter().map(mid).collect();
    // initial guesses: scaled roots of unity off the real axis
    let table = unit_root_table((2 * deg + 1) as u64, work);
    let scale = Iv::from_ratio(&BigRational::new(BigInt::from(3), BigInt::from(2)), work);
    let mut z: Vec<CIv> = (0..deg).map(|j| table[j + 1].scale(&scale)).collect();
    let eval = |cfs: &[CIv], x: &CIv| {
        let mut acc = CIv::zero(work);
        for c in cfs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    };
    for _ in 0..200 {
        let mut moved = false;
        for j in 0..deg {
            let pz = eval(&cm, &z[j]);
            let mut den = cm[deg].clone();
            for i in 0..deg {
                if i != j {
                    den = den.mul(&z[j].sub(&z[i]));
                }
            }
            if den.abs().contains_zero() {
                return Err("Durand-Kerner denominator collapsed".into());
            }
            let w = pz.div(&den);
            let step = w.abs().upper();
            if step > BigRational::new(BigInt::one(), BigInt::one() << (bits + 8)) {
                moved = true;
            }
            let new_re = z[j].re.midpoint() - w.re.midpoint();
            let new_im = z[j].im.midpoint() - w.im.midpoint();
            z[j] = CIv::from_ratio(&new_re, &new_im, work);
        }
        if !moved {
            break;
        }
    }
    // certification with the interval coefficients
    let kq = BigRational::from(BigInt::from(deg as i64));
    let mut disks: Vec<(BigRational, BigRational)> = Vec::new(); // (|z| mid, radius bound)
    for j in 0..deg {
        let pz = eval(&cs, &z[j]);
        let mut den = cs[deg].clone();
        for i in 0..deg {
            if i != j {
                den = den.mul(&z[j].sub(&z[i]));
            }
        }
        if den.abs().contains_zero() {
            return Err("certification denominator not separated from zero".into());
        }
        let w_abs = pz.abs().div(&den.abs());
        let radius = &kq * w_abs.upper();
        let zabs = z[j].abs();
        disks.push((zabs.upper(), radius.clone()));
        // stash lower bound via pair ordering below
        let _ = zabs;
    }
    // disjointness check
    for a in 0..deg {
        for b in (a + 1)..deg {
            let dist = z[a].sub(&z[b]).abs().lower();
            if dist <= &disks[a].1 + &disks[b].1 {
                return Err("Weierstrass disks overlap; raise precision".into());
            }
        }
    }
    let mut out = Vec::new();
    for (j, (zu, r)) in disks.iter().enumerate() {
        let zl = z[j].abs().lower();
        let lo = (&zl - r).max(BigRational::zero());
        let hi = zu + r;
        out.push((lo, hi));
    }
    Ok(out)
}


#[cfg(test)]
mod gauss_abs_tests {
    use super::*;
    use crate::charsum::{gauss, Char};
    use crate::ffield::build_field;

    #[test]
    fn gauss_sum_modulus_brackets_sqrt_q() {
        // the certified enclosure of |g(eta)| straddles sqrt(q) for eta != eps
        let ctx = build_field(7, 1).unwrap();
        for k in 1..6 {
            let g = gauss(&Char::new(&ctx, k));
            let enc = cyclo_enclosure(&g, 128);
            let abs = enc.abs();
            let lo = abs.lower();
            let hi = abs.upper();
            // lo^2 <= 7 <= hi^2
            let seven = BigRational::from(BigInt::from(7));
            assert!(&lo * &lo <= seven, "k={}", k);
            assert!(&hi * &hi >= seven, "k={}", k);
            // and the bracket is tight
            assert!(&hi - &lo < BigRational::new(BigInt::one(), BigInt::one() << 100));
        }
    }
}
