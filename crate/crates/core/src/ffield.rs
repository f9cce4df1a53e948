//! Deterministic construction of finite fields F_{p^f}, their multiplicative
//! structure, and compatible towers F_q in F_{q^r}.
//!
//! Elements are indices 0..q encoding coefficient tuples in base p
//! (idx = sum c_i p^i against the canonical modulus). Every context carries
//! full exp/dlog tables, so multiplicative work is table lookups; this caps
//! usable field sizes at [`FIELD_BOUND`].
//!
//! Determinism: the modulus is the lexicographically smallest monic
//! irreducible polynomial of its degree (coefficients compared
//! low-degree-first) and the generator is the order-(q-1) element with the
//! lexicographically smallest coefficient tuple, so a field context is a
//! pure function of (p, f).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::arith::{factor, gcd, inv_mod};

/// Table-backed fields must satisfy q <= FIELD_BOUND (dlog table memory).
pub const FIELD_BOUND: u64 = 1 << 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field size {0} exceeds the enumeration bound {FIELD_BOUND}")]
    TooLarge(u64),
    #[error("no compatible generator found within the scan bound")]
    NoCompatibleGenerator,
    #[error("element is not in the image of the base field")]
    NotInBase,
    #[error("discrete log of zero is undefined")]
    DlogOfZero,
    #[error("element index {0} out of range")]
    BadElement(u64),
}

/// An element of a specific [`FieldCtx`], stored as its canonical index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(pub u64);

/// A concrete finite field with canonical generator and full dlog tables.
pub struct FieldCtx {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    /// Monic modulus, ascending coefficients, length f+1.
    pub modulus: Vec<u64>,
    /// Canonical generator of the multiplicative group.
    pub g: FieldElem,
    exp: Vec<u32>,
    dlog: Vec<u32>,
    trace: Vec<u32>,
    /// (dlog x, dlog(1-x)) for x not in {0, 1}; built on first use.
    pair_table: OnceLock<Vec<(u32, u32)>>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldCtx(p={}, f={}, q={}, g={})", self.p, self.f, self.q, self.g.0)
    }
}

fn digits(mut idx: u64, p: u64, f: u32) -> Vec<u64> {
    let mut out = vec![0u64; f as usize];
    for d in out.iter_mut() {
        *d = idx % p;
        idx /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0u64, |acc, &d| acc * p + d)
}

/// Scan position -> element index so that scanning j = 0.. enumerates
/// coefficient tuples (c_0, ..., c_{f-1}) in ascending lexicographic order.
fn lex_index(j: u64, p: u64, f: u32) -> u64 {
    let mut rem = j;
    let mut idx = 0u64;
    for i in (0..f).rev() {
        // c_i for the largest power position first
        let power = p.pow(i);
        let digit = rem / power;
        rem %= power;
        // digit here is c_{f-1-i} (leftmost tuple slot varies slowest)
        idx += digit * p.pow(f - 1 - i);
    }
    idx
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * f];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (f..2 * f).rev() {
        let c = prod[k];
        if c != 0 {
            prod[k] = 0;
            for i in 0..f {
                // subtract c * modulus * x^(k-f)
                let t = (c * modulus[i]) % p;
                let slot = k - f + i;
                prod[slot] = (prod[slot] + p * p - t) % p;
            }
        }
    }
    prod.truncate(f);
    prod
}

fn poly_pow_mod(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut acc = vec![0u64; f];
    acc[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, modulus, p);
        }
        b = poly_mul_mod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Remainder of a modulo b over F_p (b nonzero).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = poly_trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(*b.last().unwrap(), p).expect("leading coefficient invertible");
    let mut a = poly_trim(a.to_vec());
    while !poly_is_zero(&a) && a.len() - 1 >= db {
        let da = a.len() - 1;
        let c = a[da] * lead_inv % p;
        if c != 0 {
            for i in 0..=db {
                a[da - db + i] = (a[da - db + i] + p * p - c * b[i] % p) % p;
            }
        }
        a = poly_trim(a);
        if a.len() - 1 < db || (a.len() == 1 && a[0] == 0) {
            break;
        }
    }
    a
}

/// gcd of polynomials over F_p (monic output, or [0] for gcd(0,0)).
fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !poly_is_zero(&b) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if !poly_is_zero(&a) {
        let inv = inv_mod(*a.last().unwrap(), p).unwrap();
        for c in a.iter_mut() {
            *c = *c * inv % p;
        }
    }
    a
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    if f == 1 {
        return true;
    }
    // x^(p^f) == x mod m, and gcd(x^(p^(f/t)) - x, m) == 1 for prime t | f
    let x = {
        let mut v = vec![0u64; f as usize];
        if f >= 2 {
            v[1] = 1;
        }
        v
    };
    // frob_k = x^(p^k) computed iteratively
    let mut frob = x.clone();
    let mut frob_at = vec![x.clone()]; // frob_at[k] = x^(p^k)
    for _ in 0..f {
        frob = poly_pow_mod(&frob, p, m, p);
        frob_at.push(frob.clone());
    }
    // top condition
    let mut top = frob_at[f as usize].clone();
    top[1] = (top[1] + p - 1) % p;
    if !poly_is_zero(&top) {
        return false;
    }
    for (t, _) in factor(f as u64) {
        let k = f as u64 / t;
        let mut diff = frob_at[k as usize].clone();
        diff[1] = (diff[1] + p - 1) % p;
        if poly_is_zero(&diff) {
            return false;
        }
        let g = poly_gcd(&diff, m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FieldCtx {
    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Coefficient tuple of an element (ascending powers of the residue x).
    pub fn rep(&self, a: FieldElem) -> Vec<u64> {
        digits(a.0, self.p, self.f)
    }

    pub fn from_rep(&self, rep: &[u64]) -> FieldElem {
        let ds: Vec<u64> = rep.iter().map(|c| c % self.p).collect();
        FieldElem(undigits(&ds, self.p))
    }

    /// Prime-field literal (reduces mod p); only canonical for f = 1 but
    /// well-defined in general as the image of an integer.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn g_pow(&self, k: i64) -> FieldElem {
        let e = k.rem_euclid((self.q - 1) as i64) as usize;
        FieldElem(self.exp[e] as u64)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.f == 1 {
            return FieldElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, p) = (a.0, b.0, self.p);
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.f {
            out += (x % p + y % p) % p * mult;
            x /= p;
            y /= p;
            mult *= p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let (mut x, p) = (a.0, self.p);
        let mut out = 0u64;
        let mut mult = 1u64;
        for _ in 0..self.f {
            out += (p - x % p) % p * mult;
            x /= p;
            mult *= p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let e = (self.dlog[a.0 as usize] as u64 + self.dlog[b.0 as usize] as u64) % (self.q - 1);
        FieldElem(self.exp[e as usize] as u64)
    }

    pub fn inv(&self, a: FieldElem) -> FieldElem {
        assert!(a.0 != 0, "inverse of zero");
        let e = (self.q - 1 - self.dlog[a.0 as usize] as u64) % (self.q - 1);
        FieldElem(self.exp[e as usize] as u64)
    }

    pub fn pow(&self, a: FieldElem, e: i64) -> FieldElem {
        if a.0 == 0 {
            assert!(e > 0, "0^e needs e > 0");
            return FieldElem(0);
        }
        let k = (self.dlog[a.0 as usize] as i64 * (e % (self.q as i64 - 1))).rem_euclid(self.q as i64 - 1);
        FieldElem(self.exp[k as usize] as u64)
    }

    /// Discrete log base the canonical generator; 0 is a domain error.
    pub fn dlog(&self, a: FieldElem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DlogOfZero);
        }
        Ok(self.dlog[a.0 as usize] as u64)
    }

    pub(crate) fn dlog_u(&self, a: FieldElem) -> u64 {
        debug_assert!(a.0 != 0);
        self.dlog[a.0 as usize] as u64
    }

    pub(crate) fn exp_u(&self, k: u64) -> FieldElem {
        FieldElem(self.exp[(k % (self.q - 1)) as usize] as u64)
    }

    /// Absolute trace to the prime field, as an integer in [0, p).
    pub fn trace_to_prime(&self, a: FieldElem) -> u64 {
        self.trace[a.0 as usize] as u64
    }

    /// dlog pairs (dlog x, dlog(1 - x)) over x != 0, 1; the backbone of
    /// binary Jacobi sums.
    pub(crate) fn pair_table(&self) -> &[(u32, u32)] {
        self.pair_table.get_or_init(|| {
            let mut out = Vec::with_capacity(self.q as usize - 2);
            for x in 1..self.q {
                if x == 1 {
                    continue;
                }
                let one_minus = self.sub(FieldElem(1), FieldElem(x));
                debug_assert!(one_minus.0 != 0);
                out.push((self.dlog[x as usize], self.dlog[one_minus.0 as usize]));
            }
            out
        })
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    /// Structural identity of contexts (registry sharing makes pointer
    /// equality the common case).
    pub fn same(a: &FieldCtx, b: &FieldCtx) -> bool {
        std::ptr::eq(a, b) || (a.p == b.p && a.f == b.f && a.modulus == b.modulus && a.g == b.g)
    }
}

fn field_registry() -> &'static Mutex<HashMap<(u64, u32), Arc<FieldCtx>>> {
    static REG: OnceLock<Mutex<HashMap<(u64, u32), Arc<FieldCtx>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn tower_registry() -> &'static Mutex<HashMap<(u64, u32, u32), Arc<TowerMap>>> {
    static REG: OnceLock<Mutex<HashMap<(u64, u32, u32), Arc<TowerMap>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Build (or fetch the cached) canonical field F_{p^f}.
pub fn build_field(p: u64, f: u32) -> Result<Arc<FieldCtx>, FieldError> {
    if let Some(hit) = field_registry().lock().unwrap().get(&(p, f)) {
        return Ok(hit.clone());
    }
    let built = build_field_uncached(p, f)?;
    field_registry().lock().unwrap().insert((p, f), built.clone());
    Ok(built)
}

fn build_field_uncached(p: u64, f: u32) -> Result<Arc<FieldCtx>, FieldError> {
    if !crate::arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if f == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = p.checked_pow(f).filter(|&q| q <= FIELD_BOUND).ok_or_else(|| {
        FieldError::TooLarge(p.saturating_pow(f))
    })?;

    // canonical modulus: lexicographically smallest monic irreducible
    let mut modulus = None;
    for j in 0..p.pow(f) {
        let idx = lex_index(j, p, f);
        let mut m = digits(idx, p, f);
        m.push(1);
        if is_irreducible(&m, p) {
            modulus = Some(m);
            break;
        }
    }
    let modulus = modulus.expect("an irreducible polynomial of every degree exists");

    // canonical generator: lex-smallest coefficient tuple of full order
    let ord_factors: Vec<u64> = factor(q - 1).into_iter().map(|(pr, _)| pr).collect();
    let mut gen_rep = None;
    'cand: for j in 0..q {
        let idx = lex_index(j, p, f);
        if idx == 0 {
            continue;
        }
        let rep = digits(idx, p, f);
        if q > 2 {
            for &l in &ord_factors {
                let e = poly_pow_mod(&rep, (q - 1) / l, &modulus, p);
                if e[0] == 1 && e[1..].iter().all(|&c| c == 0) {
                    continue 'cand;
                }
            }
        }
        gen_rep = Some(rep);
        break;
    }
    let gen_rep = gen_rep.expect("multiplicative group of a finite field is cyclic");

    // exp / dlog tables
    let mut exp = vec![0u32; (q - 1) as usize];
    let mut dlog = vec![u32::MAX; q as usize];
    let mut cur = vec![0u64; f as usize];
    cur[0] = 1;
    for k in 0..(q - 1) as usize {
        let idx = undigits(&cur, p);
        exp[k] = idx as u32;
        dlog[idx as usize] = k as u32;
        cur = poly_mul_mod(&cur, &gen_rep, &modulus, p);
    }
    debug_assert_eq!(undigits(&cur, p), 1, "generator order must be exactly q-1");
    debug_assert!(dlog[1..].iter().all(|&v| v != u32::MAX || q == 1));

    // traces of basis monomials, then linear extension
    let mut basis_tr = vec![0u64; f as usize];
    for j in 0..f as usize {
        let mut xj = vec![0u64; f as usize];
        xj[j] = 1;
        let mut acc = 0u64;
        let mut fr = xj.clone();
        for _ in 0..f {
            acc = (acc + fr[0]) % p;
            if f > 1 {
                fr = poly_pow_mod(&fr, p, &modulus, p);
            }
        }
        // for f = 1 the loop adds x^j once, which is the trace
        basis_tr[j] = acc % p;
    }
    let mut trace = vec![0u32; q as usize];
    for idx in 0..q {
        let ds = digits(idx, p, f);
        let mut t = 0u64;
        for (c, b) in ds.iter().zip(basis_tr.iter()) {
            t = (t + c * b) % p;
        }
        trace[idx as usize] = t as u32;
    }

    Ok(Arc::new(FieldCtx {
        p,
        f,
        q,
        modulus,
        g: FieldElem(undigits(&gen_rep, p)),
        exp,
        dlog,
        trace,
        pair_table: OnceLock::new(),
    }))
}

/// Compatible tower F_q in F_{q^r}: the extension context's generator
/// g' satisfies g'^((q^r-1)/(q-1)) = embed(g).
pub struct TowerMap {
    pub base: Arc<FieldCtx>,
    pub ext: Arc<FieldCtx>,
    pub r: u32,
    embed: Vec<u32>,
    unembed: Vec<u32>, // ext idx -> base idx + 1, 0 if not in base image
}

impl TowerMap {
    pub fn embed(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.embed[a.0 as usize] as u64)
    }

    pub fn unembed(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        let v = self.unembed[a.0 as usize];
        if v == 0 {
            Err(FieldError::NotInBase)
        } else {
            Ok(FieldElem(v as u64 - 1))
        }
    }

    /// Relative norm to the base field: x -> x^((q^r-1)/(q-1)).
    pub fn norm(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        if x.0 >= self.ext.q {
            return Err(FieldError::BadElement(x.0));
        }
        if x.0 == 0 {
            return Ok(FieldElem(0));
        }
        let m = (self.ext.q - 1) / (self.base.q - 1);
        let y = self.ext.pow(x, m as i64);
        self.unembed(y)
    }
}

/// Build (or fetch the cached) compatible tower of relative degree r.
pub fn build_tower(base: &Arc<FieldCtx>, r: u32) -> Result<Arc<TowerMap>, FieldError> {
    let key = (base.p, base.f, r);
    if let Some(hit) = tower_registry().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let built = Arc::new(build_tower_uncached(base, r)?);
    tower_registry().lock().unwrap().insert(key, built.clone());
    Ok(built)
}

fn build_tower_uncached(base: &Arc<FieldCtx>, r: u32) -> Result<TowerMap, FieldError> {
    if r == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if r == 1 {
        let embed: Vec<u32> = (0..base.q as u32).collect();
        let unembed: Vec<u32> = (1..=base.q as u32).collect();
        return Ok(TowerMap { base: base.clone(), ext: base.clone(), r, embed, unembed });
    }
    let p = base.p;
    let big_f = base.f * r;
    let ext0 = build_field(p, big_f)?;
    let bq = ext0.q;

    // embedding: lex-first root of the base modulus inside the extension
    let mut root = None;
    for j in 0..bq {
        let idx = lex_index(j, p, big_f);
        let cand = FieldElem(idx);
        // Horner evaluation of base.modulus at cand
        let mut acc = FieldElem(0);
        for &c in base.modulus.iter().rev() {
            acc = ext0.mul(acc, cand);
            acc = ext0.add(acc, ext0.from_int(c as i64));
        }
        if acc.0 == 0 {
            root = Some(cand);
            break;
        }
    }
    let root = root.expect("base modulus splits in the extension");

    let mut embed = vec![0u32; base.q as usize];
    for a in 0..base.q {
        let ds = digits(a, p, base.f);
        let mut acc = FieldElem(0);
        for &c in ds.iter().rev() {
            acc = ext0.mul(acc, root);
            acc = ext0.add(acc, ext0.from_int(c as i64));
        }
        embed[a as usize] = acc.0 as u32;
    }

    // compatible generator: h^t with t = s^{-1} mod (q-1) adjusted until
    // coprime to q^r - 1, where h^((q^r-1)/(q-1)) = embed(g)^s
    let h = ext0.g;
    let m = (bq - 1) / (base.q - 1);
    let y = ext0.pow(h, m as i64);
    let eg = FieldElem(embed[base.g.0 as usize] as u64);
    let mut s = None;
    let mut cur = ext0.one();
    for k in 0..(base.q - 1) {
        if cur == y {
            s = Some(k);
            break;
        }
        cur = ext0.mul(cur, eg);
    }
    let s = s.expect("norm of a generator generates the base group");
    let s_inv = inv_mod(s % (base.q - 1), base.q - 1).ok_or(FieldError::NoCompatibleGenerator)?;
    let mut t = s_inv;
    let mut found = false;
    while t < bq - 1 {
        if gcd(t, bq - 1) == 1 {
            found = true;
            break;
        }
        t += base.q - 1;
    }
    if !found {
        return Err(FieldError::NoCompatibleGenerator);
    }
    let g_compat = ext0.pow(h, t as i64);

    // re-index exp/dlog for the compatible generator
    let mut exp = vec![0u32; (bq - 1) as usize];
    let mut dlog = vec![u32::MAX; bq as usize];
    let mut cur = ext0.one();
    for k in 0..(bq - 1) as usize {
        exp[k] = cur.0 as u32;
        dlog[cur.0 as usize] = k as u32;
        cur = ext0.mul(cur, g_compat);
    }
    assert_eq!(cur, ext0.one(), "compatible generator must have full order");

    let ext = Arc::new(FieldCtx {
        p,
        f: big_f,
        q: bq,
        modulus: ext0.modulus.clone(),
        g: g_compat,
        exp,
        dlog,
        trace: ext0.trace.clone(),
        pair_table: OnceLock::new(),
    });

    // defining property
    debug_assert_eq!(ext.pow(ext.g, m as i64).0, embed[base.g.0 as usize] as u64);

    let mut unembed = vec![0u32; bq as usize];
    for (a, &e) in embed.iter().enumerate() {
        unembed[e as usize] = a as u32 + 1;
    }

    Ok(TowerMap { base: base.clone(), ext, r, embed, unembed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f7_has_canonical_generator_3() {
        let f7 = build_field(7, 1).unwrap();
        assert_eq!(f7.g, FieldElem(3));
        // orbit of 3: 1, 3, 2, 6, 4, 5
        let orbit: Vec<u64> = (0..6).map(|k| f7.g_pow(k).0).collect();
        assert_eq!(orbit, vec![1, 3, 2, 6, 4, 5]);
        assert_eq!(f7.dlog(FieldElem(6)).unwrap(), 3); // 3^3 = 27 = 6 mod 7
        assert_eq!(f7.dlog(FieldElem(1)).unwrap(), 0);
        assert_eq!(f7.dlog(f7.g).unwrap(), 1);
        assert_eq!(f7.dlog(FieldElem(0)), Err(FieldError::DlogOfZero));
    }

    #[test]
    fn f2_trivial_group() {
        let f2 = build_field(2, 1).unwrap();
        assert_eq!(f2.q, 2);
        assert_eq!(f2.g, FieldElem(1));
    }

    #[test]
    fn f169_generator_has_full_order() {
        let f = build_field(13, 2).unwrap();
        assert_eq!(f.q, 169);
        // exhaustive order check
        let mut cur = f.one();
        for k in 1..169u64 {
            cur = f.mul(cur, f.g);
            if cur == f.one() {
                assert_eq!(k, 168, "generator order must be q-1");
            }
        }
        // canonical modulus for degree 2 over F_13 is 1 + 3x + x^2
        assert_eq!(f.modulus, vec![1, 3, 1]);
    }

    #[test]
    fn build_field_rejects_bad_input() {
        assert_eq!(build_field(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(build_field(7, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(build_field(2, 40).unwrap_err(), FieldError::TooLarge(_)));
    }

    #[test]
    fn dlog_is_homomorphism() {
        let f = build_field(3, 2).unwrap();
        for a in 1..f.q {
            for b in 1..f.q {
                let (ea, eb) = (FieldElem(a), FieldElem(b));
                let lhs = f.dlog(f.mul(ea, eb)).unwrap();
                let rhs = (f.dlog(ea).unwrap() + f.dlog(eb).unwrap()) % (f.q - 1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn tower_compatibility_f7_f49() {
        let f7 = build_field(7, 1).unwrap();
        let t = build_tower(&f7, 2).unwrap();
        assert_eq!(t.ext.q, 49);
        // g'^8 = embed(3)
        let m = 48 / 6;
        assert_eq!(t.ext.pow(t.ext.g, m), t.embed(f7.g));
        // norm of g_compat is g
        assert_eq!(t.norm(t.ext.g).unwrap(), f7.g);
        assert_eq!(t.norm(FieldElem(0)).unwrap(), FieldElem(0));
        // embed is a ring homomorphism
        for a in 0..7u64 {
            for b in 0..7u64 {
                let (ea, eb) = (FieldElem(a), FieldElem(b));
                assert_eq!(
                    t.embed(f7.mul(ea, eb)),
                    t.ext.mul(t.embed(ea), t.embed(eb))
                );
                assert_eq!(
                    t.embed(f7.add(ea, eb)),
                    t.ext.add(t.embed(ea), t.embed(eb))
                );
            }
        }
        // trace of an embedded base element is r * x mod p
        let one = t.embed(f7.one());
        assert_eq!(t.ext.trace_to_prime(one), 2);
    }

    #[test]
    fn tower_compatibility_f13_f169() {
        let f13 = build_field(13, 1).unwrap();
        let t = build_tower(&f13, 2).unwrap();
        let m = 168 / 12;
        assert_eq!(t.ext.pow(t.ext.g, m), t.embed(f13.g));
        // norm is multiplicative and surjective
        let mut seen = std::collections::HashSet::new();
        for a in 1..t.ext.q {
            let n = t.norm(FieldElem(a)).unwrap();
            seen.insert(n.0);
        }
        assert_eq!(seen.len() as u64, 12);
        // Frobenius contract: x^(q^r) = x
        for a in 0..t.ext.q {
            let x = FieldElem(a);
            let mut y = x;
            for _ in 0..t.r {
                y = t.ext.pow(y, 13);
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn identity_tower() {
        let f7 = build_field(7, 1).unwrap();
        let t = build_tower(&f7, 1).unwrap();
        assert_eq!(t.ext.g, f7.g);
        assert_eq!(t.embed(FieldElem(5)), FieldElem(5));
    }

    #[test]
    fn extension_fields_with_p2() {
        let f16 = build_field(2, 4).unwrap();
        assert_eq!(f16.q, 16);
        let mut cur = f16.one();
        let mut count = 0;
        loop {
            cur = f16.mul(cur, f16.g);
            count += 1;
            if cur == f16.one() {
                break;
            }
        }
        assert_eq!(count, 15);
    }
}
