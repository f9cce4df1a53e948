//! Pochhammer symbols and hypergeometric functions over finite fields.
//!
//! The hypergeometric sum runs over all q - 1 characters nu:
//!
//!   F(alphas; betas; lambda) = 1/(1-q) * sum_nu
//!       prod (alpha_i)_nu / prod (beta_j)_nu-circle * nu(lambda),
//!
//! with (alpha)_nu = g(alpha nu)/g(alpha). Only the balanced case
//! #alphas = #betas is supported (values then lie in Q(zeta_{q-1})).
//!
//! Two evaluation engines compute the same value: an exact one that works
//! in Z[zeta_{q-1}] through the binary-Jacobi factorization (small fields),
//! and the modular reconstruction engine of [`crate::modeval`] (large
//! fields). Tests pin them against each other.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::charsum::{
    delta, gauss_hist, inv_jtil_mul_into, inv_jtil_tuple_into, jtil_mul_into, jtil_tuple_into,
    Char, IdentityWitness, QVal,
};
use crate::cyclo::Cyclo;
use crate::ffield::{FieldCtx, FieldElem};
use crate::modeval::{evaluate_batch, GaussSumRequest};

/// Largest q - 1 evaluated by the exact in-ring engine; larger fields go
/// through modular reconstruction.
const EXACT_NU_SUM_MAX: u64 = 130;

/// Hypergeometric parameters: numerator and denominator character lists
/// over one field, of equal length.
#[derive(Clone, Debug)]
pub struct HGParams {
    pub ctx: Arc<FieldCtx>,
    pub alphas: Vec<Char>,
    pub betas: Vec<Char>,
}

impl HGParams {
    pub fn new(alphas: Vec<Char>, betas: Vec<Char>) -> Result<HGParams, String> {
        if alphas.is_empty() {
            return Err("need at least one upper parameter".into());
        }
        if alphas.len() != betas.len() {
            return Err(format!(
                "only balanced parameter lists are supported (got {} upper, {} lower)",
                alphas.len(),
                betas.len()
            ));
        }
        let ctx = alphas[0].ctx.clone();
        for c in alphas.iter().chain(betas.iter()) {
            if !FieldCtx::same(&c.ctx, &ctx) {
                return Err("parameters live over different fields".into());
            }
        }
        Ok(HGParams { ctx, alphas, betas })
    }

    fn alpha_exps(&self) -> Vec<u64> {
        self.alphas.iter().map(|c| c.k).collect()
    }

    fn beta_exps(&self) -> Vec<u64> {
        self.betas.iter().map(|c| c.k).collect()
    }
}

/// Pochhammer symbol (alpha)_nu = g(alpha nu) / g(alpha), exact in
/// Q(zeta_{p(q-1)}).
pub fn poch(alpha: &Char, nu: &Char) -> Cyclo {
    let ctx = &alpha.ctx;
    let n = ctx.q - 1;
    let a = alpha.k % n;
    let v = nu.k % n;
    let mut acc = QVal::one(ctx.p * n);
    acc.mul_hist(&gauss_hist(ctx, (a + v) % n));
    // 1/g(alpha) = alpha(-1) g(conj alpha) q^(delta(alpha) - 1)
    acc.mul_hist(&gauss_hist(ctx, (n - a) % n));
    acc.mul_root((a as i64 * minus_one_dlog(ctx)).rem_euclid(n as i64) * ctx.p as i64);
    acc.mul_qpow(delta(alpha) as i32 - 1);
    acc.into_cyclo(ctx.q)
}

/// Circled Pochhammer symbol (alpha)_nu-circle = q^(delta(alpha nu) -
/// delta(alpha)) (alpha)_nu.
pub fn poch_circ(alpha: &Char, nu: &Char) -> Cyclo {
    let base = poch(alpha, nu);
    let d = delta(&alpha.mul(nu)) as i32 - delta(alpha) as i32;
    scale_qpow(&base, alpha.ctx.q, d)
}

fn scale_qpow(x: &Cyclo, q: u64, e: i32) -> Cyclo {
    let mut r = BigRational::one();
    let qq = BigRational::from(BigInt::from(q));
    for _ in 0..e.abs() {
        if e > 0 {
            r *= &qq;
        } else {
            r /= &qq;
        }
    }
    x.scalar_mul(&r)
}

fn minus_one_dlog(ctx: &FieldCtx) -> i64 {
    let m1 = ctx.neg(ctx.one());
    ctx.dlog_u(m1) as i64
}

/// Pochhammer symbol as a division-free histogram value at order p(q-1).
fn poch_qval(ctx: &FieldCtx, a: u64, v: u64, circled: bool) -> QVal {
    let n = ctx.q - 1;
    let (a, v) = (a % n, v % n);
    let mut acc = QVal::one(ctx.p * n);
    acc.mul_hist(&gauss_hist(ctx, (a + v) % n));
    acc.mul_hist(&gauss_hist(ctx, (n - a) % n));
    acc.mul_root((a as i64 * minus_one_dlog(ctx)).rem_euclid(n as i64) * ctx.p as i64);
    let d = |e: u64| if e % n == 0 { 1i32 } else { 0 };
    acc.mul_qpow(d(a) - 1);
    if circled {
        acc.mul_qpow(d((a + v) % n) - d(a));
    }
    acc
}

/// Multiplication formula for Pochhammer symbols (plain and circled):
/// (alpha^m)_(nu^m) = prod_{i<m} (alpha phi_m^i)_nu * nu(m^m).
pub fn poch_multiplication(alpha: &Char, nu: &Char, m: u64) -> Result<IdentityWitness, String> {
    let ctx = &alpha.ctx;
    let n = ctx.q - 1;
    if m == 0 || n % m != 0 {
        return Err(format!("m = {} must divide q-1 = {}", m, n));
    }
    let step = n / m;
    let mm = ctx.pow(ctx.from_int(m as i64), m as i64);
    let scale_exp = nu.value_exp(mm).expect("m^m is a unit") * ctx.p as i64;
    let mut pass = true;
    for circled in [false, true] {
        let lhs = poch_qval(ctx, alpha.k * m % n, nu.k * m % n, circled);
        let mut rhs = QVal::one(ctx.p * n);
        for i in 0..m {
            rhs.mul(&poch_qval(ctx, (alpha.k + i * step) % n, nu.k, circled));
        }
        rhs.mul_root(scale_exp);
        if lhs.into_cyclo(ctx.q) != rhs.into_cyclo(ctx.q) {
            pass = false;
        }
    }
    Ok(IdentityWitness {
        name: format!("poch-mult q={} m={} a={} v={}", ctx.q, m, alpha.k, nu.k),
        pass,
        detail: String::new(),
    })
}

/// One hypergeometric term T_s = prod (alpha_i)_nu / prod (beta_j)_nu-circle
/// at nu = phi^s, built entirely inside Q(zeta_{q-1}) from the balanced
/// Gauss-quotient factorization.
pub(crate) fn term_exact(ctx: &FieldCtx, a_exps: &[u64], b_exps: &[u64], s: u64) -> QVal {
    let n = ctx.q - 1;
    let m = a_exps.len();
    let d = |e: u64| -> i32 {
        if e % n == 0 {
            1
        } else {
            0
        }
    };
    let cap_a: u64 = a_exps.iter().map(|&a| a % n).sum::<u64>() % n;
    let cap_b: u64 = b_exps.iter().map(|&b| b % n).sum::<u64>() % n;
    let shifted_a: Vec<u64> = a_exps.iter().map(|&a| (a + s) % n).collect();
    let shifted_b: Vec<u64> = b_exps.iter().map(|&b| (b + s) % n).collect();
    let mut t = QVal::one(n);
    jtil_tuple_into(ctx, &shifted_a, &mut t);
    jtil_tuple_into(ctx, &b_exps.iter().map(|&b| b % n).collect::<Vec<_>>(), &mut t);
    inv_jtil_tuple_into(ctx, &a_exps.iter().map(|&a| a % n).collect::<Vec<_>>(), &mut t);
    inv_jtil_tuple_into(ctx, &shifted_b, &mut t);
    let ams = (cap_a + (m as u64 % n) * (s % n)) % n;
    let bms = (cap_b + (m as u64 % n) * (s % n)) % n;
    jtil_mul_into(ctx, ams, cap_b, &mut t);
    inv_jtil_mul_into(ctx, cap_a, bms, &mut t);
    // explicit q powers from unpacking the circles
    let mut e = d(ams) + d(cap_b) - d(cap_a) - d(bms);
    for &b in b_exps {
        e += d(b);
    }
    for &b in &shifted_b {
        e -= d(b);
    }
    t.mul_qpow(e);
    t
}

fn hyper_f_exact(ctx: &Arc<FieldCtx>, a_exps: &[u64], b_exps: &[u64], lam: FieldElem) -> Cyclo {
    let n = ctx.q - 1;
    let lam_dlog = ctx.dlog_u(lam) as i64;
    let mut total = Cyclo::zero();
    for s in 0..n {
        let mut t = term_exact(ctx, a_exps, b_exps, s);
        t.mul_root((s as i64 * lam_dlog).rem_euclid(n as i64));
        total = total.add(&t.into_cyclo(ctx.q));
    }
    let scale = BigRational::new(BigInt::one(), BigInt::from(1i64) - BigInt::from(ctx.q));
    total.scalar_mul(&scale)
}

fn hyper_f_modular(ctx: &Arc<FieldCtx>, a_exps: &[u64], b_exps: &[u64], lam: FieldElem) -> Cyclo {
    let [req] = hyper_f_request(ctx, a_exps, b_exps, lam);
    let value = evaluate_batch(&[req]).pop().unwrap();
    let scale = BigRational::new(BigInt::one(), BigInt::from(1i64) - BigInt::from(ctx.q));
    value.scalar_mul(&scale)
}

/// The generic balanced request: value = sum_s T_s nu^s(lambda).
pub(crate) fn hyper_f_request(
    ctx: &Arc<FieldCtx>,
    a_exps: &[u64],
    b_exps: &[u64],
    lam: FieldElem,
) -> [GaussSumRequest; 1] {
    let n = ctx.q - 1;
    let m = a_exps.len() as i32;
    let mone = minus_one_dlog(ctx) as u64;
    let mut factors = Vec::with_capacity(4 * a_exps.len());
    let mut qexp = -2 * m;
    let mut c0: u64 = 0;
    for &a in a_exps {
        let a = a % n;
        factors.push((a, 1));
        factors.push(((n - a) % n, 0));
        if a == 0 {
            qexp += 1;
        }
        c0 = (c0 + a * mone) % n;
    }
    for &b in b_exps {
        let b = b % n;
        factors.push((b, 0));
        factors.push(((n - b) % n, n - 1));
        if b == 0 {
            qexp += 1;
        }
        c0 = (c0 + b * mone) % n;
    }
    let c1 = (ctx.dlog_u(lam) + (m as u64 % n) * mone) % n;
    [GaussSumRequest { ctx: ctx.clone(), factors, twist: (c0, c1), qexp }]
}

/// Hypergeometric function over F_q at lambda, exact. Every character
/// kills lambda = 0, so F(...; 0) = 0.
pub fn hyper_f(params: &HGParams, lam: FieldElem) -> Cyclo {
    if lam.0 == 0 {
        return Cyclo::zero();
    }
    hyper_f_exps(&params.ctx, &params.alpha_exps(), &params.beta_exps(), lam)
}

type HfKey = (u64, u32, u64, Vec<u64>, Vec<u64>, u64);

fn hf_cache() -> &'static std::sync::Mutex<std::collections::HashMap<HfKey, Cyclo>> {
    static CACHE: std::sync::OnceLock<std::sync::Mutex<std::collections::HashMap<HfKey, Cyclo>>> =
        std::sync::OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub(crate) fn hyper_f_exps(
    ctx: &Arc<FieldCtx>,
    a_exps: &[u64],
    b_exps: &[u64],
    lam: FieldElem,
) -> Cyclo {
    assert_eq!(a_exps.len(), b_exps.len());
    if lam.0 == 0 {
        return Cyclo::zero();
    }
    // the sum is symmetric in each parameter list: canonicalize for caching
    let n = ctx.q - 1;
    let mut a: Vec<u64> = a_exps.iter().map(|&x| x % n).collect();
    let mut b: Vec<u64> = b_exps.iter().map(|&x| x % n).collect();
    a.sort_unstable();
    b.sort_unstable();
    let key: HfKey = (ctx.p, ctx.f, ctx.g.0, a.clone(), b.clone(), lam.0);
    if let Some(hit) = hf_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let value = if n <= EXACT_NU_SUM_MAX {
        hyper_f_exact(ctx, &a, &b, lam)
    } else {
        hyper_f_modular(ctx, &a, &b, lam)
    };
    hf_cache().lock().unwrap().insert(key, value.clone());
    value
}

/// Remove the multiset intersection of the two parameter lists.
pub(crate) fn cancel_common(a_exps: &[u64], b_exps: &[u64], n: u64) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut b_left: Vec<u64> = b_exps.iter().map(|&b| b % n).collect();
    let mut common = Vec::new();
    let mut a_left = Vec::new();
    for &a in a_exps {
        let a = a % n;
        if let Some(pos) = b_left.iter().position(|&b| b == a) {
            b_left.remove(pos);
            common.push(a);
        } else {
            a_left.push(a);
        }
    }
    (a_left, b_left, common)
}

/// Reduced hypergeometric function: cancel common parameters, then require
/// the residual lists to be disjoint. An empty residual pair degenerates to
/// 1/(1-q) sum_nu nu(lambda).
pub fn hyper_f_reduced(params: &HGParams, lam: FieldElem) -> Result<Cyclo, String> {
    hyper_f_reduced_exps(
        &params.ctx,
        &params.alpha_exps(),
        &params.beta_exps(),
        lam,
    )
}

pub(crate) fn hyper_f_reduced_exps(
    ctx: &Arc<FieldCtx>,
    a_exps: &[u64],
    b_exps: &[u64],
    lam: FieldElem,
) -> Result<Cyclo, String> {
    let n = ctx.q - 1;
    let (a_left, b_left, _) = cancel_common(a_exps, b_exps, n);
    for a in &a_left {
        if b_left.contains(a) {
            return Err("residual parameter lists are not disjoint".into());
        }
    }
    if a_left.is_empty() {
        // 1/(1-q) sum_nu nu(lambda): -1 if lambda = 1, else 0 (0 for lambda = 0)
        if lam.0 == 0 {
            return Ok(Cyclo::zero());
        }
        return Ok(if lam == ctx.one() {
            Cyclo::from_int(-1)
        } else {
            Cyclo::zero()
        });
    }
    Ok(hyper_f_exps(ctx, &a_left, &b_left, lam))
}

/// Outcome of the reduction formula: F(full) = q^delta F(reduced) + remainder.
#[derive(Clone, Debug)]
pub struct ReduceOutcome {
    pub full: Cyclo,
    pub reduced: Cyclo,
    pub remainder: Cyclo,
    pub delta: u32,
    pub pass: bool,
}

/// The reduction formula with remainder: given disjoint short lists and
/// shared parameters c_1, ..., c_l (pairwise distinct), relate the full
/// hypergeometric sum to the reduced one. Exact on both sides.
pub fn reduce_with_remainder(
    alphas: &[Char],
    betas: &[Char],
    cs: &[Char],
    lam: FieldElem,
) -> Result<ReduceOutcome, String> {
    if alphas.len() != betas.len() {
        return Err("short lists must be balanced".into());
    }
    let ctx = if let Some(c) = alphas.first().or(cs.first()) {
        c.ctx.clone()
    } else {
        return Err("empty parameter lists".into());
    };
    let n = ctx.q - 1;
    for i in 0..cs.len() {
        for j in (i + 1)..cs.len() {
            if cs[i].k % n == cs[j].k % n {
                return Err("shared parameters must be pairwise distinct".into());
            }
        }
    }
    let a_short: Vec<u64> = alphas.iter().map(|c| c.k % n).collect();
    let b_short: Vec<u64> = betas.iter().map(|c| c.k % n).collect();
    for a in &a_short {
        if b_short.contains(a) {
            return Err("short lists must be disjoint".into());
        }
    }
    let c_exps: Vec<u64> = cs.iter().map(|c| c.k % n).collect();
    let delta_flag = if c_exps.iter().any(|&c| c == 0) { 1u32 } else { 0 };

    let full_a: Vec<u64> = a_short.iter().chain(c_exps.iter()).copied().collect();
    let full_b: Vec<u64> = b_short.iter().chain(c_exps.iter()).copied().collect();
    let full = if full_a.is_empty() {
        // no parameters at all: F = 1/(1-q) sum_nu nu(lambda)
        if lam.0 == 0 {
            Cyclo::zero()
        } else if lam == ctx.one() {
            Cyclo::from_int(-1)
        } else {
            Cyclo::zero()
        }
    } else {
        hyper_f_exps(&ctx, &full_a, &full_b, lam)
    };
    let reduced = if a_short.is_empty() {
        if lam.0 == 0 {
            Cyclo::zero()
        } else if lam == ctx.one() {
            Cyclo::from_int(-1)
        } else {
            Cyclo::zero()
        }
    } else {
        hyper_f_exps(&ctx, &a_short, &b_short, lam)
    };

    // remainder = q^delta/q * sum_j T(short lists at nu = c_j^{-1}) c_j^{-1}(lambda)
    let mut remainder = Cyclo::zero();
    if lam.0 != 0 {
        let lam_dlog = ctx.dlog_u(lam) as i64;
        for &c in &c_exps {
            let s = (n - c) % n;
            let mut t = if a_short.is_empty() {
                QVal::one(n)
            } else {
                term_exact_or_modular(&ctx, &a_short, &b_short, s)
            };
            t.mul_root((s as i64 * lam_dlog).rem_euclid(n as i64));
            remainder = remainder.add(&t.into_cyclo(ctx.q));
        }
        let mut scale = BigRational::new(BigInt::one(), BigInt::from(ctx.q));
        if delta_flag == 1 {
            scale *= BigRational::from(BigInt::from(ctx.q));
        }
        remainder = remainder.scalar_mul(&scale);
    }

    let rhs = scale_qpow(&reduced, ctx.q, delta_flag as i32).add(&remainder);
    let pass = full == rhs;
    Ok(ReduceOutcome { full, reduced, remainder, delta: delta_flag, pass })
}

/// Single-term evaluation, exact for any field size this artifact uses for
/// remainder terms (the term itself is a fixed product, not a nu-sweep).
fn term_exact_or_modular(ctx: &Arc<FieldCtx>, a_exps: &[u64], b_exps: &[u64], s: u64) -> QVal {
    term_exact(ctx, a_exps, b_exps, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsum::{char_of_order, gauss};
    use crate::ffield::build_field;

    fn f7() -> Arc<FieldCtx> {
        build_field(7, 1).unwrap()
    }

    #[test]
    fn poch_basics() {
        let ctx = f7();
        let eps = Char::trivial(&ctx);
        for k in 0..6 {
            let a = Char::new(&ctx, k);
            // (alpha)_eps = (alpha)_eps-circle = 1
            assert_eq!(poch(&a, &eps), Cyclo::one(), "k={}", k);
            assert_eq!(poch_circ(&a, &eps), Cyclo::one(), "k={}", k);
        }
        // (eps)_nu = g(nu)
        for v in 1..6 {
            let nu = Char::new(&ctx, v);
            assert_eq!(poch(&eps, &nu), gauss(&nu), "v={}", v);
        }
        // circled variant relation
        for k in 0..6 {
            for v in 0..6 {
                let a = Char::new(&ctx, k);
                let nu = Char::new(&ctx, v);
                let lhs = poch_circ(&a, &nu);
                let d = delta(&a.mul(&nu)) as i32 - delta(&a) as i32;
                let rhs = scale_qpow(&poch(&a, &nu), 7, d);
                assert_eq!(lhs, rhs, "k={} v={}", k, v);
            }
        }
    }

    #[test]
    fn poch_multiplication_sweep_f7() {
        let ctx = f7();
        for m in [1u64, 2, 3] {
            for a in 0..6 {
                for v in 0..6 {
                    let w = poch_multiplication(&Char::new(&ctx, a), &Char::new(&ctx, v), m).unwrap();
                    assert!(w.pass, "{}", w.name);
                }
            }
        }
    }

    #[test]
    fn one_f_zero_closed_form() {
        // F(alpha; eps; lambda) = alpha^{-1}(1 - lambda) for alpha != eps,
        // lambda != 0
        let ctx = f7();
        for k in 1..6i64 {
            for lam in 1..7u64 {
                let a = Char::new(&ctx, k);
                let params = HGParams::new(vec![a.clone()], vec![Char::trivial(&ctx)]).unwrap();
                let got = hyper_f(&params, FieldElem(lam));
                let one_minus = ctx.sub(ctx.one(), FieldElem(lam));
                let want = a.inv().eval(one_minus);
                assert_eq!(got, want, "k={} lam={}", k, lam);
            }
        }
        // pinned value: F(phi_2; eps; 3) over F_7 = phi_2(-2) = -1
        let phi2 = char_of_order(&ctx, 2).unwrap();
        let params = HGParams::new(vec![phi2], vec![Char::trivial(&ctx)]).unwrap();
        assert_eq!(hyper_f(&params, FieldElem(3)), Cyclo::from_int(-1));
    }

    #[test]
    fn hyper_f_at_zero_is_zero() {
        let ctx = f7();
        let phi3 = char_of_order(&ctx, 3).unwrap();
        let params = HGParams::new(vec![phi3.clone(), phi3.pow(2)], vec![Char::trivial(&ctx), phi3]).unwrap();
        assert!(hyper_f(&params, FieldElem(0)).is_zero());
    }

    #[test]
    fn exact_and_modular_engines_agree() {
        // q = 13 is beneath the exact threshold; force both engines
        let ctx = build_field(13, 1).unwrap();
        for (ae, be) in [
            (vec![3u64, 9], vec![0u64, 6]),
            (vec![1, 2], vec![0, 4]),
            (vec![4, 4, 4], vec![0, 3, 6]),
        ] {
            for lam in [2u64, 5, 11] {
                let x = hyper_f_exact(&ctx, &ae, &be, FieldElem(lam));
                let y = hyper_f_modular(&ctx, &ae, &be, FieldElem(lam));
                assert_eq!(x, y, "ae={:?} be={:?} lam={}", ae, be, lam);
            }
        }
    }

    #[test]
    fn reduced_equals_plain_when_nothing_cancels() {
        let ctx = f7();
        let phi3 = char_of_order(&ctx, 3).unwrap();
        let params = HGParams::new(vec![phi3.clone(), phi3.pow(2)], vec![Char::trivial(&ctx), phi3.pow(4)]).unwrap();
        // phi3^4 = phi3, which collides with the numerator phi3 -> cancels;
        // build a genuinely disjoint pair instead
        let p2 = HGParams::new(vec![Char::new(&ctx, 1), Char::new(&ctx, 5)], vec![Char::trivial(&ctx), Char::new(&ctx, 3)]).unwrap();
        for lam in 1..7u64 {
            assert_eq!(hyper_f_reduced(&p2, FieldElem(lam)).unwrap(), hyper_f(&p2, FieldElem(lam)));
        }
        let _ = params;
    }

    #[test]
    fn fully_cancelled_reduced_f() {
        // alphas a permutation of betas: F_red = 1/(1-q) sum nu(lambda):
        // -1 at lambda = 1, else 0
        let ctx = f7();
        let phi3 = char_of_order(&ctx, 3).unwrap();
        let alphas = vec![Char::trivial(&ctx), phi3.clone(), phi3.pow(2)];
        let betas = vec![phi3.pow(2), Char::trivial(&ctx), phi3.clone()];
        let params = HGParams::new(alphas, betas).unwrap();
        assert_eq!(hyper_f_reduced(&params, FieldElem(1)).unwrap(), Cyclo::from_int(-1));
        for lam in 2..7u64 {
            assert!(hyper_f_reduced(&params, FieldElem(lam)).unwrap().is_zero(), "lam={}", lam);
        }
    }

    #[test]
    fn reduction_formula_holds_f7() {
        let ctx = f7();
        // one shared c = eps, short lists disjoint
        let alphas = vec![Char::new(&ctx, 2)];
        let betas = vec![Char::new(&ctx, 3)];
        let cs = vec![Char::trivial(&ctx)];
        for lam in 1..7u64 {
            let out = reduce_with_remainder(&alphas, &betas, &cs, FieldElem(lam)).unwrap();
            assert!(out.pass, "lam={} full={} rhs-delta={}", lam, out.full, out.delta);
            assert_eq!(out.delta, 1);
        }
        // two shared nontrivial c's
        let cs2 = vec![Char::new(&ctx, 1), Char::new(&ctx, 4)];
        for lam in 1..7u64 {
            let out = reduce_with_remainder(&alphas, &betas, &cs2, FieldElem(lam)).unwrap();
            assert!(out.pass, "lam={}", lam);
            assert_eq!(out.delta, 0);
        }
        // l = 0: remainder 0, delta 0, full == reduced
        let out = reduce_with_remainder(&alphas, &betas, &[], FieldElem(3)).unwrap();
        assert!(out.pass);
        assert!(out.remainder.is_zero());
        assert_eq!(out.delta, 0);
        // repeated shared parameter rejected
        let bad = vec![Char::new(&ctx, 2), Char::new(&ctx, 2)];
        assert!(reduce_with_remainder(&alphas, &betas, &bad, FieldElem(3)).is_err());
    }

    #[test]
    fn reduction_sweep_with_eps_shared_f7() {
        // full sweep over disjoint singleton short lists with c = eps
        let ctx = f7();
        for a in 1..6u64 {
            for b in 1..6u64 {
                if a == b {
                    continue;
                }
                let alphas = vec![Char::new(&ctx, a as i64)];
                let betas = vec![Char::new(&ctx, b as i64)];
                let cs = vec![Char::trivial(&ctx)];
                for lam in 1..7u64 {
                    let out = reduce_with_remainder(&alphas, &betas, &cs, FieldElem(lam)).unwrap();
                    assert!(out.pass, "a={} b={} lam={}", a, b, lam);
                }
            }
        }
    }
}
