//! Diagonal hypersurfaces X_1^d + ... + X_n^d = d lambda X^h, their
//! character lattice, brute-force equivariant counting oracles, and the
//! closed-form counts (Jacobi-sum and hypergeometric routes).
//!
//! The twisted oracle counts projective fixed points of xi^{-1} F^r by
//! enumerating the mu-restricted search space: after normalizing the first
//! nonzero coordinate to 1, every other nonzero coordinate lies in
//! mu_{d(q^r-1)}, is determined by an exponent a with a = e_i - e_pivot
//! (mod d), and contributes x^d = g'^a in F_{q^r} — so all additive work
//! happens in the small extension field and F_{q^{rd}} never materializes.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::charsum::jacobi_by_exps;
use crate::cyclo::{Cyclo, Hist};
use crate::ffield::{build_tower, FieldCtx, FieldElem, FieldError, TowerMap};
use crate::hyperf::{hyper_f_exps, hyper_f_reduced_exps};
use crate::modeval::{evaluate_batch, GaussSumRequest};

/// Enumeration budgets: the plain oracle is capped by residual-table
/// lookups, the twisted oracle by candidate tuples. Overridable through
/// FFHYPER_PLAIN_BUDGET / FFHYPER_TWISTED_BUDGET.
pub const PLAIN_ORACLE_BUDGET: u64 = 2_000_000_000;
pub const TWISTED_ORACLE_BUDGET: u64 = 1_000_000_000;

fn env_budget(var: &str, default: u64) -> u64 {
    std::env::var(var).ok().and_then(|v| v.parse().ok()).unwrap_or(default)
}

pub fn plain_oracle_budget() -> u64 {
    env_budget("FFHYPER_PLAIN_BUDGET", PLAIN_ORACLE_BUDGET)
}

pub fn twisted_oracle_budget() -> u64 {
    env_budget("FFHYPER_TWISTED_BUDGET", TWISTED_ORACLE_BUDGET)
}

#[derive(Debug, Error)]
pub enum CountError {
    #[error("invalid surface: {0}")]
    BadSurface(String),
    #[error("enumeration budget exceeded: needs ~{0} operations")]
    Budget(u64),
    #[error("lambda = 0 surfaces use the Fermat branch")]
    LambdaZero,
    #[error("operation requires a Dwork surface (n = d, h = 1)")]
    NotDwork,
    #[error("field error: {0}")]
    Field(#[from] FieldError),
}

/// A diagonal hypersurface datum over a fixed base field.
#[derive(Clone)]
pub struct Surface {
    pub ctx: Arc<FieldCtx>,
    pub d: u64,
    pub n: usize,
    pub h: Vec<u64>,
    pub lambda: FieldElem,
}

impl std::fmt::Debug for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Surface(q={}, d={}, h={:?}, lambda={})",
            self.ctx.q, self.d, self.h, self.lambda.0
        )
    }
}

impl Surface {
    pub fn new(
        ctx: &Arc<FieldCtx>,
        d: u64,
        h: Vec<u64>,
        lambda: FieldElem,
    ) -> Result<Surface, CountError> {
        let n = h.len();
        if d < 2 || n < 2 {
            return Err(CountError::BadSurface("need d >= 2 and n >= 2".into()));
        }
        if h.iter().any(|&hi| hi == 0) {
            return Err(CountError::BadSurface("exponents h_i must be positive".into()));
        }
        if h.iter().sum::<u64>() != d {
            return Err(CountError::BadSurface("sum of h_i must equal d".into()));
        }
        let mut g = d;
        for &hi in &h {
            g = crate::arith::gcd(g, hi);
        }
        if g != 1 {
            return Err(CountError::BadSurface("gcd(d, h_1, ..., h_n) must be 1".into()));
        }
        if (ctx.q - 1) % d != 0 {
            return Err(CountError::BadSurface(format!(
                "d = {} must divide q - 1 = {}",
                d,
                ctx.q - 1
            )));
        }
        if lambda.0 >= ctx.q {
            return Err(CountError::BadSurface("lambda outside the base field".into()));
        }
        Ok(Surface { ctx: ctx.clone(), d, n, h, lambda })
    }

    /// Smoothness: (prod h_i^{h_i}) lambda^d != 1.
    pub fn is_smooth(&self) -> bool {
        if self.lambda.0 == 0 {
            return true;
        }
        let mut prod = self.ctx.one();
        for &hi in &self.h {
            let hi_el = self.ctx.from_int(hi as i64);
            prod = self.ctx.mul(prod, self.ctx.pow(hi_el, hi as i64));
        }
        prod = self.ctx.mul(prod, self.ctx.pow(self.lambda, self.d as i64));
        prod != self.ctx.one()
    }

    pub fn is_dwork(&self) -> bool {
        self.n as u64 == self.d && self.h.iter().all(|&hi| hi == 1)
    }

    /// Tower to F_{q^r} with the compatible generator, plus embedded lambda.
    pub fn ext(&self, r: u32) -> Result<(Arc<TowerMap>, FieldElem), CountError> {
        let tower = build_tower(&self.ctx, r)?;
        let lam = tower.embed(self.lambda);
        Ok((tower, lam))
    }
}

/// A character class: an element of W = {w : sum w_i = 0} modulo shifts
/// w -> w + m h, stored by its canonical (lexicographically least)
/// representative with entries in 0..d.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharClass {
    pub w: Vec<u64>,
}

impl CharClass {
    pub fn canonical(w: &[u64], d: u64, h: &[u64]) -> CharClass {
        let mut best: Option<Vec<u64>> = None;
        for m in 0..d {
            let cand: Vec<u64> = w.iter().zip(h.iter()).map(|(&wi, &hi)| (wi + m * hi) % d).collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        CharClass { w: best.unwrap() }
    }

    /// All full-lattice representatives w' with w' ~ w (the d shifts).
    pub fn members(&self, d: u64, h: &[u64]) -> Vec<Vec<u64>> {
        (0..d)
            .map(|m| self.w.iter().zip(h.iter()).map(|(&wi, &hi)| (wi + m * hi) % d).collect())
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    /// delta(w) = 1 iff some entry of the stored representative is 0.
    pub fn delta(&self) -> u32 {
        if self.w.iter().any(|&x| x == 0) {
            1
        } else {
            0
        }
    }

    /// If w ~ m h, return m.
    pub fn diagonal_shift(&self, d: u64, h: &[u64]) -> Option<u64> {
        'outer: for m in 0..d {
            for (wi, hi) in self.w.iter().zip(h.iter()) {
                if wi % d != (m * hi) % d {
                    continue 'outer;
                }
            }
            return Some(m);
        }
        None
    }
}

/// Enumerate the character classes of the surface's group action
/// (d^(n-2) classes).
pub fn classes(s: &Surface) -> Vec<CharClass> {
    let (d, n) = (s.d, s.n);
    let mut out = std::collections::BTreeSet::new();
    let mut w = vec![0u64; n];
    loop {
        let total: u64 = w.iter().sum();
        if total % d == 0 {
            out.insert(CharClass::canonical(&w, d, &s.h));
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                let out: Vec<CharClass> = out.into_iter().collect();
                debug_assert_eq!(out.len() as u64, d.pow(n as u32 - 2));
                return out;
            }
            w[i] += 1;
            if w[i] < d {
                break;
            }
            w[i] = 0;
            i += 1;
        }
    }
}

/// Coset representatives of the acting group G = {xi in mu_d^n : xi^h = 1}
/// modulo the diagonal, as exponent vectors.
fn group_reps(d: u64, n: usize, h: &[u64]) -> Vec<Vec<u64>> {
    let mut out = std::collections::BTreeSet::new();
    let mut e = vec![0u64; n];
    loop {
        let weight: u64 = e.iter().zip(h.iter()).map(|(&ei, &hi)| ei * hi).sum();
        if weight % d == 0 {
            // canonical representative modulo diagonal shifts
            let mut best: Option<Vec<u64>> = None;
            for m in 0..d {
                let cand: Vec<u64> = e.iter().map(|&ei| (ei + m) % d).collect();
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
            out.insert(best.unwrap());
        }
        let mut i = 0;
        loop {
            if i == n {
                let v: Vec<Vec<u64>> = out.into_iter().collect();
                debug_assert_eq!(v.len() as u64, d.pow(n as u32 - 2));
                return v;
            }
            e[i] += 1;
            if e[i] < d {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Full-group (lambda = 0 only) coset representatives: all of mu_d^n mod
/// diagonal.
fn full_group_reps(d: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = std::collections::BTreeSet::new();
    let mut e = vec![0u64; n];
    loop {
        let mut best: Option<Vec<u64>> = None;
        for m in 0..d {
            let cand: Vec<u64> = e.iter().map(|&ei| (ei + m) % d).collect();
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        out.insert(best.unwrap());
        let mut i = 0;
        loop {
            if i == n {
                return out.into_iter().collect();
            }
            e[i] += 1;
            if e[i] < d {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Count projective fixed points of xi^{-1} F^r on the surface via the
/// mu-restricted search space. `xi_exps` are exponents of zeta_d; when
/// `require_all_nonzero` the count is restricted to the torus part D*.
fn twisted_count(
    s: &Surface,
    r: u32,
    xi_exps: &[u64],
    require_all_nonzero: bool,
) -> Result<u64, CountError> {
    assert_eq!(xi_exps.len(), s.n);
    if s.lambda.0 != 0 {
        let weight: u64 = xi_exps.iter().zip(s.h.iter()).map(|(&e, &h)| e * h).sum();
        assert_eq!(weight % s.d, 0, "twist must fix the surface (xi^h = 1)");
    }
    let (tower, lam_r) = s.ext(r)?;
    let ext = &tower.ext;
    let nr = ext.q - 1;
    let d = s.d;
    let n = s.n;

    let est = (ext.q as f64).powi(n as i32 - 1) * 2.0;
    if est > twisted_oracle_budget() as f64 {
        return Err(CountError::Budget(est as u64));
    }

    // d*lambda in the extension
    let d_el = ext.from_int(d as i64);
    let dlam = ext.mul(d_el, lam_r);

    let mut total = 0u64;
    let last_pivot = if require_all_nonzero { 1 } else { n };
    for pivot in 0..last_pivot {
        // x_pivot = 1; twist classes for the later coordinates
        let cls: Vec<u64> = (0..n)
            .map(|i| (xi_exps[i] % d + d - xi_exps[pivot] % d) % d)
            .collect();
        // enumerate coordinates pivot+1 .. n-1
        let mut count = 0u64;
        // stack of (position, partial_sum, partial_h_exponent, any_zero)
        fn rec(
            ext: &FieldCtx,
            s: &Surface,
            cls: &[u64],
            pos: usize,
            sum: FieldElem,
            h_exp: u64,
            any_zero: bool,
            dlam: FieldElem,
            nr: u64,
            require_all_nonzero: bool,
            count: &mut u64,
        ) {
            let n = s.n;
            let d = s.d;
            if pos == n {
                if any_zero || dlam.0 == 0 {
                    // right-hand side vanishes
                    if (!require_all_nonzero || !any_zero) && sum.0 == 0 {
                        *count += 1;
                    }
                } else {
                    // x^h = g'^(h_exp / d); equation sum = d lam x^h
                    debug_assert_eq!(h_exp % d, 0);
                    let rhs = ext.mul(dlam, ext.exp_u(h_exp / d));
                    if sum == rhs {
                        *count += 1;
                    }
                }
                return;
            }
            // zero choice
            if !require_all_nonzero {
                rec(ext, s, cls, pos + 1, sum, h_exp, true, dlam, nr, require_all_nonzero, count);
            }
            // nonzero choices: a = cls[pos] + d k, u = g'^(a mod nr)
            let mut a = cls[pos];
            for _k in 0..nr {
                let u = ext.exp_u(a % nr);
                let new_sum = ext.add(sum, u);
                rec(
                    ext,
                    s,
                    cls,
                    pos + 1,
                    new_sum,
                    h_exp + s.h[pos] * a,
                    any_zero,
                    dlam,
                    nr,
                    require_all_nonzero,
                    count,
                );
                a += d;
            }
        }
        // pivot contributes x^d = 1 and h-exponent h_pivot * a_pivot with
        // a_pivot = 0; positions before pivot are zero
        let any_zero = pivot > 0;
        // pivot must be reachable: x_pivot = 1 needs class 0 mod d; with
        // a_pivot = 0 the class constraint at the pivot is cls[pivot] = 0
        if cls[pivot] % d != 0 {
            continue;
        }
        rec(
            ext,
            s,
            &cls,
            pivot + 1,
            ext.one(),
            0,
            any_zero,
            dlam,
            nr,
            require_all_nonzero,
            &mut count,
        );
        total += count;
    }
    Ok(total)
}

/// Plain projective point count over F_{q^r} by direct enumeration with a
/// per-coefficient residual root-count table.
pub fn oracle_count_plain(s: &Surface, r: u32) -> Result<u64, CountError> {
    let (tower, lam_r) = s.ext(r)?;
    let ext = &tower.ext;
    let qr = ext.q;
    let n = s.n;
    let d = s.d;

    let lookups = (qr as f64).powi(n as i32 - 2) * n as f64;
    if lookups > plain_oracle_budget() as f64 || (qr as f64) * (qr as f64) > 6.0e7 {
        return Err(CountError::Budget(lookups as u64));
    }

    // table[c][s] = #{x in F_{q^r} : x^d - c x^{h_n} = s}
    let hn = s.h[n - 1];
    let mut table = vec![0u32; (qr * qr) as usize];
    for x in 0..qr {
        let xe = FieldElem(x);
        let xd = if x == 0 { FieldElem(0) } else { ext.pow(xe, d as i64) };
        let xh = if x == 0 { FieldElem(0) } else { ext.pow(xe, hn as i64) };
        for c in 0..qr {
            let v = ext.sub(xd, ext.mul(FieldElem(c), xh));
            table[(c * qr + v.0) as usize] += 1;
        }
    }

    let d_el = ext.from_int(d as i64);
    let dlam = ext.mul(d_el, lam_r);

    let mut total = 0u64;
    for pivot in 0..n {
        if pivot == n - 1 {
            // point (0, ..., 0, 1): 1 = d lambda * 0 never holds
            continue;
        }
        // coordinates pivot+1 .. n-2 free; last coordinate via the table
        fn rec(
            ext: &FieldCtx,
            s: &Surface,
            pos: usize,
            sum: FieldElem,
            prod_h: FieldElem,
            dlam: FieldElem,
            table: &[u32],
            qr: u64,
            total: &mut u64,
        ) {
            let n = s.n;
            if pos == n - 1 {
                // x_last^d - c x_last^{h_n} = -sum, c = d lam * prod_h
                let c = ext.mul(dlam, prod_h);
                let target = ext.neg(sum);
                *total += table[(c.0 * qr + target.0) as usize] as u64;
                return;
            }
            for x in 0..qr {
                let xe = FieldElem(x);
                let xd = if x == 0 { FieldElem(0) } else { ext.pow(xe, s.d as i64) };
                let xh = if x == 0 {
                    FieldElem(0)
                } else {
                    ext.pow(xe, s.h[pos] as i64)
                };
                rec(
                    ext,
                    s,
                    pos + 1,
                    ext.add(sum, xd),
                    ext.mul(prod_h, xh),
                    dlam,
                    table,
                    qr,
                    total,
                );
            }
        }
        let prod0 = if pivot == 0 { ext.one() } else { FieldElem(0) };
        rec(ext, s, pivot + 1, ext.one(), prod0, dlam, &table, qr, &mut total);
    }
    Ok(total)
}

/// Twisted fixed-point count for xi in the acting group (exponent vector of
/// zeta_d); xi with xi^h != 1 is admitted only for lambda = 0.
pub fn oracle_count_twisted(s: &Surface, r: u32, xi_exps: &[u64]) -> Result<u64, CountError> {
    twisted_count(s, r, xi_exps, false)
}

/// All twisted fixed-point counts of a surface at level r, reusable across
/// character classes.
pub struct TwistTable {
    pub reps: Vec<Vec<u64>>,
    pub plain: Vec<u64>,
    pub starred: Vec<u64>,
}

pub fn twist_table(s: &Surface, r: u32) -> Result<TwistTable, CountError> {
    let reps = group_reps(s.d, s.n, &s.h);
    let mut plain = Vec::with_capacity(reps.len());
    let mut starred = Vec::with_capacity(reps.len());
    for e in &reps {
        plain.push(twisted_count(s, r, e, false)?);
        starred.push(twisted_count(s, r, e, true)?);
    }
    Ok(TwistTable { reps, plain, starred })
}

/// Character-weighted count N_r(D_lambda; chi^w) by the twisted oracle.
pub fn oracle_n(s: &Surface, r: u32, class: &CharClass) -> Result<Cyclo, CountError> {
    let table = twist_table(s, r)?;
    Ok(oracle_n_from(s, &table, class, false))
}

/// Torus-restricted analogue N_r(D*_lambda; chi^w).
pub fn oracle_n_star(s: &Surface, r: u32, class: &CharClass) -> Result<Cyclo, CountError> {
    let table = twist_table(s, r)?;
    Ok(oracle_n_from(s, &table, class, true))
}

pub fn oracle_n_from(s: &Surface, table: &TwistTable, class: &CharClass, starred: bool) -> Cyclo {
    let d = s.d;
    let counts = if starred { &table.starred } else { &table.plain };
    let mut hist = Hist::new(d);
    for (e, &lam) in table.reps.iter().zip(counts.iter()) {
        let weight: u64 = e.iter().zip(class.w.iter()).map(|(&ei, &wi)| ei * wi).sum();
        hist.add_exp((weight % d) as i64, lam as i128);
    }
    let size = BigInt::from(d).pow(s.n as u32 - 2);
    hist.to_cyclo().scalar_mul(&BigRational::new(BigInt::one(), size))
}

/// Full-lattice character count over the Fermat surface (lambda = 0):
/// N_r(D_0; chi_0^w) or the starred variant, by the twisted oracle over the
/// full group mu_d^n / diagonal.
pub fn oracle_n0_full(s: &Surface, r: u32, w: &[u64], starred: bool) -> Result<Cyclo, CountError> {
    assert_eq!(s.lambda.0, 0, "full-group counts require lambda = 0");
    let d = s.d;
    let reps = full_group_reps(d, s.n);
    let mut hist = Hist::new(d);
    for e in &reps {
        let lam = twisted_count(s, r, e, starred)?;
        let weight: u64 = e.iter().zip(w.iter()).map(|(&ei, &wi)| ei * wi).sum();
        hist.add_exp((weight % d) as i64, lam as i128);
    }
    let size = BigInt::from(d).pow(s.n as u32 - 1);
    Ok(hist.to_cyclo().scalar_mul(&BigRational::new(BigInt::one(), size)))
}

/// True Jacobi sum j(phi_d^{w_1}, ..., phi_d^{w_n}) over the base field,
/// raised to the r-th power (the Davenport-Hasse lift rule).
pub(crate) fn true_j_pow(ctx: &Arc<FieldCtx>, d: u64, w: &[u64], r: u32) -> Cyclo {
    let l = (ctx.q - 1) / d;
    let exps: Vec<u64> = w.iter().map(|&wi| (wi % d) * l).collect();
    debug_assert!(exps.iter().any(|&e| e % (ctx.q - 1) != 0));
    jacobi_by_exps(ctx, &exps).pow(r as u64)
}

/// Both closed-form routes to N_r(D*_lambda; chi^w).
#[derive(Clone, Debug)]
pub struct NStarValue {
    pub value: Cyclo,
    pub jacobi_route: Cyclo,
    pub hyper: Option<Cyclo>,
}

/// The Jacobi-sum sweep route and (when d h_i | q^r - 1) the hypergeometric
/// route to the torus count, with exact agreement enforced.
pub fn formula_n_star(s: &Surface, class: &CharClass, r: u32) -> Result<NStarValue, CountError> {
    if s.lambda.0 == 0 {
        return Err(CountError::LambdaZero);
    }
    let (tower, lam_r) = s.ext(r)?;
    let ext = &tower.ext;
    let jacobi_route = jacobi_route_n_star(s, class, ext, lam_r)?;
    let hyper = if s.h.iter().all(|&hi| (ext.q - 1) % (s.d * hi) == 0) {
        Some(hyper_route_n_star(s, class, r, ext, lam_r)?)
    } else {
        None
    };
    if let Some(h) = &hyper {
        assert_eq!(
            &jacobi_route, h,
            "Jacobi-sum and hypergeometric routes disagree (q={} w={:?} r={})",
            s.ctx.q, class.w, r
        );
    }
    Ok(NStarValue { value: jacobi_route.clone(), jacobi_route, hyper })
}

/// N*_r = (-1)^n/(1-q^r) * sum_nu j(phi_d^{w_1} nu^{h_1}, ...) nu^d(d lambda).
fn jacobi_route_n_star(
    s: &Surface,
    class: &CharClass,
    ext: &Arc<FieldCtx>,
    lam_r: FieldElem,
) -> Result<Cyclo, CountError> {
    let nr = ext.q - 1;
    let d = s.d;
    let l = nr / d;
    let n = s.n;
    let dlam = ext.mul(ext.from_int(d as i64), lam_r);
    let dlam_dlog = ext.dlog_u(dlam);
    let sum = if nr <= 130 {
        let mut acc = Cyclo::zero();
        for snu in 0..nr {
            let exps: Vec<u64> = (0..n)
                .map(|i| (class.w[i] % d * l + s.h[i] * snu) % nr)
                .collect();
            let j = jacobi_by_exps(ext, &exps);
            let tw = Cyclo::root(nr, ((snu as u128 * (d as u128 * dlam_dlog as u128) % nr as u128) % nr as u128) as i64);
            acc = acc.add(&j.mul(&tw));
        }
        acc
    } else {
        // modular sweep with the division 1/g-circle(nu^d) expanded uniformly
        let mone = minus_one_dlog_of(ext);
        let mut factors: Vec<(u64, u64)> = (0..n)
            .map(|i| ((class.w[i] % d * l) % nr, s.h[i] % nr))
            .collect();
        factors.push((0, (nr - d % nr) % nr));
        let c1 = ((d as u128 * ((dlam_dlog + mone) as u128)) % nr as u128) as u64;
        let req = GaussSumRequest { ctx: ext.clone(), factors, twist: (0, c1), qexp: -1 };
        let mut val = evaluate_batch(&[req]).pop().unwrap();
        // the all-trivial tuple (w ~ mh at nu = phi_d^{-m}) used jtil's 1/q
        // instead of the true (1 - (1-q)^n)/q
        if let Some(m) = class.diagonal_shift(d, &s.h) {
            let s0 = (l * ((d - m) % d)) % nr;
            let qr = BigInt::from(ext.q);
            let true_j = (BigInt::one() - (BigInt::one() - &qr).pow(n as u32)) / &qr;
            let delta = Cyclo::from_rational(
                BigRational::from(true_j) - BigRational::new(BigInt::one(), qr),
            );
            let tw = Cyclo::root(nr, ((s0 as u128 * c1 as u128) % nr as u128) as i64);
            val = val.add(&delta.mul(&tw));
        }
        val
    };
    let sign = if n % 2 == 0 { 1i64 } else { -1 };
    let scale = BigRational::new(
        BigInt::from(sign),
        BigInt::one() - BigInt::from(ext.q),
    );
    Ok(sum.scalar_mul(&scale))
}

fn minus_one_dlog_of(ctx: &FieldCtx) -> u64 {
    let m1 = ctx.neg(ctx.one());
    ctx.dlog_u(m1)
}

/// Upper-parameter exponents of F^w over the given extension context.
pub(crate) fn fw_alpha_exps(s: &Surface, ext: &FieldCtx, w: &[u64]) -> Vec<u64> {
    let d = s.d;
    let nr = ext.q - 1;
    let mut out = Vec::new();
    for (i, &hi) in s.h.iter().enumerate() {
        for k in 0..hi {
            out.push(((w[i] % d + d * k) * (nr / (d * hi))) % nr);
        }
    }
    out
}

fn fw_beta_exps(d: u64, nr: u64) -> Vec<u64> {
    (0..d).map(|j| j * (nr / d)).collect()
}

/// F^w(lambda) over F_{q^r}: the hypergeometric function with the parameter
/// scheme of the diagonal surface, evaluated at (prod h_i^{h_i}) lambda^d.
pub(crate) fn fw_value(
    s: &Surface,
    w: &[u64],
    ext: &Arc<FieldCtx>,
    lam_r: FieldElem,
) -> Cyclo {
    let nr = ext.q - 1;
    let alphas = fw_alpha_exps(s, ext, w);
    let betas = fw_beta_exps(s.d, nr);
    let z = fw_argument(s, ext, lam_r);
    hyper_f_exps(ext, &alphas, &betas, z)
}

fn fw_argument(s: &Surface, ext: &Arc<FieldCtx>, lam_r: FieldElem) -> FieldElem {
    let mut z = ext.pow(lam_r, s.d as i64);
    for &hi in &s.h {
        let hi_el = ext.from_int(hi as i64);
        z = ext.mul(z, ext.pow(hi_el, hi as i64));
    }
    z
}

/// Hypergeometric route to the torus count: a Jacobi-sum prefactor times
/// F^w, with the diagonal-shift corrections.
fn hyper_route_n_star(
    s: &Surface,
    class: &CharClass,
    r: u32,
    ext: &Arc<FieldCtx>,
    lam_r: FieldElem,
) -> Result<Cyclo, CountError> {
    let n = s.n;
    let qr = BigInt::from(ext.q);
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let fw = fw_value(s, &class.w, ext, lam_r);
    match class.diagonal_shift(s.d, &s.h) {
        Some(m) => {
            // w = m h: (-1)^n q^{-delta(m)} j^{1-delta(m)} F^w + (-1)^{n-1}(1-q)^{n-1}/q
            let delta_m = if m == 0 { 1 } else { 0 };
            let jpart = if delta_m == 1 {
                Cyclo::one()
            } else {
                true_j_pow(&s.ctx, s.d, &class.w, r)
            };
            let mut main = jpart.mul(&fw).scalar_mul(&BigRational::from(sign.clone()));
            if delta_m == 1 {
                main = main.scalar_mul(&BigRational::new(BigInt::one(), qr.clone()));
            }
            let tail = BigRational::new(
                -&sign * (BigInt::one() - &qr).pow(n as u32 - 1),
                qr.clone(),
            );
            Ok(main.add(&Cyclo::from_rational(tail)))
        }
        None => {
            let j = true_j_pow(&s.ctx, s.d, &class.w, r);
            Ok(j.mul(&fw).scalar_mul(&BigRational::from(sign)))
        }
    }
}

/// Fermat-surface counts: the classical three-branch values for D_0, or
/// the torus D*_0 branches, for a full-lattice character w with
/// sum w_i = 0.
pub fn fermat_n_full(ctx: &Arc<FieldCtx>, d: u64, w: &[u64], r: u32, starred: bool) -> Cyclo {
    let n = w.len();
    let qr = BigInt::from(ctx.q).pow(r);
    let zeros = w.iter().filter(|&&x| x % d == 0).count();
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    if starred {
        if zeros == n {
            // (-1)^n (1 - (1-q)^{n-1})/q
            let v = (BigInt::one() - (BigInt::one() - &qr).pow(n as u32 - 1)) * &sign;
            return Cyclo::from_rational(BigRational::new(v, qr));
        }
        return true_j_pow(ctx, d, w, r).scalar_mul(&BigRational::from(sign));
    }
    if zeros == n {
        // (1 - q^{n-1})/(1 - q)
        let v = BigRational::new(
            BigInt::one() - qr.pow(n as u32 - 1),
            BigInt::one() - &qr,
        );
        return Cyclo::from_rational(v);
    }
    if zeros > 0 {
        return Cyclo::zero();
    }
    true_j_pow(ctx, d, w, r).scalar_mul(&BigRational::from(sign))
}

/// Class-level Fermat count: sum of the full-lattice branches over the
/// class members.
pub fn fermat_n(s: &Surface, class: &CharClass, r: u32, starred: bool) -> Cyclo {
    let mut acc = Cyclo::zero();
    for w in class.members(s.d, &s.h) {
        acc = acc.add(&fermat_n_full(&s.ctx, s.d, &w, r, starred));
    }
    acc
}

/// Full projective count N_r(D_lambda; chi^w) by the closed formula:
/// the torus value plus the Fermat difference terms over the class.
pub fn formula_n(s: &Surface, class: &CharClass, r: u32) -> Result<Cyclo, CountError> {
    if s.lambda.0 == 0 {
        return Err(CountError::LambdaZero);
    }
    let star = formula_n_star(s, class, r)?;
    let mut acc = star.value;
    let qr = BigInt::from(s.ctx.q).pow(r);
    for w in class.members(s.d, &s.h) {
        let zeros = w.iter().filter(|&&x| x % s.d == 0).count();
        if zeros == 0 {
            continue;
        }
        if zeros == s.n {
            // (1-q^{n-1})/(1-q) + (-1)^{n-1} (1-(1-q)^{n-1})/q
            let a = BigRational::new(
                BigInt::one() - qr.pow(s.n as u32 - 1),
                BigInt::one() - &qr,
            );
            let sgn = if s.n % 2 == 0 { -BigInt::one() } else { BigInt::one() };
            let b = BigRational::new(
                sgn * (BigInt::one() - (BigInt::one() - &qr).pow(s.n as u32 - 1)),
                qr.clone(),
            );
            acc = acc.add(&Cyclo::from_rational(a + b));
        } else {
            // some but not all zero: (-1)^{n-1} j(phi_d^{w'})^r
            let sgn = if s.n % 2 == 0 {
                BigRational::from(-BigInt::one())
            } else {
                BigRational::from(BigInt::one())
            };
            acc = acc.add(&true_j_pow(&s.ctx, s.d, &w, r).scalar_mul(&sgn));
        }
    }
    Ok(acc)
}

/// The reduced-form count for classes w ~ m h with gcd(d, h_i) = 1 for all
/// i: N = (-1)^n j^{1-delta(m)} F_red + (1-q^{n-1})/(1-q).
pub fn formula_n_reduced_form(s: &Surface, class: &CharClass, r: u32) -> Result<Cyclo, CountError> {
    if s.lambda.0 == 0 {
        return Err(CountError::LambdaZero);
    }
    let m = class
        .diagonal_shift(s.d, &s.h)
        .ok_or_else(|| CountError::BadSurface("reduced form needs w ~ m h".into()))?;
    if s.h.iter().any(|&hi| crate::arith::gcd(s.d, hi) != 1) {
        return Err(CountError::BadSurface("shortcut needs gcd(d, h_i) = 1 for all i".into()));
    }
    let (tower, lam_r) = s.ext(r)?;
    let ext = &tower.ext;
    let nr = ext.q - 1;
    let alphas = fw_alpha_exps(s, ext, &class.w);
    let betas = fw_beta_exps(s.d, nr);
    let z = fw_argument(s, ext, lam_r);
    let f_red = hyper_f_reduced_exps(ext, &alphas, &betas, z)
        .map_err(CountError::BadSurface)?;
    let sign = if s.n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let jpart = if m == 0 {
        Cyclo::one()
    } else {
        true_j_pow(&s.ctx, s.d, &class.w, r)
    };
    let qr = BigInt::from(s.ctx.q).pow(r);
    let tail = BigRational::new(BigInt::one() - qr.pow(s.n as u32 - 1), BigInt::one() - &qr);
    Ok(jpart
        .mul(&f_red)
        .scalar_mul(&BigRational::from(sign))
        .add(&Cyclo::from_rational(tail)))
}

/// Dwork reduced hypergeometric value F_{r,red}^w(lambda^d) over F_{q^r}.
pub fn dwork_f_red(s: &Surface, w: &[u64], r: u32) -> Result<Cyclo, CountError> {
    if !s.is_dwork() {
        return Err(CountError::NotDwork);
    }
    let (tower, lam_r) = s.ext(r)?;
    let ext = &tower.ext;
    let nr = ext.q - 1;
    let l = nr / s.d;
    let alphas: Vec<u64> = w.iter().map(|&wi| (wi % s.d) * l).collect();
    let betas = fw_beta_exps(s.d, nr);
    let z = ext.pow(lam_r, s.d as i64);
    hyper_f_reduced_exps(ext, &alphas, &betas, z).map_err(CountError::BadSurface)
}

/// Dwork-surface count via the absorbed closed form: branch (i) for the
/// trivial class with the projective tail, branch (ii) with the q^delta(w)
/// twist otherwise.
pub fn dwork_n(s: &Surface, class: &CharClass, r: u32) -> Result<Cyclo, CountError> {
    if !s.is_dwork() {
        return Err(CountError::NotDwork);
    }
    if s.lambda.0 == 0 {
        return Err(CountError::LambdaZero);
    }
    let d = s.d;
    let qr = BigInt::from(s.ctx.q).pow(r);
    let sign = if d % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    let f_red = dwork_f_red(s, &class.w, r)?;
    if class.is_trivial() {
        // canonical representative (0, ..., 0): delta(w) = 1, j^0 = 1
        let tail = BigRational::new(
            BigInt::one() - qr.pow(d as u32 - 1),
            BigInt::one() - &qr,
        );
        return Ok(f_red
            .scalar_mul(&BigRational::from(sign))
            .add(&Cyclo::from_rational(tail)));
    }
    let delta = class.delta();
    let mut j = true_j_pow(&s.ctx, d, &class.w, r);
    if delta == 1 {
        j = j.scalar_mul(&BigRational::from(qr.clone()));
    }
    Ok(j.mul(&f_red).scalar_mul(&BigRational::from(sign)))
}

/// Closed value of the permutation-class Dwork count (w a permutation of
/// (0, 1, ..., d-1), odd d): 0 for lambda^d != 1, else the signed power
/// (-1)^(r(d^2-1)(q-1)/(8d)) q^(r(d-1)/2).
pub fn dwork_permutation_closed(q: u64, d: u64, r: u32, lambda_pow_d_is_one: bool) -> Cyclo {
    if !lambda_pow_d_is_one {
        return Cyclo::zero();
    }
    let e = (r as u64) * (d * d - 1) * (q - 1) / (8 * d);
    let sign = if e % 2 == 0 { 1i64 } else { -1 };
    let val = BigInt::from(sign) * BigInt::from(q).pow((r as u32) * (d as u32 - 1) / 2);
    Cyclo::from_bigint(val)
}


#[cfg(test)]
mod orbit_tests {
    use super::*;
    use crate::ffield::build_field;

    #[test]
    fn galois_orbit_sums_are_integers() {
        // summing formula_N over a full Galois orbit of classes lands in Z
        let ctx = build_field(13, 1).unwrap();
        let s = Surface::new(&ctx, 4, vec![1, 1, 1, 1], FieldElem(2)).unwrap();
        let cls = classes(&s);
        let mut seen: std::collections::BTreeSet<Vec<u64>> = Default::default();
        for c in &cls {
            if seen.contains(&c.w) {
                continue;
            }
            // orbit under w -> cw for c coprime to d
            let mut orbit = Vec::new();
            for mult in [1u64, 3] {
                let w: Vec<u64> = c.w.iter().map(|&x| x * mult % 4).collect();
                let canon = CharClass::canonical(&w, 4, &s.h);
                if seen.insert(canon.w.clone()) {
                    orbit.push(canon);
                }
            }
            let mut total = Cyclo::zero();
            for member in &orbit {
                total = total.add(&formula_n(&s, member, 1).unwrap());
            }
            assert!(
                total.as_integer().is_ok(),
                "orbit of {:?} summed to a non-integer",
                c.w
            );
        }
    }

    #[test]
    fn numeric_assisted_rounding_matches_exact_counts() {
        let ctx = build_field(7, 1).unwrap();
        let s = Surface::new(&ctx, 3, vec![1, 1, 1], FieldElem(3)).unwrap();
        for c in classes(&s) {
            let v = formula_n(&s, &c, 1).unwrap();
            if let Ok(exact) = v.as_integer() {
                let rounded = crate::numeric::round_to_integer(&v, 64).unwrap();
                assert_eq!(rounded, exact);
            }
        }
    }
}
