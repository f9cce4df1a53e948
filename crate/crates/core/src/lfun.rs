//! Newton-identity machinery, Artin L-functions and zeta functions, and the
//! cross-field hypergeometric relation verifiers.
//!
//! For a smooth surface the L-function attached to a character class is
//! essentially the characteristic polynomial of Frobenius on the primitive
//! middle cohomology eigenspace, whose dimension k(w) is a lattice count.
//! We extract that polynomial from exactly k(w) power sums via Newton's
//! identities and then certify the rational function against the exponential
//! generating series of further counts.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::charsum::IdentityWitness;
use crate::counting::{
    dwork_f_red, dwork_n, formula_n, true_j_pow, CharClass, CountError, Surface,
};
use crate::cyclo::Cyclo;
use crate::ffield::{build_tower, FieldCtx, FieldElem};
use crate::hyperf::hyper_f_exps;
use crate::numeric::poly_root_moduli;

#[derive(Debug, Error)]
pub enum LfunError {
    #[error("count error: {0}")]
    Count(#[from] CountError),
    #[error("lambda = 0 is not supported here")]
    LambdaZero,
    #[error("{0}")]
    Unsupported(String),
    #[error("certification failed: {0}")]
    Certification(String),
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPoly {
    /// exponent vector -> coefficient
    terms: BTreeMap<Vec<u16>, BigRational>,
    pub arity: usize,
}

impl SymPoly {
    pub fn zero(arity: usize) -> SymPoly {
        SymPoly { terms: BTreeMap::new(), arity }
    }

    pub fn constant(arity: usize, c: BigRational) -> SymPoly {
        let mut p = SymPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    pub fn one(arity: usize) -> SymPoly {
        SymPoly::constant(arity, BigRational::one())
    }

    pub fn var(arity: usize, i: usize) -> SymPoly {
        let mut e = vec![0u16; arity];
        e[i] = 1;
        let mut p = SymPoly::zero(arity);
        p.terms.insert(e, BigRational::one());
        p
    }

    pub fn add(&self, other: &SymPoly) -> SymPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.arity);
        }
        SymPoly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            arity: self.arity,
        }
    }

    pub fn mul(&self, other: &SymPoly) -> SymPoly {
        let mut out = SymPoly::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// Substitute each variable x_i by args[i].
    pub fn compose(&self, args: &[SymPoly]) -> SymPoly {
        let arity = args.first().map_or(self.arity, |p| p.arity);
        let mut out = SymPoly::zero(arity);
        for (e, c) in &self.terms {
            let mut term = SymPoly::constant(arity, c.clone());
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term = term.mul(&args[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval_cyclo(&self, args: &[Cyclo]) -> Cyclo {
        let mut out = Cyclo::zero();
        for (e, c) in &self.terms {
            let mut term = Cyclo::from_rational(c.clone());
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&args[i].pow(exp as u64));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval_rational(&self, args: &[BigRational]) -> BigRational {
        let mut out = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term *= &args[i];
                }
            }
            out += term;
        }
        out
    }

    /// True when every coefficient is a rational integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    pub fn coefficient(&self, exps: &[u16]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }
}

/// The Newton-identity polynomials for k eigenvalues: P_r expresses the
/// power sum p_r in the elementary symmetric functions, Q_i inverts
/// (rational coefficients), and R_r = P_r o Q closes the loop p_r =
/// R_r(p_1, ..., p_k).
pub struct NewtonBundle {
    pub k: usize,
    pub p_polys: Vec<SymPoly>,
    pub q_polys: Vec<SymPoly>,
    pub r_polys: Vec<SymPoly>,
}

pub fn newton_convert(k: usize, rmax: usize) -> NewtonBundle {
    assert!(k >= 1);
    // P_r(e_1..e_k): p_r = sum_{j<r} (-1)^{j-1} e_j p_{r-j} + (-1)^{r-1} r e_r
    let e = |i: usize| SymPoly::var(k, i - 1);
    let mut p_polys: Vec<SymPoly> = Vec::with_capacity(rmax);
    for r in 1..=rmax {
        let mut acc = SymPoly::zero(k);
        for j in 1..r.min(k + 1) {
            let sign = if j % 2 == 1 { BigRational::one() } else { -BigRational::one() };
            acc = acc.add(&e(j).mul(&p_polys[r - j - 1]).scale(&sign));
        }
        if r <= k {
            let sign = if r % 2 == 1 { BigRational::one() } else { -BigRational::one() };
            acc = acc.add(&e(r).scale(&(sign * BigRational::from(BigInt::from(r as i64)))));
        }
        p_polys.push(acc);
    }
    // Q_i(p_1..p_i): e_i = (1/i) sum_{j=1}^{i} (-1)^{j-1} e_{i-j} p_j
    let x = |j: usize| SymPoly::var(k, j - 1);
    let mut q_polys: Vec<SymPoly> = Vec::with_capacity(k);
    for i in 1..=k {
        let mut acc = SymPoly::zero(k);
        for j in 1..=i {
            let sign = if j % 2 == 1 { BigRational::one() } else { -BigRational::one() };
            let prev = if i == j {
                SymPoly::one(k)
            } else {
                q_polys[i - j - 1].clone()
            };
            acc = acc.add(&prev.mul(&x(j)).scale(&sign));
        }
        q_polys.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(i as i64))));
    }
    let r_polys: Vec<SymPoly> = p_polys.iter().map(|p| p.compose(&q_polys)).collect();
    NewtonBundle { k, p_polys, q_polys, r_polys }
}

/// k(w): the dimension of the primitive middle-cohomology chi^w-eigenspace,
/// counted as #{m in Z/d : no entry of w + m h vanishes}.
pub fn dim_formula(s: &Surface, class: &CharClass) -> u64 {
    let d = s.d;
    (0..d)
        .filter(|&m| {
            class
                .w
                .iter()
                .zip(s.h.iter())
                .all(|(&wi, &hi)| (wi + m * hi) % d != 0)
        })
        .count() as u64
}

/// Coefficients (ascending in t) of prod_i (1 - alpha_i t) from the power
/// sums p_1, ..., p_k via Newton's identities.
pub fn charpoly_from_counts(power_sums: &[Cyclo]) -> Vec<Cyclo> {
    let k = power_sums.len();
    // e_i = (1/i) sum_{j=1}^{i} (-1)^{j-1} e_{i-j} p_j
    let mut es: Vec<Cyclo> = vec![Cyclo::one()];
    for i in 1..=k {
        let mut acc = Cyclo::zero();
        for j in 1..=i {
            let sign = if j % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            let term = es[i - j].mul(&power_sums[j - 1]).scalar_mul(&BigRational::from(sign));
            acc = acc.add(&term);
        }
        es.push(acc.scalar_mul(&BigRational::new(BigInt::one(), BigInt::from(i as i64))));
    }
    (0..=k)
        .map(|i| {
            let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            es[i].scalar_mul(&BigRational::from(sign))
        })
        .collect()
}

/// Multiply truncated power series.
pub(crate) fn poly_mul_trunc(a: &[Cyclo], b: &[Cyclo], order: usize) -> Vec<Cyclo> {
    let mut out = vec![Cyclo::zero(); order + 1];
    for (i, x) in a.iter().enumerate() {
        if i > order || x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// exp(sum_r counts[r-1] t^r / r) truncated at the given order.
pub fn series_exp_from_counts(counts: &[Cyclo], order: usize) -> Vec<Cyclo> {
    assert!(counts.len() >= order);
    let mut s = vec![Cyclo::zero(); order + 1];
    s[0] = Cyclo::one();
    for j in 1..=order {
        let mut acc = Cyclo::zero();
        for r in 1..=j {
            acc = acc.add(&counts[r - 1].mul(&s[j - r]));
        }
        s[j] = acc.scalar_mul(&BigRational::new(BigInt::one(), BigInt::from(j as i64)));
    }
    s
}

/// How a power sum / count at a given level was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CountSource {
    /// closed formula evaluated at that level (independent of the fit)
    Formula,
    /// predicted by the Newton recursion from lower levels
    Recursion,
}

/// An L-function as an exact rational function in t, together with its
/// certification record.
#[derive(Clone, Debug)]
pub struct LSeries {
    pub class_w: Vec<u64>,
    /// numerator coefficients, ascending in t
    pub numerator: Vec<Cyclo>,
    /// denominator coefficients, ascending in t
    pub denominator: Vec<Cyclo>,
    /// truncated exponential series of the counts (always populated)
    pub series: Vec<Cyclo>,
    /// per-level source tags for r = 1, 2, ...
    pub sources: Vec<CountSource>,
    /// the rational function reproduced the series through this order
    pub certified_through: usize,
    /// dimension k(w) used for the extraction
    pub k: u64,
}

impl LSeries {
    /// Power-series expansion of the rational function; counts-only series
    /// (no certified rational function) return their stored prefix.
    pub fn expand(&self, order: usize) -> Vec<Cyclo> {
        if self.numerator.is_empty() || self.denominator.is_empty() {
            let mut s = self.series.clone();
            s.truncate(order + 1);
            return s;
        }
        series_div(&self.numerator, &self.denominator, order)
    }
}

/// num/den as a truncated power series (den[0] must be 1).
pub(crate) fn series_div(num: &[Cyclo], den: &[Cyclo], order: usize) -> Vec<Cyclo> {
    assert!(den[0] == Cyclo::one(), "denominator must have constant term 1");
    let mut out = vec![Cyclo::zero(); order + 1];
    for j in 0..=order {
        let mut acc = if j < num.len() { num[j].clone() } else { Cyclo::zero() };
        for i in 1..=j.min(den.len() - 1) {
            acc = acc.sub(&den[i].mul(&out[j - i]));
        }
        out[j] = acc;
    }
    out
}

/// Largest extension level at which the closed-form counts stay cheap
/// enough for direct evaluation (modular sweeps are quadratic in q^r).
fn direct_level_cap(q: u64) -> u32 {
    let mut r = 0u32;
    let mut qq: u64 = 1;
    loop {
        match qq.checked_mul(q) {
            Some(next) if next - 1 <= 2500 => {
                qq = next;
                r += 1;
            }
            _ => return r.max(1),
        }
    }
}

/// Artin L-function of the surface at a character class, assembled from
/// closed-form counts, with the degree-k(w) numerator extracted by Newton's
/// identities and certified against the count series through `trunc`.
///
/// Smooth surfaces get the full rational function; singular ones return a
/// counts-only series (empty numerator/denominator).
pub fn artin_l(s: &Surface, class: &CharClass, trunc: usize) -> Result<LSeries, LfunError> {
    if s.lambda.0 == 0 {
        return Err(LfunError::LambdaZero);
    }
    let n = s.n;
    let q = s.ctx.q;
    let k = dim_formula(s, class) as usize;
    let r_direct = direct_level_cap(q) as usize;
    let order = trunc.max(k + 3);

    // counts N_r: formula for r <= r_direct, Newton recursion beyond
    let mut counts: Vec<Cyclo> = Vec::with_capacity(order);
    let mut sources: Vec<CountSource> = Vec::with_capacity(order);
    let count_at = |r: usize| -> Result<Cyclo, LfunError> {
        if s.is_dwork() {
            Ok(dwork_n(s, class, r as u32)?)
        } else {
            Ok(formula_n(s, class, r as u32)?)
        }
    };
    let tail = |r: usize| -> Cyclo {
        // sum_{i=0}^{n-2} q^{ri} for the trivial class
        let mut acc = BigInt::zero();
        for i in 0..=(n - 2) {
            acc += BigInt::from(q).pow((r * i) as u32);
        }
        Cyclo::from_bigint(acc)
    };
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    if k > r_direct {
        return Err(LfunError::Unsupported(format!(
            "need {} direct count levels but only {} are within budget",
            k, r_direct
        )));
    }
    let mut power_sums: Vec<Cyclo> = Vec::with_capacity(order);
    for r in 1..=order.min(r_direct) {
        let nr = count_at(r)?;
        let mut p = nr.clone();
        if class.is_trivial() {
            p = p.sub(&tail(r));
        }
        p = p.scalar_mul(&BigRational::from(sign.clone()));
        counts.push(nr);
        sources.push(CountSource::Formula);
        power_sums.push(p);
    }

    if !s.is_smooth() {
        // counts-only mode
        let have = counts.len();
        let series = series_exp_from_counts(&counts, have.min(order));
        return Ok(LSeries {
            class_w: class.w.clone(),
            numerator: Vec::new(),
            denominator: Vec::new(),
            series,
            sources,
            certified_through: 0,
            k: k as u64,
        });
    }

    // charpoly from exactly k power sums
    let char_coeffs = charpoly_from_counts(&power_sums[..k]);
    // extend counts by the Newton recursion where direct evaluation stopped
    let es: Vec<Cyclo> = (0..=k)
        .map(|i| {
            let sgn = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            char_coeffs[i].scalar_mul(&BigRational::from(sgn))
        })
        .collect();
    while counts.len() < order {
        let r = counts.len() + 1;
        // p_r = sum_{j=1}^{k} (-1)^{j-1} e_j p_{r-j}
        let mut p = Cyclo::zero();
        for j in 1..=k.min(r - 1) {
            let sgn = if j % 2 == 1 { BigInt::one() } else { -BigInt::one() };
            p = p.add(&es[j].mul(&power_sums[r - 1 - j]).scalar_mul(&BigRational::from(sgn.clone())));
        }
        power_sums.push(p.clone());
        let mut nr = p.scalar_mul(&BigRational::from(sign.clone()));
        if class.is_trivial() {
            nr = nr.add(&tail(r));
        }
        counts.push(nr);
        sources.push(CountSource::Recursion);
    }

    // assemble L = exp-part * [trivial tail]
    // odd n: L = charpoly / [trivial: prod (1 - q^i t)]
    // even n: L = 1 / (charpoly * [trivial: prod (1 - q^i t)])
    let mut tail_poly = vec![Cyclo::one()];
    if class.is_trivial() {
        for i in 0..=(n - 2) {
            let factor = vec![
                Cyclo::one(),
                Cyclo::from_bigint(-BigInt::from(q).pow(i as u32)),
            ];
            tail_poly = poly_mul_trunc(&tail_poly, &factor, n - 1 + tail_poly.len());
        }
    }
    let (numerator, denominator) = if n % 2 == 1 {
        (char_coeffs.clone(), tail_poly)
    } else {
        let full = poly_mul_trunc(&char_coeffs, &tail_poly, char_coeffs.len() + tail_poly.len());
        (vec![Cyclo::one()], trim_poly(full))
    };

    // certification: the rational function must reproduce exp(sum N_r t^r/r)
    let series = series_exp_from_counts(&counts, order);
    let expanded = series_div(&numerator, &denominator, order);
    for j in 0..=order {
        if expanded[j] != series[j] {
            return Err(LfunError::Certification(format!(
                "series mismatch at t^{} for class {:?}",
                j, class.w
            )));
        }
    }
    Ok(LSeries {
        class_w: class.w.clone(),
        numerator: trim_poly(numerator),
        denominator: trim_poly(denominator),
        series,
        sources,
        certified_through: order,
        k: k as u64,
    })
}

fn trim_poly(mut v: Vec<Cyclo>) -> Vec<Cyclo> {
    while v.len() > 1 && v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

/// The zeta function as an exact rational function: the product of the
/// class L-functions, with integer-coefficient series certified.
pub struct ZetaFunction {
    pub numerator: Vec<Cyclo>,
    pub denominator: Vec<Cyclo>,
    pub factors: Vec<LSeries>,
    pub series_integers: Vec<BigInt>,
}

pub fn zeta(s: &Surface, trunc: usize) -> Result<ZetaFunction, LfunError> {
    if !s.is_smooth() {
        return Err(LfunError::Unsupported(
            "zeta certification requires a smooth pencil member".into(),
        ));
    }
    let classes = crate::counting::classes(s);
    let mut num = vec![Cyclo::one()];
    let mut den = vec![Cyclo::one()];
    let mut factors = Vec::new();
    let cap = 2 * trunc + 64;
    for c in &classes {
        let l = artin_l(s, c, trunc)?;
        num = poly_mul_trunc(&num, &l.numerator, cap);
        den = poly_mul_trunc(&den, &l.denominator, cap);
        factors.push(l);
    }
    let num = trim_poly(num);
    let den = trim_poly(den);
    let series = series_div(&num, &den, trunc);
    let mut series_integers = Vec::with_capacity(trunc + 1);
    for (j, c) in series.iter().enumerate() {
        let v = c.as_integer().map_err(|_| {
            LfunError::Certification(format!("zeta coefficient at t^{} is not an integer", j))
        })?;
        series_integers.push(v);
    }
    Ok(ZetaFunction { numerator: num, denominator: den, factors, series_integers })
}

/// The 2F1 relation across field levels: F at q^r equals the P_r
/// combination of the q- and q^2-level values.
pub fn verify_relation_2f1(
    ctx: &Arc<FieldCtx>,
    d: u64,
    a: u64,
    b: u64,
    c: u64,
    lam: FieldElem,
    r: u32,
) -> Result<IdentityWitness, LfunError> {
    let q = ctx.q;
    if (q - 1) % d != 0 {
        return Err(LfunError::Unsupported("d must divide q-1".into()));
    }
    if a % d == 0 || b % d == 0 || c % d == 0 || a % d == c % d || b % d == c % d {
        return Err(LfunError::Unsupported(
            "need a, b not in {0, c} and c != 0".into(),
        ));
    }
    let constraint = (d * (d - 1) / 2) % d;
    if (c % d + 2 * d - a % d - b % d) % d != constraint {
        return Err(LfunError::Unsupported(format!(
            "c - a - b must be {} mod {}",
            constraint, d
        )));
    }
    if lam.0 == 0 {
        return Err(LfunError::LambdaZero);
    }
    if ctx.pow(lam, d as i64) == ctx.one() {
        return Err(LfunError::Unsupported("lambda must avoid mu_d".into()));
    }
    let f_at = |level: u32| -> Result<Cyclo, LfunError> {
        let tower = build_tower(ctx, level).map_err(CountError::Field)?;
        let ext = tower.ext.clone();
        let nr = ext.q - 1;
        let l = nr / d;
        let z = ext.pow(tower.embed(lam), d as i64);
        Ok(hyper_f_exps(&ext, &[a % d * l, b % d * l], &[0, c % d * l], z))
    };
    let f1 = f_at(1)?;
    let f2 = f_at(2)?;
    let fr = f_at(r)?;
    let bundle = newton_convert(2, r as usize);
    // e_1 = F_1, e_2 = (F_1^2 - F_2)/2
    let e1 = f1.clone();
    let e2 = f1
        .mul(&f1)
        .sub(&f2)
        .scalar_mul(&BigRational::new(BigInt::one(), BigInt::from(2)));
    let rhs = bundle.p_polys[r as usize - 1].eval_cyclo(&[e1, e2]);
    Ok(IdentityWitness {
        name: format!(
            "2f1-relation q={} d={} (a,b,c)=({},{},{}) lam={} r={}",
            q, d, a, b, c, lam.0, r
        ),
        pass: fr == rhs,
        detail: String::new(),
    })
}

/// The Dwork reduced-value relation F_{r,red} = R_r(F_{1,red}, ..., F_{k,red}).
pub fn verify_f_red_recursion(
    s: &Surface,
    class: &CharClass,
    r: u32,
) -> Result<IdentityWitness, LfunError> {
    if !s.is_dwork() {
        return Err(LfunError::Unsupported("Dwork surfaces only".into()));
    }
    if s.lambda.0 == 0 {
        // the theorem statement allows lambda = 0 but every hypergeometric
        // term degenerates under eta(0) = 0; unsupported here
        return Err(LfunError::LambdaZero);
    }
    if s.ctx.pow(s.lambda, s.d as i64) == s.ctx.one() {
        return Err(LfunError::Unsupported("lambda must avoid mu_d".into()));
    }
    let k = dim_formula(s, class) as usize;
    let lhs = dwork_f_red(s, &class.w, r)?;
    let rhs = if k == 0 {
        Cyclo::zero()
    } else {
        let lower: Result<Vec<Cyclo>, LfunError> = (1..=k as u32)
            .map(|j| dwork_f_red(s, &class.w, j).map_err(LfunError::from))
            .collect();
        let lower = lower?;
        let bundle = newton_convert(k, r as usize);
        bundle.r_polys[r as usize - 1].eval_cyclo(&lower)
    };
    Ok(IdentityWitness {
        name: format!(
            "dwork-f-relation q={} d={} w={:?} lam={} r={} k={}",
            s.ctx.q, s.d, class.w, s.lambda.0, r, k
        ),
        pass: lhs == rhs,
        detail: String::new(),
    })
}

/// The quartic-Dwork one-value relation: F_{r,red}^{(m,m,m,m)} is the
/// alpha_1 term plus the P_r combination with second slot (q/j)^2, where
/// alpha_1 = phi_2(1 - lambda^4) q; also certifies that (1 - alpha_1 t)
/// divides Q(t) exactly and that Q(t) has rational coefficients.
pub fn verify_quartic_one_value(s: &Surface, m: u64, r: u32) -> Result<IdentityWitness, LfunError> {
    if !s.is_dwork() || s.d != 4 {
        return Err(LfunError::Unsupported("degree-4 Dwork surfaces only".into()));
    }
    if s.lambda.0 == 0 || s.ctx.pow(s.lambda, 4) == s.ctx.one() {
        return Err(LfunError::Unsupported("need lambda != 0 with lambda^4 != 1".into()));
    }
    if !(1..=3).contains(&m) {
        return Err(LfunError::Unsupported("m must be 1, 2, or 3".into()));
    }
    let ctx = &s.ctx;
    let q = ctx.q;
    let w = vec![m, m, m, m];
    let j = true_j_pow(ctx, 4, &w, 1);
    // alpha_1 = phi_2(1 - lambda^4) q
    let lam4 = ctx.pow(s.lambda, 4);
    let arg = ctx.sub(ctx.one(), lam4);
    let phi2_sign = if ctx.dlog_u(arg) % 2 == 0 { 1i64 } else { -1 };
    let alpha1 = Cyclo::from_int(phi2_sign * q as i64);
    // j is a nonzero cyclotomic integer; alpha1/j = alpha1 * conj(j) / |j|^2
    // is avoided: instead clear denominators in the checked identity.
    let f_at = |level: u32| -> Result<Cyclo, LfunError> {
        Ok(dwork_f_red(s, &w, level)?)
    };
    let f1 = f_at(1)?;
    let fr = f_at(r)?;
    // alpha1/j: compute via 1/j = conj(j)/ (j conj j) with j conj j = q^(d-2) * unit...
    // safer: verify j * X = alpha1 for X = alpha1 * jinv by direct division check;
    // here use exact division through the relation j jbar = q^2 (all w_i != 0).
    let jbar = j.conj();
    let jnorm = j.mul(&jbar);
    let q2 = Cyclo::from_int((q * q) as i64);
    if jnorm != q2 {
        return Err(LfunError::Certification("j(phi_4^w) does not have modulus q".into()));
    }
    let jinv = jbar.scalar_mul(&BigRational::new(BigInt::one(), BigInt::from((q * q) as i64)));
    let a_over_j = alpha1.mul(&jinv);
    let q_over_j_sq = q2.mul(&jinv).mul(&jinv);
    let bundle = newton_convert(2, r as usize);
    let x = f1.sub(&a_over_j);
    let rhs = a_over_j
        .pow(r as u64)
        .add(&bundle.p_polys[r as usize - 1].eval_cyclo(&[x.clone(), q_over_j_sq]));
    let relation_ok = fr == rhs;

    // Q(t) certificates from p_j = j^j F_{j,red}
    let f2 = f_at(2)?;
    let f3 = f_at(3)?;
    let p1 = j.mul(&f1);
    let p2 = j.pow(2).mul(&f2);
    let p3 = j.pow(3).mul(&f3);
    let qt = charpoly_from_counts(&[p1, p2, p3]);
    let rational_ok = qt.iter().all(|c| c.as_rational().is_ok());
    // (1 - alpha1 t) divides Q(t): synthetic division remainder Q(1/alpha1) = 0
    let alpha1_inv = Cyclo::from_rational(BigRational::new(
        BigInt::one(),
        BigInt::from(phi2_sign * q as i64),
    ));
    let mut horner = Cyclo::zero();
    for c in qt.iter().rev() {
        horner = horner.mul(&alpha1_inv).add(c);
    }
    let divides_ok = horner.is_zero();
    // m = 2 has j = q
    let j_is_q_ok = m != 2 || j == Cyclo::from_int(q as i64);

    Ok(IdentityWitness {
        name: format!("quartic-one-value q={} lam={} m={} r={}", q, s.lambda.0, m, r),
        pass: relation_ok && rational_ok && divides_ok && j_is_q_ok,
        detail: format!(
            "relation={} rational_Q={} divides={} j_q={}",
            relation_ok, rational_ok, divides_ok, j_is_q_ok
        ),
    })
}

/// Weil-bound check: every root of the given polynomial (ascending
/// coefficients, constant term 1) has modulus q^(weight/2) within the
/// relative tolerance, certified by enclosures at 200-bit precision. The
/// optional exact symmetry check verifies that the root multiset is stable
/// under alpha -> q^weight / alpha.
pub fn weil_check(
    coeffs: &[Cyclo],
    q: u64,
    weight: u32,
    check_symmetry: bool,
) -> Result<IdentityWitness, LfunError> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(IdentityWitness {
            name: "weil-check deg-0".into(),
            pass: true,
            detail: "vacuous".into(),
        });
    }
    let target_sq = BigRational::from(BigInt::from(q).pow(weight));
    let tol = BigRational::new(BigInt::from(3), BigInt::from(10u64.pow(9)));
    // roots of P(t) = prod (1 - alpha_i t) are the reciprocals of the
    // Frobenius eigenvalues: reverse the coefficients so the located roots
    // are the alpha_i themselves
    let reversed: Vec<Cyclo> = coeffs.iter().rev().cloned().collect();
    let moduli = poly_root_moduli(&reversed, 200).map_err(LfunError::Certification)?;
    let mut pass = true;
    for (lo, hi) in &moduli {
        // |alpha|^2 within relative ~2 tol of q^weight
        let lo2 = lo * lo;
        let hi2 = hi * hi;
        let lower_bound = &target_sq * (BigRational::one() - &tol - &tol);
        let upper_bound = &target_sq * (BigRational::one() + &tol + &tol);
        if hi2 < lower_bound || lo2 > upper_bound {
            pass = false;
        }
    }
    let mut sym_ok = true;
    if check_symmetry {
        // e_j relations for the reciprocal pairing alpha -> q^weight/alpha:
        // e_k e_j = q^(weight j) e_{k-j}
        let es: Vec<Cyclo> = (0..=deg)
            .map(|i| {
                let sgn = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                coeffs[i].scalar_mul(&BigRational::from(sgn))
            })
            .collect();
        for jx in 0..=deg {
            let lhs = es[deg].mul(&es[jx]);
            let rhs = es[deg - jx]
                .scalar_mul(&BigRational::from(BigInt::from(q).pow(weight * jx as u32)));
            if lhs != rhs {
                sym_ok = false;
            }
        }
    }
    Ok(IdentityWitness {
        name: format!("weil-check deg-{} weight-{}", deg, weight),
        pass: pass && sym_ok,
        detail: format!("moduli_ok={} symmetry_ok={}", pass, sym_ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{classes, oracle_n, twist_table, oracle_n_from};
    use crate::ffield::build_field;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn surface(p: u64, d: u64, h: &[u64], lam: u64) -> Surface {
        let ctx = build_field(p, 1).unwrap();
        Surface::new(&ctx, d, h.to_vec(), FieldElem(lam)).unwrap()
    }

    #[test]
    fn newton_polynomials_closed_forms() {
        let b2 = newton_convert(2, 3);
        // P_2 = x1^2 - 2 x2
        assert_eq!(b2.p_polys[1].coefficient(&[2, 0]), rat(1, 1));
        assert_eq!(b2.p_polys[1].coefficient(&[0, 1]), rat(-2, 1));
        // Q_2 = (x1^2 - x2)/2
        assert_eq!(b2.q_polys[1].coefficient(&[2, 0]), rat(1, 2));
        assert_eq!(b2.q_polys[1].coefficient(&[0, 1]), rat(-1, 2));
        // k = 3: Q_3 = (x1^3 - 3 x1 x2 + 2 x3)/6
        let b3 = newton_convert(3, 3);
        assert_eq!(b3.q_polys[2].coefficient(&[3, 0, 0]), rat(1, 6));
        assert_eq!(b3.q_polys[2].coefficient(&[1, 1, 0]), rat(-3, 6));
        assert_eq!(b3.q_polys[2].coefficient(&[0, 0, 1]), rat(2, 6));
        // P_r has integer coefficients
        for k in 1..=4usize {
            let b = newton_convert(k, 8);
            for p in &b.p_polys {
                assert!(p.has_integer_coeffs());
            }
        }
    }

    #[test]
    fn newton_identities_on_rational_tuples() {
        // deterministic pseudo-random alpha tuples
        let mut seed = 12345u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) as i64 % 19) - 9
        };
        for k in 1..=4usize {
            let alphas: Vec<BigRational> = (0..k).map(|_| rat(next(), 1 + next().abs())).collect();
            let e: Vec<BigRational> = (1..=k)
                .map(|i| {
                    // elementary symmetric e_i
                    let mut acc = BigRational::zero();
                    let idx: Vec<usize> = (0..k).collect();
                    fn combos(rest: &[usize], need: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                        if need == 0 {
                            out.push(cur.clone());
                            return;
                        }
                        for (pos, &x) in rest.iter().enumerate() {
                            cur.push(x);
                            combos(&rest[pos + 1..], need - 1, cur, out);
                            cur.pop();
                        }
                    }
                    let mut out = Vec::new();
                    combos(&idx, i, &mut Vec::new(), &mut out);
                    for combo in out {
                        let mut prod = BigRational::one();
                        for j in combo {
                            prod *= &alphas[j];
                        }
                        acc += prod;
                    }
                    acc
                })
                .collect();
            let p: Vec<BigRational> = (1..=8u32)
                .map(|r| alphas.iter().map(|a| {
                    let mut x = BigRational::one();
                    for _ in 0..r { x *= a; }
                    x
                }).sum())
                .collect();
            let b = newton_convert(k, 8);
            for r in 1..=8usize {
                assert_eq!(b.p_polys[r - 1].eval_rational(&e), p[r - 1], "k={} r={}", k, r);
                assert_eq!(b.r_polys[r - 1].eval_rational(&p[..k.max(1)].to_vec().iter().cloned().chain(std::iter::repeat(BigRational::zero())).take(k).collect::<Vec<_>>()), p[r - 1], "R k={} r={}", k, r);
            }
            for i in 1..=k {
                assert_eq!(b.q_polys[i - 1].eval_rational(&p[..k]), e[i - 1], "Q k={} i={}", k, i);
            }
        }
    }

    #[test]
    fn dim_formula_values() {
        let k3 = surface(13, 4, &[1, 1, 1, 1], 2);
        assert_eq!(dim_formula(&k3, &CharClass { w: vec![0, 0, 0, 0] }), 3);
        assert_eq!(dim_formula(&k3, &CharClass::canonical(&[1, 2, 2, 3], 4, &k3.h)), 1);
        assert_eq!(dim_formula(&k3, &CharClass::canonical(&[1, 1, 3, 3], 4, &k3.h)), 2);
        let hesse = surface(7, 3, &[1, 1, 1], 3);
        assert_eq!(dim_formula(&hesse, &CharClass { w: vec![0, 1, 2] }), 0);
        assert_eq!(dim_formula(&hesse, &CharClass { w: vec![0, 0, 0] }), 2);
    }

    #[test]
    fn charpoly_small_cases() {
        // k = 1: p_1 = alpha -> 1 - alpha t
        let alpha = Cyclo::root(4, 1);
        let c = charpoly_from_counts(&[alpha.clone()]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0], Cyclo::one());
        assert_eq!(c[1], alpha.neg());
        // k = 2 with alpha + beta and alpha^2 + beta^2
        let a = Cyclo::from_int(3);
        let b = Cyclo::from_int(5);
        let p1 = a.add(&b);
        let p2 = a.mul(&a).add(&b.mul(&b));
        let c = charpoly_from_counts(&[p1.clone(), p2]);
        assert_eq!(c[1], p1.neg());
        assert_eq!(c[2], Cyclo::from_int(15));
    }

    #[test]
    fn hesse_l_function_trivial_class() {
        // q = 7, lambda = 3: the trivial-class numerator is quadratic with
        // e_2 = 7, and the rational function reproduces the counts
        let s = surface(7, 3, &[1, 1, 1], 3);
        let cls = classes(&s);
        let trivial = cls.iter().find(|c| c.is_trivial()).unwrap();
        let l = artin_l(&s, trivial, 4).unwrap();
        assert_eq!(l.k, 2);
        assert_eq!(l.numerator.len(), 3);
        assert_eq!(l.numerator[2], Cyclo::from_int(7));
        assert!(l.certified_through >= 5);
        assert_eq!(l.sources[..4], [CountSource::Formula; 4]);
        // denominator (1 - t)(1 - 7t)
        assert_eq!(l.denominator, vec![Cyclo::from_int(1), Cyclo::from_int(-8), Cyclo::from_int(7)]);
        // oracle agreement for the first two count levels
        let table = twist_table(&s, 1).unwrap();
        let n1 = oracle_n_from(&s, &table, trivial, false);
        assert_eq!(n1, l.series_count(1));
        let n2 = oracle_n(&s, 2, trivial).unwrap();
        assert_eq!(n2, l.series_count(2));
        // Weil bounds with the functional-equation symmetry
        let w = weil_check(&l.numerator, 7, 1, true).unwrap();
        assert!(w.pass, "{}", w.detail);
    }

    #[test]
    fn permutation_class_l_is_one() {
        let s = surface(7, 3, &[1, 1, 1], 3);
        let c = CharClass { w: vec![0, 1, 2] };
        let l = artin_l(&s, &c, 3).unwrap();
        assert_eq!(l.numerator, vec![Cyclo::one()]);
        assert_eq!(l.denominator, vec![Cyclo::one()]);
        for v in &l.series[1..] {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn k3_zeta_matches_closed_product() {
        // q = 13, lambda = 2: zeta = 1 / ((1-t)(1-qt)(1-q^2 t) (1-uqt)^3
        // (1-u'qt)^3 (1-vqt)^12 Q(t)) through t^8
        let s = surface(13, 4, &[1, 1, 1, 1], 2);
        let z = zeta(&s, 8).unwrap();
        // u = phi_2(1 - lambda^2) = phi_2(-3) = +1, u' = phi_2(1 + lambda^2) = phi_2(5) = -1,
        // v = (-1)^((q-1)/4) u u' = (-1)^3 * -1 = +1
        let (u, up, v) = (1i64, -1i64, 1i64);
        let q = 13i64;
        let lin = |a: i64| vec![Cyclo::one(), Cyclo::from_int(-a)];
        let mut den = vec![Cyclo::one()];
        for factor in [lin(1), lin(q), lin(q * q)] {
            den = poly_mul_trunc(&den, &factor, 40);
        }
        for _ in 0..3 {
            den = poly_mul_trunc(&den, &lin(u * q), 40);
        }
        for _ in 0..3 {
            den = poly_mul_trunc(&den, &lin(up * q), 40);
        }
        for _ in 0..12 {
            den = poly_mul_trunc(&den, &lin(v * q), 40);
        }
        // Q(t) from the trivial factor of the assembly itself: instead,
        // verify the closed shape by checking that the non-Q part divides
        // the assembled denominator and the quotient is a cubic with
        // integer coefficients whose alpha_1-factor is (1 - phi2(1-lambda^4) q t)
        let num_series = series_div(&z.numerator, &z.denominator, 8);
        let mut closed_with_q = den.clone();
        // extract the trivial-class charpoly (the k = 3 factor)
        let trivial = z.factors.iter().find(|f| f.class_w.iter().all(|&x| x == 0)).unwrap();
        // trivial denominator = Q(t) * (1-t)(1-qt)(1-q^2 t); divide out the tail
        let mut qt = trivial.denominator.clone();
        for a in [1i64, q, q * q] {
            qt = exact_poly_div(&qt, &lin(a));
        }
        assert_eq!(qt.len(), 4, "Q(t) must be cubic");
        for c in &qt {
            assert!(c.as_integer().is_ok(), "Q(t) integer coefficients");
        }
        closed_with_q = poly_mul_trunc(&closed_with_q, &qt, 40);
        let closed_series = series_div(&[Cyclo::one()], &closed_with_q, 8);
        for j in 0..=8 {
            assert_eq!(num_series[j], closed_series[j], "zeta coefficient t^{}", j);
        }
        // alpha_1 = phi_2(1 - 16) q = phi_2(-15) * 13 = phi_2(11) * 13 = -13
        let alpha1_inv = Cyclo::from_rational(rat(1, -13));
        let mut horner = Cyclo::zero();
        for c in qt.iter().rev() {
            horner = horner.mul(&alpha1_inv).add(c);
        }
        assert!(horner.is_zero(), "(1 - alpha_1 t) divides Q(t)");
        // zeta series coefficients are integers (checked in zeta()) and the
        // first one matches the plain point count
        let plain = crate::counting::oracle_count_plain(&s, 1).unwrap();
        assert_eq!(z.series_integers[1], BigInt::from(plain));
    }

    fn exact_poly_div(num: &[Cyclo], den: &[Cyclo]) -> Vec<Cyclo> {
        // exact division of polynomials with den of degree 1: (1 - a t)
        assert_eq!(den.len(), 2);
        assert_eq!(den[0], Cyclo::one());
        let a = den[1].neg();
        let mut out: Vec<Cyclo> = Vec::with_capacity(num.len() - 1);
        let mut carry = Cyclo::zero();
        for c in num.iter().take(num.len() - 1) {
            let v = c.add(&carry);
            out.push(v.clone());
            carry = v.mul(&a);
        }
        // remainder must vanish: num_last + carry = 0
        assert_eq!(num.last().unwrap().add(&carry), Cyclo::zero(), "non-exact division");
        out
    }

    #[test]
    fn relation_2f1_and_recursion_small() {
        // d = 3, q = 7: all classes, r <= 3, lambda outside mu_3
        for lam in [3u64, 5, 6] {
            let s = surface(7, 3, &[1, 1, 1], lam);
            for c in classes(&s) {
                for r in 1..=3u32 {
                    let w = verify_f_red_recursion(&s, &c, r).unwrap();
                    assert!(w.pass, "{}", w.name);
                }
            }
        }
        // the 2F1 relation for d = 4, q = 13, (a, b, c) = (1, 3, 2)
        let ctx = build_field(13, 1).unwrap();
        // mu_4 in F_13 is {1, 5, 8, 12}; lambda = 2, 6 are admissible
        for lam in [2u64, 6] {
            for r in 1..=3u32 {
                let w = verify_relation_2f1(&ctx, 4, 1, 3, 2, FieldElem(lam), r).unwrap();
                assert!(w.pass, "{}", w.name);
            }
        }
        // inadmissible parameters are rejected
        assert!(verify_relation_2f1(&ctx, 4, 1, 1, 2, FieldElem(2), 2).is_err());
        assert!(verify_relation_2f1(&ctx, 4, 0, 3, 2, FieldElem(2), 2).is_err());
        assert!(verify_relation_2f1(&ctx, 4, 1, 3, 2, FieldElem(1), 2).is_err());
    }

    #[test]
    fn quartic_one_value_q13() {
        let s = surface(13, 4, &[1, 1, 1, 1], 2);
        for m in [1u64, 2, 3] {
            for r in 1..=3u32 {
                let w = verify_quartic_one_value(&s, m, r).unwrap();
                assert!(w.pass, "{}: {}", w.name, w.detail);
            }
        }
    }

    #[test]
    fn weil_check_rejects_bad_polynomials() {
        // roots of modulus 2 and 3: fails weight-2 purity for q = 5-ish
        let bad = vec![Cyclo::one(), Cyclo::from_int(-5), Cyclo::from_int(6)];
        let w = weil_check(&bad, 6, 1, false).unwrap();
        assert!(!w.pass);
        // vacuous degree 0
        let unit = vec![Cyclo::one()];
        assert!(weil_check(&unit, 7, 1, false).unwrap().pass);
    }
}

impl LSeries {
    /// N_r reproduced by the stored series data (1-indexed).
    pub fn series_count(&self, r: usize) -> Cyclo {
        // recover counts from log-derivative of the stored series:
        // d/dt log S = sum N_r t^{r-1}; equivalently N_r = r s_r - sum_{j<r} N_j s_{r-j}
        let s = &self.series;
        let mut counts: Vec<Cyclo> = Vec::with_capacity(r);
        for j in 1..=r {
            let mut acc = s[j].scalar_mul(&BigRational::from(BigInt::from(j as i64)));
            for i in 1..j {
                acc = acc.sub(&counts[i - 1].mul(&s[j - i]));
            }
            counts.push(acc);
        }
        counts[r - 1].clone()
    }
}

#[cfg(test)]
mod hesse_e2_tests {
    use super::*;
    use crate::counting::dwork_f_red;
    use crate::ffield::build_field;

    #[test]
    fn hesse_second_symmetric_function_is_q_over_j_squared() {
        // for the Hesse trivial class, alpha_1 alpha_2 = q forces
        // (F_1^2 - F_2)/2 = q / j(phi_3^m, phi_3^m)^2
        let ctx = build_field(7, 1).unwrap();
        let s = Surface::new(&ctx, 3, vec![1, 1, 1], FieldElem(3)).unwrap();
        let w = vec![1u64, 1, 1]; // trivial class representative m = 1
        let f1 = dwork_f_red(&s, &w, 1).unwrap();
        let f2 = dwork_f_red(&s, &w, 2).unwrap();
        let e2 = f1
            .mul(&f1)
            .sub(&f2)
            .scalar_mul(&BigRational::new(BigInt::one(), BigInt::from(2)));
        let j = true_j_pow(&ctx, 3, &w, 1);
        // j^2 e2 = q, checked without division
        assert_eq!(j.mul(&j).mul(&e2), Cyclo::from_int(7));
    }
}

#[cfg(test)]
mod general_diagonal_tests {
    use super::*;
    use crate::counting::classes;
    use crate::ffield::build_field;

    #[test]
    fn non_dwork_surface_l_functions_certify() {
        // (d, n, h, q) = (4, 3, (1,1,2), 17), a smooth member: the general
        // assembly (torus formula plus Fermat difference terms) must
        // produce certified rational L-functions for every class
        let ctx = build_field(17, 1).unwrap();
        let s = Surface::new(&ctx, 4, vec![1, 1, 2], FieldElem(2)).unwrap();
        assert!(s.is_smooth());
        let cls = classes(&s);
        assert_eq!(cls.len(), 4);
        let mut numerator_degree_sum = 0;
        let mut k_sum = 0;
        for c in &cls {
            let k = dim_formula(&s, c);
            let l = artin_l(&s, c, 3).unwrap();
            assert!(l.certified_through >= 3, "class {:?}", c.w);
            // odd n: the numerator is the degree-k(w) characteristic factor
            assert_eq!(l.numerator.len() as u64, k + 1, "class {:?}", c.w);
            numerator_degree_sum += l.numerator.len() - 1;
            k_sum += k as usize;
            // curve weight: numerator roots have modulus sqrt(q)
            if k > 0 {
                let w = weil_check(&l.numerator, 17, 1, false).unwrap();
                assert!(w.pass, "class {:?}: {}", c.w, w.detail);
            }
        }
        // total middle-cohomology bookkeeping matches the dimension lattice count
        assert_eq!(numerator_degree_sum, k_sum);
        // and the zeta series has integer coefficients with N_1 as t^1
        let z = zeta(&s, 4).unwrap();
        let plain = crate::counting::oracle_count_plain(&s, 1).unwrap();
        assert_eq!(z.series_integers[1], BigInt::from(plain));
    }
}

#[cfg(test)]
mod singular_tests {
    use super::*;
    use crate::counting::classes;
    use crate::ffield::build_field;

    #[test]
    fn singular_members_get_counts_only_series_and_no_zeta() {
        // lambda in mu_3 makes the Hesse member singular
        let ctx = build_field(7, 1).unwrap();
        let s = Surface::new(&ctx, 3, vec![1, 1, 1], FieldElem(2)).unwrap();
        assert!(!s.is_smooth());
        let cls = classes(&s);
        let trivial = cls.iter().find(|c| c.is_trivial()).unwrap();
        let l = artin_l(&s, trivial, 3).unwrap();
        assert!(l.numerator.is_empty());
        assert_eq!(l.certified_through, 0);
        // the counts-only series still reproduces the point counts
        let n1 = crate::counting::dwork_n(&s, trivial, 1).unwrap();
        assert_eq!(l.series_count(1), n1);
        // expand falls back to the stored series instead of panicking
        assert_eq!(l.expand(2).len(), 3);
        // zeta refuses the singular member with a typed error
        assert!(matches!(zeta(&s, 4), Err(LfunError::Unsupported(_))));
    }
}
