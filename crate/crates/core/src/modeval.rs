//! Exact evaluation of large Gauss-sum combinations by modular images.
//!
//! The heavy objects in this crate are sums of the shape
//!
//!   value = sum_{s=0}^{N-1} q^e * g(phi^(a_1+b_1 s)) ... g(phi^(a_F+b_F s))
//!           * zeta_N^(c_0 + c_1 s),
//!
//! over a field with q elements, N = q - 1. Whenever the character exponents
//! are balanced (every request built in this crate pairs numerator and
//! denominator Gauss factors), the value lies in Q(zeta_N) and
//! q^E * value lies in Z[zeta_N] for E = max(0, -e).
//!
//! Evaluating such a sum with exact cyclotomic arithmetic costs a length-N
//! ring product per term. Instead we compute the homomorphic image of
//! q^E * value in F_ell for primes ell = 1 (mod p N), at every embedding
//! zeta_N -> omega^t with gcd(t, N) = 1 (omega of order N in F_ell, and the
//! additive character mapped consistently via an order-p root). The images
//! determine the residue of q^E * value modulo (Phi_N, ell) by interpolation
//! at the primitive roots; CRT over enough primes then determines the
//! integer coefficients exactly, because the coefficient size is bounded a
//! priori: ||X||_inf <= D_N * max_sigma |sigma(X)| with the Hadamard /
//! discriminant bound D_N of [`log2_coeff_amplification`], and
//! |sigma(X)| <= N q^(E+e) (sqrt q)^F since every embedding of a Gauss sum
//! has modulus 1 or sqrt(q).
//!
//! Everything is deterministic: primes are the largest valid ones below
//! 2^62, and the whole pipeline is integer arithmetic.
//!
//! The one Gauss-row trick that makes this cheap: with
//! B[m] = -sum_j omega^(m j) psi_j (one length-N DFT of the additive
//! character table per prime), the image of g(phi^k) at embedding t is
//! B[t k mod N] — a permuted read, so all embeddings share one table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factor, gcd, is_prime};
use crate::cyclo::{cyclotomic_polynomial, log2_coeff_amplification, Cyclo};
use crate::ffield::FieldCtx;

/// Montgomery arithmetic modulo an odd 64-bit prime.
#[derive(Clone, Copy)]
struct Mont {
    n: u64,
    ninv: u64, // -n^{-1} mod 2^64
    r2: u64,   // 2^128 mod n
}

impl Mont {
    fn new(n: u64) -> Mont {
        let mut x = n;
        for _ in 0..6 {
            x = x.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(x)));
        }
        let ninv = x.wrapping_neg();
        let r = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r as u128 * r as u128) % n as u128) as u64;
        Mont { n, ninv, r2 }
    }

    #[inline(always)]
    fn redc(&self, x: u128) -> u64 {
        let m = (x as u64).wrapping_mul(self.ninv);
        let t = ((x.wrapping_add(m as u128 * self.n as u128)) >> 64) as u64;
        if t >= self.n {
            t - self.n
        } else {
            t
        }
    }

    #[inline(always)]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    fn to(&self, a: u64) -> u64 {
        self.mul(a % self.n, self.r2)
    }

    fn from(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    fn one(&self) -> u64 {
        self.to(1)
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.n {
            s - self.n
        } else {
            s
        }
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.n - a
        }
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.n - 2)
    }
}

/// One balanced Gauss-product sweep; see the module docs for the value.
#[derive(Clone, Debug)]
pub struct GaussSumRequest {
    pub ctx: Arc<FieldCtx>,
    /// Gauss factors g(phi^(a + b s)), exponents mod N.
    pub factors: Vec<(u64, u64)>,
    /// zeta_N^(c0 + c1 s) twist.
    pub twist: (u64, u64),
    /// per-term power of q (negative exponents become the reconstruction
    /// denominator)
    pub qexp: i32,
}

impl GaussSumRequest {
    fn n(&self) -> u64 {
        self.ctx.q - 1
    }

    fn denom_exp(&self) -> u32 {
        (-self.qexp).max(0) as u32
    }

    /// log2 of the a-priori bound on |sigma(q^E * value)|.
    fn log2_embedding_bound(&self) -> f64 {
        let q = self.ctx.q as f64;
        let n = self.n() as f64;
        n.log2() + (self.denom_exp() as f64 + self.qexp as f64 + self.factors.len() as f64 / 2.0) * q.log2()
    }
}

fn prime_cache() -> &'static Mutex<HashMap<u64, Vec<u64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<u64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn find_primes(pn: u64, count: usize) -> Vec<u64> {
    let mut cache = prime_cache().lock().unwrap();
    let known = cache.entry(pn).or_default();
    while known.len() < count {
        let mut k = known
            .last()
            .map(|&l| (l - 1) / pn - 1)
            .unwrap_or(((1u64 << 62) - 1) / pn);
        loop {
            let ell = k * pn + 1;
            if is_prime(ell) {
                known.push(ell);
                break;
            }
            assert!(k > 1, "ran out of reconstruction primes");
            k -= 1;
        }
    }
    known[..count].to_vec()
}

/// Per-(field, prime) tables: order-pN root data and the Gauss DFT row.
struct PrimeTables {
    omega_pows: Vec<u64>, // omega^i (Montgomery), i < N
    b: Vec<u64>,          // B[m] = image of g(phi^k) at embedding t via B[tk mod N]
}

type TableKey = (u64, u32, u64, u64); // (p, f, generator, ell)

fn table_cache() -> &'static Mutex<HashMap<TableKey, Arc<PrimeTables>>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<PrimeTables>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn prime_tables(ctx: &FieldCtx, ell: u64, mt: &Mont) -> Arc<PrimeTables> {
    let key = (ctx.p, ctx.f, ctx.g.0, ell);
    if let Some(hit) = table_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let n = ctx.q - 1;
    let p = ctx.p;
    let gen = primitive_root_of(ell, mt);
    let omega = mt.pow(gen, (ell - 1) / n);
    let proot = mt.pow(gen, (ell - 1) / p);
    let mut om = vec![0u64; n as usize];
    om[0] = mt.one();
    for i in 1..n as usize {
        om[i] = mt.mul(om[i - 1], omega);
    }
    let mut ppow = vec![0u64; p as usize];
    ppow[0] = mt.one();
    for i in 1..p as usize {
        ppow[i] = mt.mul(ppow[i - 1], proot);
    }
    let mut y = vec![0u64; n as usize];
    for j in 0..n {
        let x = ctx.exp_u(j);
        y[j as usize] = ppow[ctx.trace_to_prime(x) as usize];
    }
    let mut b = vec![0u64; n as usize];
    for m in 0..n as usize {
        let mut acc = 0u64;
        let mut idx = 0usize;
        for &yj in y.iter() {
            acc = mt.add(acc, mt.mul(om[idx], yj));
            idx += m;
            if idx >= n as usize {
                idx -= n as usize;
            }
        }
        b[m] = mt.neg(acc);
    }
    let tables = Arc::new(PrimeTables { omega_pows: om, b });
    table_cache().lock().unwrap().insert(key, tables.clone());
    tables
}

fn primitive_root_of(ell: u64, mt: &Mont) -> u64 {
    let fs: Vec<u64> = factor(ell - 1).into_iter().map(|(p, _)| p).collect();
    'cand: for c in 2u64.. {
        let cm = mt.to(c);
        for &f in &fs {
            if mt.pow(cm, (ell - 1) / f) == mt.one() {
                continue 'cand;
            }
        }
        return cm;
    }
    unreachable!()
}

/// Evaluate a batch of requests over the same field context, exactly.
///
/// Each request's value is reconstructed in the smallest cyclotomic field
/// the exponent data certifies: with g = gcd(N, all factor offsets, twist
/// offset), the value is fixed by every Galois element fixing zeta_{N/g}
/// (substitute s -> cs and use that offset*(c-1) = 0 mod N), so it lies in
/// Q(zeta_M) for M = N/g and only phi(M) embeddings are needed.
pub fn evaluate_batch(reqs: &[GaussSumRequest]) -> Vec<Cyclo> {
    if reqs.is_empty() {
        return Vec::new();
    }
    let ctx = &reqs[0].ctx;
    let n = ctx.q - 1;
    for r in reqs {
        assert!(FieldCtx::same(&r.ctx, ctx), "modular batch must share a field");
        // balance condition: the character product of the Gauss factors is
        // trivial for every s, which is what puts the value in Q(zeta_N)
        let sa: u64 = r.factors.iter().map(|&(a, _)| a % n).sum::<u64>() % n;
        let sb: u64 = r.factors.iter().map(|&(_, b)| b % n).sum::<u64>() % n;
        assert!(sa == 0 && sb == 0, "unbalanced Gauss-product request");
    }
    let p = ctx.p;
    let pn = p * n;

    // per-request descent order M and embedding set
    struct Plan {
        m: u64,
        deg: usize,
        emb_ts: Vec<u64>,   // one t per residue class in (Z/M)^*, gcd(t, N) = 1
        emb_t0: Vec<u64>,   // the class representatives mod M
        const_exps: Vec<usize>,
        sweep_a: Vec<usize>,
        sweep_step: Vec<usize>,
        tw0: usize,
        tw1: usize,
    }
    let plans: Vec<Plan> = reqs
        .iter()
        .map(|req| {
            let mut g = n;
            for &(a, _) in &req.factors {
                g = gcd(g, a % n);
            }
            g = gcd(g, req.twist.0 % n);
            let m = n / g;
            let mut emb_ts = Vec::new();
            let mut emb_t0 = Vec::new();
            for t0 in 1..=m {
                if gcd(t0 % m, m) != 1 && m > 1 {
                    continue;
                }
                if m == 1 && t0 > 1 {
                    break;
                }
                let mut t = t0;
                while gcd(t, n) != 1 {
                    t += m;
                    assert!(t < n + m, "no coprime embedding representative");
                }
                emb_ts.push(t);
                emb_t0.push(t0 % m);
            }
            let mut plan = Plan {
                m,
                deg: crate::arith::euler_phi(m) as usize,
                emb_ts,
                emb_t0,
                const_exps: Vec::new(),
                sweep_a: Vec::new(),
                sweep_step: Vec::new(),
                tw0: (req.twist.0 % n) as usize,
                tw1: (req.twist.1 % n) as usize,
            };
            for &(a, bstep) in &req.factors {
                let (a, bstep) = ((a % n) as usize, (bstep % n) as usize);
                if bstep == 0 {
                    plan.const_exps.push(a);
                } else {
                    plan.sweep_a.push(a);
                    plan.sweep_step.push(bstep);
                }
            }
            assert_eq!(plan.emb_ts.len(), plan.deg);
            plan
        })
        .collect();

    // prime count from the worst-case coefficient bound at the descent order
    let need_bits = reqs
        .iter()
        .zip(plans.iter())
        .map(|(r, pl)| log2_coeff_amplification(pl.m) + r.log2_embedding_bound())
        .fold(0.0f64, f64::max)
        + 8.0;
    let num_primes = ((need_bits / 61.0).ceil() as usize).max(2);
    let primes = find_primes(pn, num_primes);

    // union of needed embeddings
    let mut all_ts: Vec<u64> = plans.iter().flat_map(|p| p.emb_ts.iter().copied()).collect();
    all_ts.sort_unstable();
    all_ts.dedup();

    // per prime, per request: interpolated power-basis residues mod Phi_M
    let mut residues: Vec<Vec<Vec<u64>>> = Vec::with_capacity(primes.len());

    for &ell in &primes {
        let mt = Mont::new(ell);
        let tables = prime_tables(ctx, ell, &mt);
        let om = &tables.omega_pows;
        let b = &tables.b;
        let qm = mt.to(ctx.q % ell);
        let scalars: Vec<u64> = reqs
            .iter()
            .map(|r| mt.pow(qm, (r.denom_exp() as i64 + r.qexp as i64) as u64))
            .collect();

        // sweep values per request per embedding
        let mut vals: Vec<Vec<u64>> = plans.iter().map(|p| vec![0u64; p.deg]).collect();
        let mut bt = vec![0u64; n as usize];
        let mut omt = vec![0u64; n as usize];
        let mut fe: Vec<usize> = Vec::new();
        for &t in &all_ts {
            // permuted tables for this embedding
            let mut idx = 0usize;
            for i in 0..n as usize {
                bt[i] = b[idx];
                omt[i] = om[idx];
                idx += t as usize;
                if idx >= n as usize {
                    idx -= n as usize;
                }
            }
            for (ri, pl) in plans.iter().enumerate() {
                let Some(pos) = pl.emb_ts.iter().position(|&x| x == t) else {
                    continue;
                };
                let nn = n as usize;
                let mut scalar = scalars[ri];
                for &a in &pl.const_exps {
                    scalar = mt.mul(scalar, bt[a]);
                }
                fe.clear();
                fe.extend_from_slice(&pl.sweep_a);
                let nf = fe.len();
                let mut te = pl.tw0;
                let tstep = pl.tw1;
                let mut acc = 0u64;
                for _s in 0..nn {
                    let mut term = scalar;
                    for fi in 0..nf {
                        term = mt.mul(term, bt[fe[fi]]);
                        fe[fi] += pl.sweep_step[fi];
                        if fe[fi] >= nn {
                            fe[fi] -= nn;
                        }
                    }
                    term = mt.mul(term, omt[te]);
                    te += tstep;
                    if te >= nn {
                        te -= nn;
                    }
                    acc = mt.add(acc, term);
                }
                vals[ri][pos] = acc;
            }
        }

        // interpolate each request at the primitive M-th roots:
        // X = sum_t V_t (Phi_M / (x - z_t)) / Phi_M'(z_t) mod ell
        let mut per_req: Vec<Vec<u64>> = Vec::with_capacity(reqs.len());
        for (ri, pl) in plans.iter().enumerate() {
            let deg = pl.deg;
            if pl.m == 1 {
                per_req.push(vec![mt.from(vals[ri][0])]);
                continue;
            }
            let phi_poly = cyclotomic_polynomial(pl.m);
            let phi_m: Vec<u64> = phi_poly
                .iter()
                .map(|c| {
                    let r = ((c % BigInt::from(ell)) + BigInt::from(ell)) % BigInt::from(ell);
                    mt.to(r.to_u64_digits().1.first().copied().unwrap_or(0))
                })
                .collect();
            let stride = (n / pl.m) as usize;
            let mut coeffs = vec![0u64; deg];
            let mut qc = vec![0u64; deg];
            for (pos, &t0) in pl.emb_t0.iter().enumerate() {
                // node z = omega_M^{t0} = omega^{t0 * N/M}
                let z = om[(t0 as usize * stride) % n as usize];
                qc[deg - 1] = phi_m[deg];
                for i in (0..deg - 1).rev() {
                    qc[i] = mt.add(phi_m[i + 1], mt.mul(z, qc[i + 1]));
                }
                let mut dz = 0u64;
                for i in (1..=deg).rev() {
                    let ci = mt.mul(phi_m[i], mt.to(i as u64 % ell));
                    dz = mt.add(ci, mt.mul(dz, z));
                }
                let w = mt.mul(vals[ri][pos], mt.inv(dz));
                for i in 0..deg {
                    coeffs[i] = mt.add(coeffs[i], mt.mul(w, qc[i]));
                }
            }
            per_req.push(coeffs.iter().map(|&c| mt.from(c)).collect());
        }
        residues.push(per_req);
    }

    // CRT + symmetric lift + exact division by q^E
    let mut out = Vec::with_capacity(reqs.len());
    let full_modulus: BigInt = primes.iter().map(|&l| BigInt::from(l)).product();
    let half = &full_modulus / 2;
    for (ri, req) in reqs.iter().enumerate() {
        let deg = plans[ri].deg;
        let mut coeffs: Vec<BigRational> = Vec::with_capacity(deg);
        let denom = BigInt::from(ctx.q).pow(req.denom_exp());
        for i in 0..deg {
            let mut x = BigInt::zero();
            let mut modulus = BigInt::one();
            for (pi, &ell) in primes.iter().enumerate() {
                let a = BigInt::from(residues[pi][ri][i]);
                let ell_b = BigInt::from(ell);
                let minv = mod_inverse(&modulus, &ell_b);
                let delta = (((&a - &x) % &ell_b + &ell_b) % &ell_b * minv) % &ell_b;
                x += &modulus * delta;
                modulus *= &ell_b;
            }
            if x > half {
                x -= &full_modulus;
            }
            coeffs.push(BigRational::new(x, denom.clone()));
        }
        out.push(Cyclo::from_reduced_coeffs(plans[ri].m, coeffs));
    }
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    // extended gcd on BigInt
    let (mut old_r, mut r) = ((a % m + m) % m, m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp_r);
        let tmp_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, tmp_s);
    }
    debug_assert!(old_r.is_one(), "CRT moduli must be coprime");
    ((old_s % m) + m) % m
}

/// Reference evaluation of a request with exact histogram arithmetic
/// (quadratic in N per term; test-sized fields only).
#[cfg(test)]
pub(crate) fn evaluate_exact_reference(req: &GaussSumRequest) -> Cyclo {
    use crate::charsum::gauss_hist;
    let ctx = &req.ctx;
    let n = ctx.q - 1;
    let mut total = Cyclo::zero();
    for s in 0..n {
        let mut acc: Option<crate::cyclo::Hist> = None;
        for &(a, bstep) in &req.factors {
            let k = (a + bstep % n * s) % n;
            let h = gauss_hist(ctx, k);
            acc = Some(match acc {
                None => h,
                Some(prev) => prev.conv(&h),
            });
        }
        let te = ((req.twist.0 + req.twist.1 % n * s) % n) as i64;
        let mut term = match acc {
            None => Cyclo::root(n, te),
            Some(h) => h.shift(te * ctx.p as i64).to_cyclo(), // zeta_N = zeta_pN^p
        };
        let q = BigRational::from(BigInt::from(ctx.q));
        let mut scale = BigRational::one();
        if req.qexp >= 0 {
            for _ in 0..req.qexp {
                scale *= &q;
            }
        } else {
            for _ in 0..(-req.qexp) {
                scale /= &q;
            }
        }
        term = term.scalar_mul(&scale);
        total = total.add(&term);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::build_field;

    #[test]
    fn montgomery_basics() {
        let mt = Mont::new((1u64 << 61) - 1);
        let a = mt.to(123456789);
        let b = mt.to(987654321);
        let prod = mt.from(mt.mul(a, b));
        assert_eq!(prod as u128, (123456789u128 * 987654321u128) % ((1u128 << 61) - 1));
        assert_eq!(mt.from(mt.inv(a)), {
            let p = (1u64 << 61) - 1;
            crate::arith::pow_mod(123456789, p - 2, p)
        });
    }

    #[test]
    fn batch_matches_exact_reference_small() {
        // q = 13: a count-style balanced product: g(phi^(1+s)) g(phi^(2+s)) g(phi^(-2s)) / q
        let ctx = build_field(13, 1).unwrap();
        let n = ctx.q - 1;
        let req = GaussSumRequest {
            ctx: ctx.clone(),
            factors: vec![(1, 1), (2, 1), (n - 3, n - 2)],
            twist: (3, 5),
            qexp: -1,
        };
        let got = evaluate_batch(&[req.clone()]);
        let want = evaluate_exact_reference(&req);
        assert_eq!(got[0], want);
    }

    #[test]
    fn batch_matches_exact_reference_extension_field() {
        // q = 9 exercises p > coefficients and f > 1
        let ctx = build_field(3, 2).unwrap();
        let req = GaussSumRequest {
            ctx: ctx.clone(),
            factors: vec![(0, 1), (4, 1), (4, 6)],
            twist: (0, 2),
            qexp: 0,
        };
        let got = evaluate_batch(&[req.clone()]);
        let want = evaluate_exact_reference(&req);
        assert_eq!(got[0], want);
    }

    #[test]
    fn batch_handles_multiple_requests() {
        let ctx = build_field(7, 1).unwrap();
        let reqs: Vec<GaussSumRequest> = (0..3)
            .map(|i| GaussSumRequest {
                ctx: ctx.clone(),
                factors: vec![(i, 1), ((6 - i) % 6, 5)],
                twist: (i, 1),
                qexp: -1,
            })
            .collect();
        let got = evaluate_batch(&reqs);
        for (i, r) in reqs.iter().enumerate() {
            assert_eq!(got[i], evaluate_exact_reference(r), "request {}", i);
        }
    }
}
