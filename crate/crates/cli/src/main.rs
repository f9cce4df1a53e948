//! ffhyper: exact Gauss/Jacobi sums, hypergeometric values, equivariant
//! point counts, and L-functions / zeta functions of diagonal hypersurfaces
//! over finite fields.
//!
//! Exit codes: 0 success, 2 configuration error, 3 enumeration budget
//! exceeded, 4 mathematical mismatch (a verification failed).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};


use ffhyper::counting::{
    classes, dwork_n, formula_n, oracle_count_plain, oracle_n_from, twist_table,
    CharClass, CountError, Surface,
};
use ffhyper::ffield::{build_field, FieldCtx, FieldElem};
use ffhyper::hyperf::{hyper_f, hyper_f_reduced, HGParams};
use ffhyper::lfun::{artin_l, zeta};
use ffhyper::report::{CountRow, CycloJson, FieldJson, LSeriesJson, Report, ValueRow};
use ffhyper::verify::CheckOutcome;
use ffhyper::{gauss, jacobi, Char, Cyclo};

const EXIT_CONFIG: i32 = 2;
const EXIT_BUDGET: i32 = 3;
const EXIT_MISMATCH: i32 = 4;

#[derive(Parser)]
#[command(
    name = "ffhyper",
    about = "Exact character sums, hypergeometric functions over finite fields, and Artin L-functions of diagonal hypersurfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to a file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate Gauss sums g(phi^k)
    Gauss {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        /// Restrict to one character exponent
        #[arg(long)]
        k: Option<u64>,
    },
    /// Jacobi sum of the characters phi^{k_1}, ..., phi^{k_n}
    Jacobi {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        /// Comma-separated character exponents
        #[arg(long, value_delimiter = ',')]
        chars: Vec<u64>,
    },
    /// Hypergeometric function F(alphas; betas; lambda)
    Hyperf {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<u64>,
        /// lambda as an integer literal (prime fields) or g^k
        #[arg(long)]
        lambda: String,
    },
    /// Equivariant point counts of a diagonal hypersurface
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, value_delimiter = ',')]
        h: Vec<u64>,
        #[arg(long)]
        lambda: String,
        /// Extension level r (count over F_{q^r})
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// all | trivial | w comma-separated (e.g. 0,1,2)
        #[arg(long, default_value = "all")]
        classes: String,
        /// Cross-check the closed formulas against the enumeration oracle
        #[arg(long)]
        verify: Option<String>,
        /// exact (default) or numeric-assisted integer extraction
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Artin L-function of a character class
    Lfunction {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, value_delimiter = ',')]
        h: Vec<u64>,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value = "all")]
        classes: String,
        /// Certification truncation order
        #[arg(long, default_value_t = 6)]
        trunc: usize,
    },
    /// Zeta function of a diagonal hypersurface
    Zeta {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long)]
        d: u64,
        #[arg(long, value_delimiter = ',')]
        h: Vec<u64>,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 8)]
        trunc: usize,
    },
    /// Run verification suites: identities | counts | relations | all
    Verify {
        suite: String,
        /// Restrict the identity suite to one field
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        f: u32,
    },
}

fn fail_config(msg: &str) -> ! {
    eprintln!("configuration error: {}", msg);
    std::process::exit(EXIT_CONFIG);
}

fn parse_lambda(ctx: &std::sync::Arc<FieldCtx>, s: &str) -> FieldElem {
    if let Some(rest) = s.strip_prefix("g^") {
        match rest.parse::<i64>() {
            Ok(k) => ctx.g_pow(k),
            Err(_) => fail_config(&format!("bad generator exponent in lambda: {}", s)),
        }
    } else {
        match s.parse::<i64>() {
            Ok(v) => {
                if ctx.f > 1 {
                    fail_config("integer lambda literals are only canonical over prime fields; use g^k");
                }
                ctx.from_int(v)
            }
            Err(_) => fail_config(&format!("bad lambda: {}", s)),
        }
    }
}

fn field_or_exit(p: u64, f: u32) -> std::sync::Arc<FieldCtx> {
    match build_field(p, f) {
        Ok(c) => c,
        Err(e) => fail_config(&e.to_string()),
    }
}

fn surface_or_exit(
    ctx: &std::sync::Arc<FieldCtx>,
    d: u64,
    h: &[u64],
    lambda: FieldElem,
) -> Surface {
    match Surface::new(ctx, d, h.to_vec(), lambda) {
        Ok(s) => s,
        Err(e) => fail_config(&e.to_string()),
    }
}

fn selected_classes(s: &Surface, spec: &str) -> Vec<CharClass> {
    let all = classes(s);
    match spec {
        "all" => all,
        "trivial" => all.into_iter().filter(|c| c.is_trivial()).collect(),
        w => {
            let parts: Result<Vec<u64>, _> = w.split(',').map(|x| x.parse::<u64>()).collect();
            match parts {
                Ok(wv) if wv.len() == s.n && wv.iter().sum::<u64>() % s.d == 0 => {
                    vec![CharClass::canonical(&wv, s.d, &s.h)]
                }
                _ => fail_config(&format!("bad class selector: {}", w)),
            }
        }
    }
}

fn emit(report: &Report, format: Format, output: &Option<PathBuf>, exit: i32) -> ! {
    let body = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("cannot write {}: {}", path.display(), e);
                std::process::exit(EXIT_CONFIG);
            }
        }
        None => {
            let mut stdout = std::io::stdout();
            let _ = stdout.write_all(body.as_bytes());
            let _ = stdout.flush();
        }
    }
    std::process::exit(exit);
}

fn count_exit(e: &CountError) -> i32 {
    match e {
        CountError::Budget(_) => EXIT_BUDGET,
        _ => EXIT_CONFIG,
    }
}

fn lfun_exit(e: &ffhyper::lfun::LfunError) -> i32 {
    use ffhyper::lfun::LfunError;
    match e {
        LfunError::Count(CountError::Budget(_)) => EXIT_BUDGET,
        LfunError::Certification(_) => EXIT_MISMATCH,
        _ => EXIT_CONFIG,
    }
}

fn main() {
    let cli = Cli::parse();
    let format = cli.format;
    let output = cli.output.clone();

    match cli.cmd {
        Cmd::Gauss { p, f, k } => {
            let ctx = field_or_exit(p, f);
            let config = serde_json::json!({"p": p, "f": f, "k": k});
            let mut rep = Report::new("gauss", config);
            rep.field = Some(FieldJson::of(&ctx));
            let ks: Vec<u64> = match k {
                Some(k) => vec![k % (ctx.q - 1)],
                None => (0..ctx.q - 1).collect(),
            };
            for k in ks {
                let g = gauss(&Char::new(&ctx, k as i64));
                rep.values.push(ValueRow {
                    name: format!("g(phi^{})", k),
                    value: CycloJson::of(&g),
                });
            }
            emit(&rep, format, &output, 0);
        }
        Cmd::Jacobi { p, f, chars } => {
            if chars.is_empty() {
                fail_config("need at least one character exponent");
            }
            let ctx = field_or_exit(p, f);
            let config = serde_json::json!({"p": p, "f": f, "chars": chars});
            let mut rep = Report::new("jacobi", config);
            rep.field = Some(FieldJson::of(&ctx));
            let cs: Vec<Char> = chars.iter().map(|&k| Char::new(&ctx, k as i64)).collect();
            let j = jacobi(&cs);
            let total: u64 = chars.iter().map(|&k| k % (ctx.q - 1)).sum::<u64>() % (ctx.q - 1);
            rep.values.push(ValueRow {
                name: format!(
                    "j(phi^{:?}){}",
                    chars,
                    if total == 0 { " [product trivial]" } else { "" }
                ),
                value: CycloJson::of(&j),
            });
            emit(&rep, format, &output, 0);
        }
        Cmd::Hyperf { p, f, alphas, betas, lambda } => {
            let ctx = field_or_exit(p, f);
            if alphas.len() != betas.len() {
                fail_config("only balanced parameter lists are in scope (#alphas = #betas)");
            }
            let lam = parse_lambda(&ctx, &lambda);
            let config = serde_json::json!({
                "p": p, "f": f, "alphas": alphas, "betas": betas, "lambda": lambda
            });
            let mut rep = Report::new("hyperf", config);
            rep.field = Some(FieldJson::of(&ctx));
            let a: Vec<Char> = alphas.iter().map(|&k| Char::new(&ctx, k as i64)).collect();
            let b: Vec<Char> = betas.iter().map(|&k| Char::new(&ctx, k as i64)).collect();
            let params = match HGParams::new(a, b) {
                Ok(p) => p,
                Err(e) => fail_config(&e),
            };
            let v = hyper_f(&params, lam);
            rep.values.push(ValueRow { name: "F(alphas; betas; lambda)".into(), value: CycloJson::of(&v) });
            match hyper_f_reduced(&params, lam) {
                Ok(red) => rep.values.push(ValueRow {
                    name: "F_red (common parameters cancelled)".into(),
                    value: CycloJson::of(&red),
                }),
                Err(_) => {
                    // residual lists collide: reduction not applicable
                }
            }
            if lam.0 == 0 {
                rep.values.push(ValueRow {
                    name: "note: lambda = 0 kills every term (eta(0) = 0)".into(),
                    value: CycloJson::of(&Cyclo::zero()),
                });
            }
            emit(&rep, format, &output, 0);
        }
        Cmd::Count { p, f, d, h, lambda, r, classes: class_spec, verify, mode } => {
            if mode != "exact" && mode != "numeric-assisted" {
                fail_config("mode must be exact or numeric-assisted");
            }
            let ctx = field_or_exit(p, f);
            let lam = parse_lambda(&ctx, &lambda);
            let s = surface_or_exit(&ctx, d, &h, lam);
            let config = serde_json::json!({
                "p": p, "f": f, "d": d, "h": h, "lambda": lambda, "r": r,
                "classes": class_spec, "verify": verify, "mode": mode
            });
            let mut rep = Report::new("count", config);
            rep.field = Some(FieldJson::of(&ctx));
            let sel = selected_classes(&s, &class_spec);
            let do_verify = verify.as_deref() == Some("oracle");
            let table = if do_verify {
                match twist_table(&s, r) {
                    Ok(t) => Some(t),
                    Err(e @ CountError::Budget(_)) => {
                        eprintln!("oracle budget exceeded: {}", e);
                        rep.checks.push(CheckOutcome {
                            name: "oracle-verification".into(),
                            pass: false,
                            witness: Some(format!("budget: {}", e)),
                        });
                        emit(&rep, format, &output, EXIT_BUDGET);
                    }
                    Err(e) => fail_config(&e.to_string()),
                }
            } else {
                None
            };
            let mut mismatch = false;
            for c in &sel {
                let value = if s.lambda.0 == 0 {
                    ffhyper::counting::fermat_n(&s, c, r, false)
                } else if s.is_dwork() {
                    match dwork_n(&s, c, r) {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!("count failed: {}", e);
                            std::process::exit(count_exit(&e));
                        }
                    }
                } else {
                    match formula_n(&s, c, r) {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!("count failed: {}", e);
                            std::process::exit(count_exit(&e));
                        }
                    }
                };
                let method = if s.lambda.0 == 0 {
                    "fermat"
                } else if s.is_dwork() {
                    "dwork"
                } else {
                    "formula"
                };
                let integer = if mode == "numeric-assisted" {
                    ffhyper::numeric::round_to_integer(&value, 64).map(|v| v.to_string())
                } else {
                    value.as_integer().ok().map(|v| v.to_string())
                };
                rep.counts.push(CountRow {
                    w: c.w.clone(),
                    r,
                    method: method.into(),
                    value: CycloJson::of(&value),
                    integer,
                });
                if let Some(t) = &table {
                    let oracle = oracle_n_from(&s, t, c, false);
                    let pass = oracle == value;
                    if !pass {
                        mismatch = true;
                    }
                    rep.checks.push(CheckOutcome {
                        name: format!("oracle-match w={:?} r={}", c.w, r),
                        pass,
                        witness: if pass { None } else { Some(format!("q={} lambda={} w={:?} r={}", ctx.q, lambda, c.w, r)) },
                    });
                }
            }
            if do_verify {
                if let Ok(plain) = oracle_count_plain(&s, r) {
                    let mut sum = Cyclo::zero();
                    for c in classes(&s) {
                        sum = sum.add(&oracle_n_from(&s, table.as_ref().unwrap(), &c, false));
                    }
                    let ok = sum.as_integer().map(|v| v == plain.into()).unwrap_or(false);
                    if !ok {
                        mismatch = true;
                    }
                    rep.checks.push(CheckOutcome {
                        name: format!("class-sum-vs-plain r={}", r),
                        pass: ok,
                        witness: None,
                    });
                }
            }
            emit(&rep, format, &output, if mismatch { EXIT_MISMATCH } else { 0 });
        }
        Cmd::Lfunction { p, f, d, h, lambda, classes: class_spec, trunc } => {
            let ctx = field_or_exit(p, f);
            let lam = parse_lambda(&ctx, &lambda);
            let s = surface_or_exit(&ctx, d, &h, lam);
            let config = serde_json::json!({
                "p": p, "f": f, "d": d, "h": h, "lambda": lambda,
                "classes": class_spec, "trunc": trunc
            });
            let mut rep = Report::new("lfunction", config);
            rep.field = Some(FieldJson::of(&ctx));
            for c in selected_classes(&s, &class_spec) {
                match artin_l(&s, &c, trunc) {
                    Ok(l) => rep.lseries.push(LSeriesJson::of(&l)),
                    Err(e) => {
                        eprintln!("L-function assembly failed for w={:?}: {}", c.w, e);
                        std::process::exit(lfun_exit(&e));
                    }
                }
            }
            emit(&rep, format, &output, 0);
        }
        Cmd::Zeta { p, f, d, h, lambda, trunc } => {
            let ctx = field_or_exit(p, f);
            let lam = parse_lambda(&ctx, &lambda);
            let s = surface_or_exit(&ctx, d, &h, lam);
            let config = serde_json::json!({
                "p": p, "f": f, "d": d, "h": h, "lambda": lambda, "trunc": trunc
            });
            let mut rep = Report::new("zeta", config);
            rep.field = Some(FieldJson::of(&ctx));
            match zeta(&s, trunc) {
                Ok(z) => {
                    for l in &z.factors {
                        rep.lseries.push(LSeriesJson::of(l));
                    }
                    rep.zeta_series = z.series_integers.iter().map(|v| v.to_string()).collect();
                    emit(&rep, format, &output, 0);
                }
                Err(e) => {
                    eprintln!("zeta assembly failed: {}", e);
                    std::process::exit(lfun_exit(&e));
                }
            }
        }
        Cmd::Verify { suite, p, f } => {
            let config = serde_json::json!({"suite": suite, "p": p, "f": f});
            let mut rep = Report::new("verify", config);
            let started = std::time::Instant::now();
            let checks: Vec<CheckOutcome> = match suite.as_str() {
                "identities" => match p {
                    Some(p) => ffhyper::verify::identities_for_field(p, f),
                    None => ffhyper::verify::identity_fields()
                        .into_iter()
                        .flat_map(|(p, f)| ffhyper::verify::identities_for_field(p, f))
                        .collect(),
                },
                "counts" => {
                    let mut v = Vec::new();
                    for (p, d, h) in ffhyper::verify::count_surfaces() {
                        v.extend(ffhyper::verify::counts_for_surface(p, d, &h));
                        v.extend(ffhyper::verify::fermat_for_surface(p, d, &h));
                    }
                    v.extend(ffhyper::verify::dwork_extension_counts(7, 3, &[3, 5], &[1, 2, 3]));
                    v.extend(ffhyper::verify::dwork_extension_counts(13, 4, &[2], &[1, 2]));
                    v
                }
                "relations" => ffhyper::verify::relation_checks(),
                "all" => ffhyper::verify::verify_all(),
                other => fail_config(&format!("unknown suite: {}", other)),
            };
            // timing is diagnostic only: stderr, never in the report
            eprintln!(
                "verify {}: {} checks in {:.2?}",
                suite,
                checks.len(),
                started.elapsed()
            );
            let all_pass = checks.iter().all(|c| c.pass);
            rep.checks = checks;
            emit(&rep, format, &output, if all_pass { 0 } else { EXIT_MISMATCH });
        }
    }
}
