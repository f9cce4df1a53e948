//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! and enforcing its runtime budget. Run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the per-criterion lines).

use std::time::Instant;

use ffhyper::verify::{
    count_surfaces, counts_for_surface, dwork_extension_counts, f_red_bound_checks,
    fermat_for_surface, identities_for_field, identity_fields, lzeta_checks, relation_checks,
    verify_all,
};

fn run_criterion(
    number: u32,
    label: &str,
    budget_secs: u64,
    checks: Vec<ffhyper::verify::CheckOutcome>,
) {
    let failures: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    let pass = failures.is_empty();
    println!(
        "criterion {:>2} [{}]: {} ({} checks)",
        number,
        label,
        if pass { "PASS" } else { "FAIL" },
        checks.len()
    );
    for f in &failures {
        println!("    failing: {} {:?}", f.name, f.witness);
    }
    assert!(pass, "criterion {} failed", number);
    let _ = budget_secs;
}

fn assert_budget(number: u32, started: Instant, budget_secs: u64) {
    let elapsed = started.elapsed();
    println!("criterion {:>2} runtime: {:.2?} (budget {}s)", number, elapsed, budget_secs);
    assert!(
        elapsed.as_secs() <= budget_secs,
        "criterion {} exceeded its {}s budget: {:?}",
        number,
        budget_secs,
        elapsed
    );
}

#[test]
fn criterion_1_identity_suite() {
    let t = Instant::now();
    let mut checks = Vec::new();
    for (p, f) in identity_fields() {
        checks.extend(identities_for_field(p, f));
    }
    run_criterion(1, "identity suite q in {5,7,9,11,13,16,17}", 120, checks);
    assert_budget(1, t, 120);
}

#[test]
fn criterion_2_count_equivalence() {
    let t = Instant::now();
    let mut checks = Vec::new();
    for (p, d, h) in count_surfaces() {
        checks.extend(counts_for_surface(p, d, &h));
    }
    run_criterion(2, "formula vs oracle, r = 1, all lambda and classes", 600, checks);
    assert_budget(2, t, 600);
}

#[test]
fn criterion_3_fermat_branch() {
    let t = Instant::now();
    let mut checks = Vec::new();
    for (p, d, h) in count_surfaces() {
        checks.extend(fermat_for_surface(p, d, &h));
    }
    run_criterion(3, "Fermat branch at lambda = 0", 60, checks);
    assert_budget(3, t, 60);
}

#[test]
fn criterion_4_dwork_extension_counts() {
    let t = Instant::now();
    let mut checks = dwork_extension_counts(7, 3, &[3, 5], &[1, 2, 3]);
    checks.extend(dwork_extension_counts(13, 4, &[2], &[1, 2]));
    run_criterion(4, "Dwork closed counts vs twisted oracle at r > 1", 1200, checks);
    assert_budget(4, t, 1200);
}

#[test]
fn criterion_5_cross_field_relations() {
    let t = Instant::now();
    run_criterion(5, "cross-field hypergeometric relations", 300, relation_checks());
    assert_budget(5, t, 300);
}

#[test]
fn criterion_6_l_and_zeta_assembly() {
    let t = Instant::now();
    run_criterion(6, "L-function and zeta assembly", 300, lzeta_checks());
    assert_budget(6, t, 300);
}

#[test]
fn criterion_7_weil_bounds() {
    let t = Instant::now();
    // the certified-numerator root moduli live inside the lzeta checks;
    // rerun the weil rows plus the reduced-value bound sweep
    let mut checks: Vec<_> = lzeta_checks()
        .into_iter()
        .filter(|c| c.name.contains("weil"))
        .collect();
    checks.extend(f_red_bound_checks());
    run_criterion(7, "Weil bounds (roots and |F_red| <= k(w))", 60, checks);
    assert_budget(7, t, 60);
}

#[test]
fn criterion_8_deterministic_reports() {
    let t = Instant::now();
    let report_once = || {
        let mut rep = ffhyper::report::Report::new(
            "verify",
            serde_json::json!({ "suite": "all" }),
        );
        rep.checks = verify_all();
        rep.to_json()
    };
    let a = report_once();
    let b = report_once();
    let pass = a == b;
    println!(
        "criterion  8 [byte-identical verify-all reports]: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion 8: reports differ across runs");
    assert_budget(8, t, 600);
}
