//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ekverify --test acceptance`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ekverify::cli;
use ekverify::report::ReportRow;
use ekverify::scenario::{load_scenario, LoadedScenario};
use ekverify::suite;
use ekverify_core::exactpoly::rat;
use ekverify_core::functionals::{check_theorem2, Corollary};
use ekverify_core::geometry::ToricGeometry;
use ekverify_core::identities::{appendix_report, claim3_verify, remark_asymptotic, verify_identity, IdentityName};
use ekverify_core::invariants::{MetricChoice, ToricField};

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn fixture(name: &str) -> LoadedScenario {
    load_scenario(&fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

struct Outcome {
    pass: bool,
    detail: String,
}

type Result = std::result::Result<Outcome, String>;

fn all_pass(rows: &[ReportRow]) -> Outcome {
    let worst = rows
        .iter()
        .filter_map(|r| match r.value {
            ekverify::report::Value::Real(v) if r.tolerance > 0.0 => Some(v / r.tolerance),
            _ => None,
        })
        .fold(0.0, f64::max);
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| r.line()).collect();
    Outcome {
        pass: failed.is_empty() && !rows.is_empty(),
        detail: if failed.is_empty() {
            format!("{} checks, max residual/tolerance {worst:.1e}", rows.len())
        } else {
            format!("{} of {} checks not passed: {}", failed.len(), rows.len(), failed.join(" | "))
        },
    }
}

fn within(o: Outcome, start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    let pass = o.pass && t <= limit;
    Outcome { pass, detail: format!("{}; {:.1} s (limit {} s)", o.detail, t.as_secs_f64(), limit.as_secs()) }
}

fn identities() -> Result {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for name in IdentityName::ALL {
        for k in 1..=40 {
            count += 1;
            if !verify_identity(name, k).map_err(|e| e.to_string())?.pass {
                bad.push(format!("{name} k={k}"));
            }
        }
    }
    let o = Outcome { pass: bad.is_empty(), detail: format!("a1, a2, b-lemma, x1 for 1 ≤ k ≤ 40: {count} identities, failures {bad:?}") };
    Ok(within(o, start, Duration::from_secs(30)))
}

fn appendix() -> Result {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut pairs = 0;
    for m in 1..=300 {
        let r = appendix_report(m);
        pairs += r.claim1_pairs;
        if !(r.all_nonneg && r.penultimate_zero && r.claim1_pass && r.claim5_pass.unwrap_or(true)) {
            bad.push(m);
        }
        if m >= 5 && r.claim5_pass.is_none() {
            bad.push(m);
        }
    }
    let o = Outcome { pass: bad.is_empty(), detail: format!("1 ≤ m ≤ 300, {pairs} claim-1 pairs, failing m {bad:?}") };
    Ok(within(o, start, Duration::from_secs(120)))
}

fn claim3() -> Result {
    let start = Instant::now();
    let c = claim3_verify();
    let roots: Vec<usize> = c.coefficients.iter().map(|x| x.roots_in_open_interval).collect();
    let o = Outcome {
        pass: c.pass && c.expansion_matches && c.coefficients.len() == 6,
        detail: format!("expansion matches {}, Sturm roots in (1/2,1] {roots:?}, {} spot checks", c.expansion_matches, c.spot_checks),
    };
    Ok(within(o, start, Duration::from_secs(1)))
}

fn remark() -> Result {
    let r = remark_asymptotic();
    Ok(Outcome { pass: r.exact_limit == rat(-57, 625), detail: format!("limit {} (expected -57/625)", r.exact_limit) })
}

fn calibration() -> Result {
    let start = Instant::now();
    let mut rows = Vec::new();
    for name in ["cp1_square_01", "cp2_product_02"] {
        let ls = fixture(name);
        let mut bare = ls.clone();
        bare.scenario.perturbation = None;
        rows.extend(suite::calibrate(&bare).map_err(|e| e.to_string())?);
    }
    let names: Vec<&str> = rows.iter().map(|r| r.check.as_str()).collect();
    if names.iter().filter(|&&n| n == "einstein_residual").count() != 2 {
        return Err("missing Einstein residual rows".into());
    }
    Ok(within(all_pass(&rows), start, Duration::from_secs(60)))
}

fn theorem1() -> Result {
    let start = Instant::now();
    let mut rows = Vec::new();
    for (name, ks) in [("cp1_square_01", &[1][..]), ("cp1_square_02", &[1]), ("cp2_product_01", &[1, 2]), ("cp2_product_02", &[1, 2])] {
        let ls = fixture(name);
        let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(|e| e.to_string())?;
        let c = suite::compute(&geo, &ls).map_err(|e| e.to_string())?;
        rows.extend(suite::theorem1(&c, &ls, Some(ks)).map_err(|e| e.to_string())?);
    }
    Ok(within(all_pass(&rows), start, Duration::from_secs(300)))
}

fn corollaries() -> Result {
    let ls = fixture("cp2_product_02");
    let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(|e| e.to_string())?;
    let c = suite::compute(&geo, &ls).map_err(|e| e.to_string())?;
    let which = [
        Corollary::C1 { p: 0, k: 2 },
        Corollary::C2 { k: 1 },
        Corollary::C2 { k: 2 },
        Corollary::C3 { k: 2 },
        Corollary::T1Rec { k: 2 },
    ];
    Ok(all_pass(&suite::corollaries(&c, &ls, &which).map_err(|e| e.to_string())?))
}

fn pali() -> Result {
    let rows = suite::pali(&fixture("cp2_product_02"), &fixture("cp2_square_neg")).map_err(|e| e.to_string())?;
    let spreads = rows.iter().filter(|r| r.check.ends_with("_spread")).count();
    let constants = rows.iter().filter(|r| r.check == "pali_constant_fs").count();
    if spreads != 2 || constants != 4 {
        return Err(format!("expected 2 spreads and 4 constants, got {spreads} and {constants}"));
    }
    Ok(all_pass(&rows))
}

fn kenergy() -> Result {
    let mut rows = Vec::new();
    for name in ["cp1_square_02", "cp2_product_02"] {
        let ls = fixture(name);
        let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(|e| e.to_string())?;
        let c = suite::compute(&geo, &ls).map_err(|e| e.to_string())?;
        rows.extend(suite::kenergy(&c, &ls).map_err(|e| e.to_string())?);
    }
    Ok(all_pass(&rows))
}

fn theorem2() -> Result {
    let mut rows = Vec::new();
    for name in ["cp2_product_01", "cp2_product_02"] {
        let ls = fixture(name);
        let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(|e| e.to_string())?;
        let c = suite::compute(&geo, &ls).map_err(|e| e.to_string())?;
        rows.extend(suite::theorem2(&c, &ls, Some(&[2])).map_err(|e| e.to_string())?);
    }
    let asserted = rows.iter().all(|r| r.status != "gated");
    let ls = fixture("cp2_product_05");
    let geo = ToricGeometry::new(ls.scenario.reference.clone()).map_err(|e| e.to_string())?;
    let c = suite::compute(&geo, &ls).map_err(|e| e.to_string())?;
    let gate = check_theorem2(&c.ev, &c.values, 2).map_err(|e| e.to_string())?;
    let rejected = !gate.ricci_bound_ok && gate.check.is_none();
    let o = all_pass(&rows);
    Ok(Outcome {
        pass: o.pass && asserted && rejected,
        detail: format!(
            "{}; gate applied on ε ∈ {{0.1, 0.2}}: {asserted}; ε = 0.5 rejected: {rejected} (min eigenvalue {:.3} < {})",
            o.detail, gate.min_eigenvalue, gate.bound
        ),
    })
}

fn theorem3() -> Result {
    let start = Instant::now();
    let field = ToricField::new(vec![1.0, 1.0]);
    let cp2 = fixture("cp2_product_02");
    let geo = ToricGeometry::new(cp2.scenario.reference.clone()).map_err(|e| e.to_string())?;
    let c = suite::compute(&geo, &cp2).map_err(|e| e.to_string())?;
    let v = c.values.volume.value;
    let mut worst_cp2: f64 = 0.0;
    for which in [MetricChoice::Reference, MetricChoice::Perturbed] {
        let iv = c.ev.invariants(&field, which).map_err(|e| e.to_string())?;
        worst_cp2 = iv.values.iter().map(|x| x.value.abs() / v).fold(worst_cp2, f64::max);
    }
    let vanishing = worst_cp2 <= 1e-6;

    let b = fixture("blowup_product_02");
    let geo = ToricGeometry::new(b.scenario.reference.clone()).map_err(|e| e.to_string())?;
    let c = suite::compute(&geo, &b).map_err(|e| e.to_string())?;
    let vb = c.values.volume.value;
    let r = c.ev.invariants(&field, MetricChoice::Reference).map_err(|e| e.to_string())?;
    let p = c.ev.invariants(&field, MetricChoice::Perturbed).map_err(|e| e.to_string())?;
    let f0 = r.futaki().value;
    let nonzero = f0.abs() > 1e-3 * vb;
    let independence = r.values.iter().zip(&p.values).map(|(a, b)| (a.value - b.value).abs() / a.value.abs()).fold(0.0, f64::max);
    let rows = suite::theorem3(&c, &b, &field).map_err(|e| e.to_string())?;
    let t3_ok = rows.iter().filter(|r| r.check == "theorem3").all(|r| r.pass);
    let ratio = (1..=2).map(|k| (r.values[k].value - (k + 1) as f64 * f0).abs() / f0.abs()).fold(0.0, f64::max);
    let o = Outcome {
        pass: vanishing && nonzero && independence <= 1e-4 && t3_ok && ratio <= 1e-3,
        detail: format!(
            "ℂP² max |𝓕_k|/V {worst_cp2:.1e}; blow-up 𝓕_0/V {:.6}, metric independence {independence:.1e}, max |𝓕_k - (k+1)𝓕_0|/|𝓕_0| {ratio:.1e}",
            f0 / vb
        ),
    };
    Ok(within(o, start, Duration::from_secs(900)))
}

fn prop32() -> Result {
    let mut rows = Vec::new();
    for name in ["cp2_product_02", "blowup_product_02"] {
        let ls = fixture(name);
        let field = ToricField::new(vec![1.0, 1.0]);
        rows.extend(suite::prop32(&ls, &field, Some(&[0, 1, 2]), suite::DEFAULT_T_STEP).map_err(|e| e.to_string())?);
    }
    Ok(all_pass(&rows))
}

fn full_report() -> std::result::Result<Vec<u8>, String> {
    let mut args: Vec<String> = ["ekverify", "report", "--exact", "--format", "json"].map(String::from).to_vec();
    for name in ["cp1_square_01", "cp1_square_02", "cp2_product_01", "cp2_product_02", "cp2_square_neg", "cp2_product_05", "blowup_product_02"] {
        args.push("--scenario".into());
        args.push(fixture_path(name).display().to_string());
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(args, &mut out, &mut err);
    if code != cli::EXIT_PASS {
        return Err(format!("report exited with {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(out)
}

fn determinism() -> Result {
    let a = full_report()?;
    let b = full_report()?;
    Ok(Outcome { pass: a == b && !a.is_empty(), detail: format!("two full-suite reports, {} bytes, identical: {}", a.len(), a == b) })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result); 13] = [
        ("exact identity sweep", identities),
        ("positivity lemma sweep", appendix),
        ("(y, ε) certificate", claim3),
        ("remark limit", remark),
        ("calibration", calibration),
        ("Theorem 1", theorem1),
        ("corollary identities", corollaries),
        ("Pali constants", pali),
        ("K-energy and path independence", kenergy),
        ("Theorem 2", theorem2),
        ("Theorem 3", theorem3),
        ("flow derivative of E_k", prop32),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
