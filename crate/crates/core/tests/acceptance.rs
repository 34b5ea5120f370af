//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use expert_lr::engine::{
    conditional_probability, full_table_lrs, likelihood_ratio, lr_from_error_rates,
};
use expert_lr::ingest::{parse_aggregated, tally};
use expert_lr::interpret::{hardness_adjust, posterior_probability};
use expert_lr::report::{
    read_statement_csv, read_summary_csv, render_lr_table, render_statement_table,
    render_summary_table, OutputFormat,
};
use expert_lr::simulate::{simulate_study, true_lr, PanelProfile};
use expert_lr::uncertainty::bootstrap_interval;
use expert_lr::{ConfusionTable, GroundTruth, SmoothingPolicy, StatementCategory};

const NONE: SmoothingPolicy = SmoothingPolicy::None;

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(crate_dir().join("tests/golden").join(name)).unwrap()
}

fn load_bullets() -> ConfusionTable {
    let file = std::fs::File::open(fixture("bullets.csv")).unwrap();
    parse_aggregated(file).unwrap()
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Bullet counts to the rounded LR display row.
fn ac1_table_two() -> Outcome {
    let start = Instant::now();
    let table = load_bullets();
    let md = render_lr_table(&table, OutputFormat::Markdown).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let row_ok = md.contains("| LR | 109 | 1 | 1 / 3 | 1 / 10 | 1 / 12 | 1 |");
    let golden_ok = md == golden("bullets_lr_table.md");
    check(
        row_ok && golden_ok && elapsed < Duration::from_secs(1),
        format!("row match {row_ok}, golden byte-exact {golden_ok}, {elapsed:?} (< 1s)"),
    )
}

fn ac2_worked_probabilities() -> Outcome {
    let table = load_bullets();
    let est = likelihood_ratio(&table, "ID", NONE).map_err(|e| e.to_string())?;
    let rational = (est.count_h1, est.total_h1, est.count_h2, est.total_h2) == (1076, 1429, 20, 2891);
    let p1 = conditional_probability(&table, "ID", GroundTruth::SameSource, NONE).unwrap();
    let p2 = conditional_probability(&table, "ID", GroundTruth::DifferentSource, NONE).unwrap();
    let exact = p1 == 1076.0 / 1429.0 && p2 == 20.0 / 2891.0;
    let sig4 = format!("{p1:.4}") == "0.7530" && format!("{p2:.6}") == "0.006918";
    check(
        rational && exact && sig4,
        format!("P(ID|H1) = {}/{} = {p1:.4}, P(ID|H2) = {}/{} = {p2:.6}", est.count_h1, est.total_h1, est.count_h2, est.total_h2),
    )
}

fn ac3_two_statement_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let id_h1 = rng.random_range(1..5000u64);
        let el_h1 = rng.random_range(0..5000u64);
        let id_h2 = rng.random_range(1..5000u64);
        let el_h2 = rng.random_range(0..5000u64);
        let table =
            ConfusionTable::new("two", [("ID", id_h1, id_h2), ("Elimination", el_h1, el_h2)]).unwrap();
        let fnr = el_h1 as f64 / (id_h1 + el_h1) as f64;
        let fpr = id_h2 as f64 / (id_h2 + el_h2) as f64;
        let via_rates = lr_from_error_rates(fnr, fpr).unwrap().value().unwrap();
        let direct = likelihood_ratio(&table, "ID", NONE).unwrap().lr.value().unwrap();
        worst = worst.max((via_rates - direct).abs() / direct);
    }
    check(worst <= 1e-12, format!("max relative difference {worst:e} over 1000 tables (<= 1e-12)"))
}

fn ac4_posterior_anchor() -> Outcome {
    let p = posterior_probability(0.10, 1000.0).map_err(|e| e.to_string())?;
    check(
        (p - 0.9911).abs() <= 1e-4 && format!("{p:.2}") == "0.99",
        format!("posterior {p:.6} (0.9911 +/- 0.0001, rounds to {p:.2})"),
    )
}

fn ac5_hardness_anchor() -> Outcome {
    let a = hardness_adjust(109.0, 0.01).unwrap();
    let b = hardness_adjust(376.0, 0.01).unwrap();
    check(
        a == 109.0 / 100.0 && b == 376.0 / 100.0,
        format!("109 -> {a}, 376 -> {b} (exactly lr / 100)"),
    )
}

fn calibration_error(table: &ConfusionTable) -> f64 {
    let est = full_table_lrs(table, NONE).unwrap();
    let fwd: f64 = est.iter().map(|e| e.p_given_h2 * e.lr.value().unwrap()).sum();
    let back: f64 = est.iter().map(|e| e.p_given_h1 / e.lr.value().unwrap()).sum();
    (fwd - 1.0).abs().max((back - 1.0).abs())
}

fn ac6_calibration_identity() -> Outcome {
    let mut worst = calibration_error(&load_bullets());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let k = rng.random_range(1..=10usize);
        let rows: Vec<_> = (0..k)
            .map(|i| (format!("s{i}"), rng.random_range(1..100_000u64), rng.random_range(1..100_000u64)))
            .collect();
        worst = worst.max(calibration_error(&ConfusionTable::new("r", rows).unwrap()));
    }
    check(worst <= 1e-12, format!("max deviation {worst:e} over fixture + 1000 tables (<= 1e-12)"))
}

fn bullets_profile(n: u64, seed: u64) -> PanelProfile {
    let t = load_bullets();
    let freqs = |truth| -> Vec<f64> {
        let total = t.row_total(truth) as f64;
        t.row(truth).iter().map(|&c| c as f64 / total).collect()
    };
    let labels: Vec<&str> = t.categories().iter().map(|c| c.as_str()).collect();
    PanelProfile::new(
        &labels,
        freqs(GroundTruth::SameSource),
        freqs(GroundTruth::DifferentSource),
        n,
        n,
        seed,
    )
    .unwrap()
}

fn ac7_simulator_consistency() -> Outcome {
    let start = Instant::now();
    let table = load_bullets();
    let reference = full_table_lrs(&table, NONE).unwrap();
    let vocab: Vec<StatementCategory> = table.categories().to_vec();

    let big = tally(&simulate_study(&bullets_profile(1_000_000, 42)).unwrap(), Some(&vocab)).unwrap();
    let mut worst_big = 0.0f64;
    for (est, want) in full_table_lrs(&big, NONE).unwrap().iter().zip(&reference) {
        let (e, w) = (est.lr.value().unwrap(), want.lr.value().unwrap());
        worst_big = worst_big.max((e / w - 1.0).abs());
    }

    let small = tally(&simulate_study(&bullets_profile(1_000, 42)).unwrap(), Some(&vocab)).unwrap();
    let id_small = likelihood_ratio(&small, "ID", NONE).unwrap().lr.value().unwrap_or(f64::INFINITY);
    let id_ref = reference[0].lr.value().unwrap();
    let err_small = (id_small / id_ref - 1.0).abs();
    let elapsed = start.elapsed();
    check(
        worst_big <= 0.03 && err_small <= 0.35 && elapsed < Duration::from_secs(30),
        format!(
            "n=1e6 worst relative error {:.2}% (<= 3%), n=1e3 ID {id_small:.1} vs {id_ref:.1} error {:.1}% (<= 35%), {elapsed:?} (< 30s)",
            worst_big * 100.0,
            err_small * 100.0
        ),
    )
}

fn ac8_bootstrap_coverage() -> Outcome {
    let start = Instant::now();
    let labels = ["A", "B", "C", "D"];
    let vocab: Vec<StatementCategory> = labels.iter().map(|l| StatementCategory::new(l).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draw_probs = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        // 0.02 floor plus a uniform point on the simplex for the rest
        let raw: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().ln()).collect();
        let sum: f64 = raw.iter().sum();
        let mut p: Vec<f64> = raw.iter().map(|x| 0.02 + 0.92 * x / sum).collect();
        let drift: f64 = p.iter().sum::<f64>() - 1.0;
        p[3] -= drift;
        p
    };
    let studies = 500u64;
    let mut covered = 0u64;
    for j in 0..studies {
        let p1 = draw_probs(&mut rng);
        let p2 = draw_probs(&mut rng);
        let profile = PanelProfile::new(&labels, p1, p2, 1000, 1000, 10_000 + j).unwrap();
        let statement = labels[(j % 4) as usize];
        let truth = true_lr(&profile, statement).unwrap().value().unwrap();
        let table = tally(&simulate_study(&profile).unwrap(), Some(&vocab)).unwrap();
        let iv = bootstrap_interval(&table, statement, 2000, 0.95, j).unwrap();
        if iv.contains(truth) {
            covered += 1;
        }
    }
    let coverage = covered as f64 / studies as f64;
    let elapsed = start.elapsed();
    check(
        (0.91..=0.99).contains(&coverage) && elapsed < Duration::from_secs(300),
        format!("coverage {coverage:.3} over {studies} studies (in [0.91, 0.99]), {elapsed:?} (< 5 min)"),
    )
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_expert-lr"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn ac9_determinism() -> Outcome {
    let table = fixture("bullets.csv");
    let table = table.to_str().unwrap();
    let mut identical = true;
    for method in ["bootstrap", "dirichlet"] {
        let base = ["interval", "--table", table, "--statement", "ID", "--method", method, "--seed", "7"];
        let runs: Vec<Vec<u8>> = [None, None, Some("1"), Some("4")]
            .iter()
            .map(|threads| {
                let mut args = base.to_vec();
                if let Some(t) = threads {
                    args.extend(["--threads", t]);
                }
                cli(&args)
            })
            .collect();
        identical &= runs.windows(2).all(|w| w[0] == w[1]);
        let json: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                let mut args = base.to_vec();
                args.extend(["--format", "json"]);
                cli(&args)
            })
            .collect();
        identical &= json[0] == json[1];
    }

    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.toml");
    std::fs::write(
        &profile,
        "categories = [\"ID\", \"Inconclusive\", \"Elimination\"]\n\
         p_given_h1 = [0.75, 0.2, 0.05]\np_given_h2 = [0.01, 0.3, 0.69]\n\
         n_h1 = 5000\nn_h2 = 5000\nseed = 3\n",
    )
    .unwrap();
    let profile = profile.to_str().unwrap();
    let sims: Vec<Vec<u8>> = (0..2).map(|_| cli(&["simulate", "--profile", profile, "--seed", "11"])).collect();
    identical &= sims[0] == sims[1] && !sims[0].is_empty();
    check(
        identical,
        "interval (bootstrap, dirichlet; default, 1 and 4 threads) and simulate byte-identical per seed".into(),
    )
}

fn ac10_published_regression() -> Outcome {
    let mut mismatches = Vec::new();
    let summary = read_summary_csv(std::fs::File::open(fixture("summary_published.csv")).unwrap()).unwrap();
    if render_summary_table(&summary, OutputFormat::Markdown).unwrap() != golden("summary_published.md") {
        mismatches.push("summary");
    }
    let tables = ["bloodstain", "handwriting", "footwear", "cartridge", "fingerprint"];
    for name in tables {
        let file = std::fs::File::open(fixture(&format!("{name}_published.csv"))).unwrap();
        let rows = read_statement_csv(file).unwrap();
        if render_statement_table("", &rows, OutputFormat::Markdown).unwrap() != golden(&format!("{name}.md")) {
            mismatches.push(name);
        }
    }
    check(
        mismatches.is_empty(),
        format!("summary + {} statement tables verbatim; mismatches: {mismatches:?}", tables.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC1 bullet counts to LR row", ac1_table_two),
        ("AC2 bullet ID probabilities", ac2_worked_probabilities),
        ("AC3 two-statement error-rate identity", ac3_two_statement_identity),
        ("AC4 posterior anchor", ac4_posterior_anchor),
        ("AC5 hardness anchor", ac5_hardness_anchor),
        ("AC6 calibration identity", ac6_calibration_identity),
        ("AC7 simulator consistency", ac7_simulator_consistency),
        ("AC8 bootstrap coverage", ac8_bootstrap_coverage),
        ("AC9 determinism", ac9_determinism),
        ("AC10 reference table regression", ac10_published_regression),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        match outcome {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
