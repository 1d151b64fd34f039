//! Exit gate: one pass/fail line per acceptance criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use duality_lab::network::{path, ExhaustionFamily, FamilyKind};
use duality_lab::random::seeded;
use duality_lab::verify::{self, Tolerances};
use duality_lab::Report;

const SEED: u64 = 42;

struct Criterion {
    number: u32,
    title: &'static str,
    rows: Vec<Report>,
    elapsed: Duration,
    budget: Option<Duration>,
    extra_failures: Vec<String>,
}

impl Criterion {
    fn pass(&self) -> bool {
        !self.rows.is_empty()
            && self.rows.iter().all(|r| r.pass)
            && self.budget.is_none_or(|b| self.elapsed <= b)
            && self.extra_failures.is_empty()
    }
}

fn timed(number: u32, title: &'static str, budget: Option<u64>, f: impl FnOnce() -> Vec<Report>) -> Criterion {
    let start = Instant::now();
    let rows = f();
    Criterion {
        number,
        title,
        rows,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs),
        extra_failures: Vec::new(),
    }
}

fn byte_identical_reports() -> Criterion {
    let start = Instant::now();
    let mut extra = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut bytes = Vec::new();
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_duality-lab"))
            .args([
                "--cmd",
                "verify-all",
                "--seed",
                "42",
                "--out",
                d.path().to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        if status.status.code() != Some(0) {
            extra.push(format!("verify-all exited with {:?}", status.status.code()));
        }
        bytes.push(std::fs::read(d.path().join("report.csv")).unwrap_or_default());
    }
    let identical = !bytes[0].is_empty() && bytes[0] == bytes[1];
    Criterion {
        number: 10,
        title: "determinism: verify-all --seed 42 twice gives byte-identical report.csv",
        rows: vec![Report::flag("report.csv byte-identical", "run₁ = run₂", identical)],
        elapsed: start.elapsed(),
        budget: None,
        extra_failures: extra,
    }
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let p3 = path::<f64>(3).expect("P3");
    let criteria = vec![
        timed(1, "characteristic projection on 200 random operators", Some(10), || {
            verify::charproj_suite(&mut seeded(SEED), 200, 10, &tol)
        }),
        timed(2, "scalar anchor T = 2", None, || verify::scalar_anchor(&tol)),
        timed(
            3,
            "duality operator on 200 domains, Radon-Nikodym on 50 measure pairs",
            None,
            || {
                let mut rng = seeded(SEED);
                let mut rows = verify::duality_suite(&mut rng, 200, 12, &tol);
                rows.extend(verify::radon_nikodym_suite(&mut rng, 50, 6, &tol));
                rows
            },
        ),
        timed(4, "spectral-measure moments and the two-vertex anchor", None, || {
            verify::moment_suite(&mut seeded(SEED), 200, 12, &tol)
        }),
        timed(
            5,
            "Friedrichs extension and Krein membership on 50 instances",
            None,
            || verify::friedrichs_suite(&mut seeded(SEED), 50, &tol),
        ),
        timed(6, "three-vertex path anchors and network identities", None, || {
            let mut rows = verify::p3_anchors(&tol);
            rows.extend(verify::network_suite(&p3, &mut seeded(SEED), 1000, &tol));
            rows
        }),
        timed(
            7,
            "interval deficiency indices, Gram anchor and line sweep",
            Some(5),
            || verify::interval_suite(&tol),
        ),
        timed(8, "no defect on 100 random finite networks", None, || {
            verify::finite_shadow_suite(&mut seeded(SEED), 100, &tol)
        }),
        timed(
            9,
            "exhaustion: path gap vanishes, tree gap persists over depths 4..10",
            None,
            || {
                let mut rows = Vec::new();
                match ExhaustionFamily::new(FamilyKind::Path, &[8, 16, 32]) {
                    Ok(fam) => {
                        let (gaps, r) = verify::exhaustion_reports(&fam, "0", "1", &tol);
                        rows.extend(r);
                        rows.push(verify::gap_vanishes(&gaps, &tol));
                    }
                    Err(e) => rows.push(Report::error("path family", &e)),
                }
                let depths: Vec<usize> = (4..=10).collect();
                match ExhaustionFamily::new(FamilyKind::BinaryTree { ratio: 1.0 }, &depths) {
                    Ok(fam) => {
                        let (gaps, r) = verify::exhaustion_reports(&fam, "1", "2", &tol);
                        rows.extend(r);
                        rows.extend(verify::gap_persists(&gaps, &tol));
                    }
                    Err(e) => rows.push(Report::error("tree family", &e)),
                }
                rows
            },
        ),
        byte_identical_reports(),
    ];

    let mut failed = 0;
    for c in &criteria {
        let verdict = if c.pass() { "PASS" } else { "FAIL" };
        let budget = c.budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "criterion {:>2}  {verdict}  {}  ({} rows, {:.2}s{budget})",
            c.number,
            c.title,
            c.rows.len(),
            c.elapsed.as_secs_f64()
        );
        if !c.pass() {
            failed += 1;
            for r in c.rows.iter().filter(|r| !r.pass) {
                println!("    {r}");
            }
            for e in &c.extra_failures {
                println!("    {e}");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
