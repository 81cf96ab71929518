//! Batch regression runner: every matrix file in a corpus directory is
//! analyzed and checked against the expectations embedded in the file.
//! Per-file failures are collected, not fail-fast.

use crate::matfile::{self, Expect, ExpectFlags, IndexExpect};
use crate::report::{ExitCode, SCHEMA_VERSION};
use crate::Failure;
use hypoindex_core::coercivity::{classify_continuous, hc_index, shifted_hc_index};
use hypoindex_core::contractivity::{classify_discrete, dhc_index, scaled_dhc_index};
use hypoindex_core::matcore::spectral_quantities;
use hypoindex_core::{ComplexMatrix, Tolerances};
use serde::Serialize;
use serde_json::json;
use std::path::Path;

const SCALAR_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
struct FileOutcome {
    file: String,
    name: String,
    checks: usize,
    failures: Vec<String>,
    /// Computed values for every checked expectation.
    computed: serde_json::Map<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn run_suite(dir: &Path, tol: &Tolerances, pretty: bool) -> Result<ExitCode, Failure> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|x| x.eq_ignore_ascii_case("json") || x.eq_ignore_ascii_case("csv"))
                .unwrap_or(false)
        })
        .collect();
    entries.sort();

    let mut outcomes = Vec::new();
    let mut any_failed = false;
    for path in &entries {
        let outcome = check_file(path, tol);
        if outcome.error.is_some() || !outcome.failures.is_empty() {
            any_failed = true;
        }
        outcomes.push(outcome);
    }

    let passed = outcomes
        .iter()
        .filter(|o| o.error.is_none() && o.failures.is_empty())
        .count();
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "suite",
        "corpus_dir": dir.display().to_string(),
        "files": outcomes.len(),
        "passed": passed,
        "failed": outcomes.len() - passed,
        "tolerances": serde_json::to_value(tol).expect("tolerances serialize"),
        "results": outcomes,
    });
    let text = if pretty {
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    } else {
        serde_json::to_string(&summary).expect("summary serializes")
    };
    println!("{text}");
    Ok(if any_failed {
        ExitCode::Internal
    } else {
        ExitCode::Ok
    })
}

fn check_file(path: &Path, tol: &Tolerances) -> FileOutcome {
    let file_label = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let loaded = match matfile::load(path) {
        Ok(l) => l,
        Err(e) => {
            return FileOutcome {
                file: file_label,
                name: String::new(),
                checks: 0,
                failures: Vec::new(),
                computed: Default::default(),
                error: Some(e),
            }
        }
    };
    let mut failures = Vec::new();
    let mut checks = 0usize;
    let mut computed = serde_json::Map::new();
    if let Err(e) = evaluate(
        &loaded.matrix,
        &loaded.file.expect,
        tol,
        &mut checks,
        &mut failures,
        &mut computed,
    ) {
        return FileOutcome {
            file: file_label,
            name: loaded.file.name,
            checks,
            failures,
            computed,
            error: Some(e.message),
        };
    }
    FileOutcome {
        file: file_label,
        name: loaded.file.name,
        checks,
        failures,
        computed,
        error: None,
    }
}

fn evaluate(
    matrix: &ComplexMatrix,
    expect: &Expect,
    tol: &Tolerances,
    checks: &mut usize,
    failures: &mut Vec<String>,
    computed: &mut serde_json::Map<String, serde_json::Value>,
) -> Result<(), Failure> {
    let mut check_index = |label: &str,
                           want: &Option<IndexExpect>,
                           got: Result<Option<usize>, Failure>|
     -> Result<(), Failure> {
        if let Some(w) = want {
            *checks += 1;
            let actual = got?;
            computed.insert(label.to_string(), serde_json::json!(actual));
            if !w.matches(actual) {
                failures.push(format!("{label}: expected {w:?}, computed {actual:?}"));
            }
        }
        Ok(())
    };

    check_index(
        "m_hc",
        &expect.m_hc,
        hc_index(matrix, tol).map(|r| r.m_hc).map_err(Failure::from),
    )?;
    check_index(
        "m_shc",
        &expect.m_shc,
        shifted_hc_index(matrix, tol)
            .map(|r| r.m_shc)
            .map_err(Failure::from),
    )?;
    check_index(
        "m_dhc",
        &expect.m_dhc,
        dhc_index(matrix, tol).map(|r| r.m_dhc).map_err(Failure::from),
    )?;
    check_index(
        "m_dshc",
        &expect.m_dshc,
        scaled_dhc_index(matrix, tol)
            .map(|r| r.m_dshc)
            .map_err(Failure::from),
    )?;

    if let Some(want) = expect.lambda_min_bh {
        *checks += 1;
        let got = shifted_hc_index(matrix, tol)?.lambda_min_bh;
        computed.insert("lambda_min_bh".into(), serde_json::json!(got));
        if (got - want).abs() > SCALAR_TOL {
            failures.push(format!("lambda_min_bh: expected {want}, computed {got}"));
        }
    }

    if expect.alpha.is_some()
        || expect.mu.is_some()
        || expect.rho.is_some()
        || expect.sigma_max.is_some()
    {
        let (_, summary) = spectral_quantities(matrix, tol)?;
        for (label, want, got) in [
            ("alpha", expect.alpha, summary.alpha),
            ("mu", expect.mu, summary.mu),
            ("rho", expect.rho, summary.rho),
            ("sigma_max", expect.sigma_max, summary.sigma_max),
        ] {
            if let Some(w) = want {
                *checks += 1;
                computed.insert(label.to_string(), serde_json::json!(got));
                if (got - w).abs() > SCALAR_TOL {
                    failures.push(format!("{label}: expected {w}, computed {got}"));
                }
            }
        }
    }

    if let Some(flags) = &expect.continuous {
        let c = classify_continuous(matrix, tol)?;
        computed.insert("continuous".into(), serde_json::to_value(&c).unwrap());
        compare_flags(
            "continuous",
            flags,
            &[
                ("stable", c.stable),
                ("asymptotically_stable", c.asymptotically_stable),
                ("semi_dissipative", c.semi_dissipative),
                ("dissipative", c.dissipative),
            ],
            checks,
            failures,
        );
    }
    if let Some(flags) = &expect.discrete {
        let d = classify_discrete(matrix, tol)?;
        computed.insert("discrete".into(), serde_json::to_value(&d).unwrap());
        compare_flags(
            "discrete",
            flags,
            &[
                ("stable", d.stable),
                ("asymptotically_stable", d.asymptotically_stable),
                ("semi_contractive", d.semi_contractive),
                ("contractive", d.contractive),
                ("hypocontractive", d.hypocontractive),
            ],
            checks,
            failures,
        );
    }
    Ok(())
}

fn compare_flags(
    scope: &str,
    flags: &ExpectFlags,
    actual: &[(&str, bool)],
    checks: &mut usize,
    failures: &mut Vec<String>,
) {
    let wanted = [
        ("stable", flags.stable),
        ("asymptotically_stable", flags.asymptotically_stable),
        ("semi_dissipative", flags.semi_dissipative),
        ("dissipative", flags.dissipative),
        ("semi_contractive", flags.semi_contractive),
        ("contractive", flags.contractive),
        ("hypocontractive", flags.hypocontractive),
    ];
    for (name, want) in wanted {
        if let Some(w) = want {
            if let Some((_, got)) = actual.iter().find(|(n, _)| *n == name) {
                *checks += 1;
                if *got != w {
                    failures.push(format!("{scope}.{name}: expected {w}, computed {got}"));
                }
            }
        }
    }
}
