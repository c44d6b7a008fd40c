//! `rackforge` command line: argument parsing, report assembly and exit codes.
//!
//! [`run`] does all the work and returns what should be printed, so the
//! binary is a thin wrapper and tests can drive the CLI in-process.

mod commands;
pub mod report;
pub mod verify;

use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use rackforge::Error;

pub use commands::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable bounding the number of worker threads.
pub const THREADS_ENV: &str = "RACKFORGE_THREADS";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn error(code: i32, message: String) -> Self {
        RunOutput {
            code,
            stdout: String::new(),
            stderr: message,
        }
    }
}

/// Exit code for a library error: resource limits map to 2, the rest to 1.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Indeterminate(_) | Error::BudgetExhausted(_) | Error::SizeGuard(_) => EXIT_BUDGET,
        _ => EXIT_DOMAIN,
    }
}

/// Worker count requested through [`THREADS_ENV`]; `None` means the default.
fn requested_threads(raw: Option<&str>) -> Result<Option<usize>, String> {
    let Some(raw) = raw else {
        return Ok(None);
    };
    raw.trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
        .map(Some)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let raw = std::env::var(THREADS_ENV).ok();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = requested_threads(raw.as_deref())? {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, S>(args: I) -> RunOutput
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => RunOutput::error(EXIT_USAGE, text),
            };
        }
    };
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(msg) => return RunOutput::error(EXIT_DOMAIN, format!("error: {msg}\n")),
    };
    let started = Instant::now();
    let outcome = pool.install(|| commands::execute(&cli));
    let elapsed = started.elapsed().as_millis() as u64;
    match outcome {
        Ok(done) => {
            let stdout = if cli.json {
                let report = report::Report {
                    schema: report::SCHEMA,
                    version: env!("CARGO_PKG_VERSION"),
                    command: done.command.to_string(),
                    argv: args.iter().skip(1).cloned().collect(),
                    config: done.config,
                    result: done.result,
                    provenance: done.provenance,
                    wall_clock_ms: elapsed,
                };
                report.to_json() + "\n"
            } else {
                done.human
            };
            RunOutput {
                code: done.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => RunOutput::error(exit_code_for(&e), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn cli(args: &[&str]) -> RunOutput {
        run(std::iter::once("rackforge").chain(args.iter().copied()))
    }

    fn json(args: &[&str]) -> (i32, Value) {
        let mut full = args.to_vec();
        full.push("--json");
        let out = cli(&full);
        let value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {out:?}"));
        (out.code, value)
    }

    #[test]
    fn classify_thirteen() {
        let (code, v) = json(&["classify", "--p", "13", "--m", "13"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["verdict"], "TypeD");
        assert_eq!(v["reason"], serde_json::json!({ "cyclotomic": [[3, 3]] }));
        assert_eq!(v["schema"], report::SCHEMA);
        assert!(v["wall_clock_ms"].is_u64());
    }

    #[test]
    fn classify_rejects_composite() {
        let out = cli(&["classify", "--p", "4", "--m", "4"]);
        assert_eq!(out.code, EXIT_DOMAIN);
        assert!(out.stderr.contains("p must be prime ≥ 5"), "{}", out.stderr);
        assert!(out.stdout.is_empty());
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["classify", "--p", "5", "--m", "5", "--bogus"][..],
            &["frobnicate"],
            &[],
        ] {
            let out = cli(args);
            assert_eq!(out.code, EXIT_USAGE, "{args:?}");
            assert!(out.stderr.contains("Usage"), "{}", out.stderr);
        }
        let help = cli(&["--help"]);
        assert_eq!(help.code, EXIT_OK);
        assert!(help.stdout.contains("verify-all"));
    }

    #[test]
    fn primes_below_thousand() {
        let (code, v) = json(&["primes", "--below", "1000"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            v["primes"],
            serde_json::json!([3, 5, 7, 13, 17, 31, 73, 127, 257, 307, 757])
        );
        assert_eq!(
            v["decompositions"][5]["pairs"],
            serde_json::json!([[2, 5], [5, 3]])
        );
    }

    #[test]
    fn reports_are_reproducible() {
        let args = [
            "witness",
            "--p",
            "11",
            "--m",
            "11",
            "--strategy",
            "random",
            "--budget",
            "300",
            "--seed",
            "9",
            "--json",
        ];
        let strip = |out: RunOutput| {
            let mut v: Value = serde_json::from_str(&out.stdout).unwrap();
            report::strip_wall_clock(&mut v);
            serde_json::to_string(&v).unwrap()
        };
        let first = cli(&args);
        assert_eq!(first.code, EXIT_BUDGET);
        assert_eq!(strip(first), strip(cli(&args)));
        let other_seed = cli(&[
            "witness",
            "--p",
            "11",
            "--m",
            "11",
            "--strategy",
            "random",
            "--budget",
            "300",
            "--seed",
            "10",
            "--json",
        ]);
        assert_eq!(other_seed.code, EXIT_BUDGET);
    }

    #[test]
    fn witness_exit_codes() {
        let (code, v) = json(&["witness", "--p", "7", "--m", "8"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["outcome"]["status"], "found");
        assert_eq!(v["outcome"]["subgroup"], "F_8 ⋊ F_8^×");
        let (code, v) = json(&[
            "witness",
            "--p",
            "5",
            "--m",
            "5",
            "--strategy",
            "exhaustive",
        ]);
        assert_eq!(
            (code, &v["outcome"]["status"]),
            (EXIT_OK, &Value::from("proven_absent"))
        );
        assert_eq!(v["pairs_examined"], 12);
        let (code, v) = json(&["witness", "--p", "5", "--m", "5"]);
        assert_eq!(
            (code, &v["outcome"]["status"]),
            (EXIT_BUDGET, &Value::from("inconclusive"))
        );
        let out = cli(&[
            "witness",
            "--p",
            "11",
            "--m",
            "11",
            "--strategy",
            "exhaustive",
        ]);
        assert_eq!(out.code, EXIT_BUDGET, "{out:?}");
        let out = cli(&["witness", "--p", "5", "--m", "5", "--strategy", "sideways"]);
        assert_eq!(out.code, EXIT_USAGE);
    }

    #[test]
    fn witness_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let path = path.to_str().unwrap();
        let args = ["witness", "--p", "13", "--m", "14", "--cache", path];
        let (code, v) = json(&args);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["cached"], false);
        let (code, again) = json(&args);
        assert_eq!(code, EXIT_OK);
        assert_eq!(again["cached"], true);
        assert_eq!(again["outcome"]["witness"], v["outcome"]["witness"]);

        // A tampered entry fails re-verification and is recomputed.
        let mut stored: Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let entry = &mut stored["entries"]["13:14:subgroup:0"];
        entry["tau"] = entry["sigma"].clone();
        std::fs::write(path, stored.to_string()).unwrap();
        let (code, fresh) = json(&args);
        assert_eq!(code, EXIT_OK);
        assert_eq!(fresh["cached"], false);
    }

    #[test]
    fn fw_identify_disjoint() {
        let (code, v) = json(&[
            "fw-identify",
            "--sigma",
            "(1 2 3 4 5)",
            "--tau",
            "(6 7 8 9 10)",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["tag"], "ii");
        assert_eq!(v["order"], "25");
        let (code, v) = json(&[
            "fw-identify",
            "--sigma",
            "(1 2 3 4 5)",
            "--tau",
            "(1 3 5 2 4)",
        ]);
        assert_eq!(
            (code, &v["tag"], &v["order"]),
            (EXIT_OK, &Value::from("i"), &Value::from("5"))
        );
        let out = cli(&[
            "fw-identify",
            "--sigma",
            "(1 2 3)(4 5 6)",
            "--tau",
            "(1 2 3 4 5)",
        ]);
        assert_eq!(out.code, EXIT_DOMAIN);
    }

    #[test]
    fn cohomology_of_class_and_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("o5.json");
        let path = path.to_str().unwrap();
        let (code, v) = json(&["cohomology", "--class", "(1 2 3 4 5)", "--export", path]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["pretty"], "k^× × G_10");
        assert_eq!(v["size"], 12);
        let (code, w) = json(&["cohomology", "--rack", path]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(w["pretty"], v["pretty"]);

        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"size":2,"table":[[0,0],[1,1]]}"#).unwrap();
        let out = cli(&["cohomology", "--rack", bad.to_str().unwrap()]);
        assert_eq!(out.code, EXIT_DOMAIN, "{out:?}");
        let out = cli(&["cohomology", "--rack", "/nonexistent/rack.json"]);
        assert_eq!(out.code, EXIT_DOMAIN);
        let out = cli(&["cohomology", "--class", "(1 2 3 4 5 6 7)"]);
        assert_eq!(out.code, EXIT_BUDGET, "{out:?}");
    }

    #[test]
    fn constructions() {
        let (code, v) = json(&["construct", "psl", "--k", "3", "--r", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["order"], "5616");
        assert_eq!(v["order_p_classes"].as_array().unwrap().len(), 4);
        let (code, v) = json(&["construct", "frobenius", "--h", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["order"], "56");
        assert_eq!(v["degree"], 8);
    }

    #[test]
    fn census_and_lemma() {
        let (code, v) = json(&["census", "--p", "5", "--m", "5"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["complete"], true);
        let (code, v) = json(&["census", "--p", "11", "--m", "11", "--budget", "20"]);
        assert_eq!((code, &v["complete"]), (EXIT_BUDGET, &Value::Bool(false)));
        let (code, v) = json(&["lemma", "--p", "5", "--m", "5"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["dichotomy_violations"], serde_json::json!([]));
    }

    #[test]
    fn products_in_small_groups() {
        let (code, v) = json(&["products", "--k", "3", "--r", "2"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["p"], 7);
    }

    #[test]
    fn verify_subset() {
        let (code, v) = json(&["verify-all", "--only", "1,2,6"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(v["passed"], 3);
        let text = cli(&["verify-all", "--only", "9"]);
        assert_eq!(text.code, EXIT_DOMAIN);
        assert!(text.stdout.starts_with("[FAIL] 09"), "{}", text.stdout);
        assert_eq!(cli(&["verify-all", "--only", "14"]).code, EXIT_DOMAIN);
    }

    #[test]
    fn thread_count_parsing() {
        assert_eq!(requested_threads(None), Ok(None));
        assert_eq!(requested_threads(Some(" 3 ")), Ok(Some(3)));
        assert!(requested_threads(Some("0")).is_err());
        assert!(requested_threads(Some("many")).is_err());
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(
            exit_code_for(&rackforge::Error::Indeterminate(5)),
            EXIT_BUDGET
        );
        assert_eq!(
            exit_code_for(&rackforge::Error::SizeGuard("x".into())),
            EXIT_BUDGET
        );
        assert_eq!(exit_code_for(&rackforge::Error::NotClosed), EXIT_DOMAIN);
    }
}
