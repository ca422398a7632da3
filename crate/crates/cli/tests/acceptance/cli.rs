use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::ensure;
use crate::support::Traces;

fn ufgm(args: &[&str], env: &[(&str, &str)]) -> Result<i32, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ufgm"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().map_err(|e| format!("spawning ufgm {args:?}: {e}"))?;
    out.status
        .code()
        .ok_or_else(|| format!("ufgm {args:?} terminated by a signal"))
}

fn config(dir: &Path, name: &str, problem: &str, solver: &str, run: &str) -> PathBuf {
    let path = dir.join(name);
    let text = format!(r#"{{"version": 1, "problem": {problem}, "solver": {solver}, "run": {run}}}"#);
    fs::write(&path, text).expect("temp dir is writable");
    path
}

/// Every file below `dir`, sorted, with contents.
fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).expect("readable dir") {
            let p = entry.expect("dir entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

struct Job {
    name: &'static str,
    args: Vec<String>,
    env: Vec<(&'static str, &'static str)>,
    code: i32,
}

/// Runs each job twice into separate output trees and compares them byte for byte.
pub fn determinism(_: &mut Traces) -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg_dir = tmp.path().join("configs");
    fs::create_dir_all(&cfg_dir).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();

    let two_term = r#"{"kind": "two_term", "m": 200, "n": 100, "c": 0.1, "seed": 42}"#;
    let svm = r#"{"kind": "svm", "samples": 100, "dim": 20, "seed": 7, "lambda": 1.0}"#;
    let fig1 = config(
        &cfg_dir,
        "fig1.json",
        two_term,
        r#"{"method": "ufgm"}"#,
        r#"{"epsilon": 1e-9, "max_iters": 300}"#,
    );
    let restart = config(
        &cfg_dir,
        "restart.json",
        r#"{"kind": "quadratic", "center": [1.0, -2.0, 0.5], "scale": 3.0}"#,
        r#"{"method": "r_ufgm", "target_eps": 1e-8}"#,
        r#"{"epsilon": 1.0}"#,
    );
    let subgrad = config(
        &cfg_dir,
        "subgrad.json",
        svm,
        r#"{"method": "subgradient", "c": 1.0}"#,
        r#"{"epsilon": 1e-3, "max_iters": 500}"#,
    );
    let rda = config(
        &cfg_dir,
        "rda.json",
        svm,
        r#"{"method": "rda", "schedule": "short"}"#,
        r#"{"epsilon": 1e-3, "max_iters": 500}"#,
    );
    // Medium weights diverge on this strongly convex instance: exit 1 with a partial trace.
    let rda_medium = config(
        &cfg_dir,
        "rda_medium.json",
        svm,
        r#"{"method": "rda", "schedule": "medium"}"#,
        r#"{"epsilon": 1e-3, "max_iters": 500}"#,
    );
    let spec = config(
        &cfg_dir,
        "spec.json",
        r#"{"kind": "specproj", "nodes": 30, "density": 0.3, "seed": 9, "alpha": 4.0}"#,
        r#"{"method": "ufgm"}"#,
        r#"{"epsilon": 1e-5, "max_iters": 200}"#,
    );
    let cmp = config(
        &cfg_dir,
        "compare.json",
        svm,
        r#"{"method": "ufgm"}"#,
        r#"{"epsilon": 1e-3, "max_iters": 300}"#,
    );

    let solve = |name: &'static str, cfg: &Path, extra: &[&str], code: i32| {
        let mut args = vec![
            "solve".to_string(),
            "--config".into(),
            s(cfg),
            "--out".into(),
            format!("{name}.csv"),
        ];
        args.extend(extra.iter().map(|a| a.to_string()));
        Job {
            name,
            args,
            env: vec![],
            code,
        }
    };
    let jobs = vec![
        solve("fig1", &fig1, &[], 2),
        solve("fig1_seed43", &fig1, &["--seed", "43"], 2),
        solve("restart", &restart, &[], 0),
        solve("subgradient", &subgrad, &[], 2),
        solve("rda", &rda, &[], 2),
        solve("rda_medium", &rda_medium, &[], 1),
        solve("specproj", &spec, &[], 2),
        Job {
            name: "compare_1_thread",
            args: vec![
                "compare".into(),
                "--config".into(),
                s(&cmp),
                "--out".into(),
                "compare".into(),
            ],
            env: vec![("UFGM_THREADS", "1")],
            code: 0,
        },
        Job {
            name: "gen_gaussian",
            args: [
                "gen", "--kind", "gaussian", "--seed", "5", "--m", "30", "--n", "10", "--out", "gauss",
            ]
            .map(String::from)
            .to_vec(),
            env: vec![],
            code: 0,
        },
        Job {
            name: "gen_svm",
            args: ["gen", "--kind", "svm", "--seed", "5", "--out", "svm"]
                .map(String::from)
                .to_vec(),
            env: vec![],
            code: 0,
        },
        Job {
            name: "recurrence",
            args: [
                "recurrence",
                "--pair",
                "2,0.5",
                "--pair",
                "0.3,0",
                "--steps",
                "200",
                "--out",
                "rec.csv",
            ]
            .map(String::from)
            .to_vec(),
            env: vec![],
            code: 0,
        },
    ];

    let mut trees = Vec::new();
    for round in ["first", "second"] {
        let root = tmp.path().join(round);
        fs::create_dir_all(&root).unwrap();
        for job in &jobs {
            // Output paths in the job are relative to this round's root.
            let args: Vec<String> = job
                .args
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if i > 0 && job.args[i - 1] == "--out" {
                        s(&root.join(a))
                    } else {
                        a.clone()
                    }
                })
                .collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let code = ufgm(&refs, &job.env)?;
            ensure!(
                code == job.code,
                "{} ({round}): exit {code}, expected {}",
                job.name,
                job.code
            );
        }
        trees.push(snapshot(&root));
    }
    ensure!(trees[0].len() == trees[1].len(), "rounds wrote different file sets");
    for (a, b) in trees[0].iter().zip(&trees[1]) {
        ensure!(a.0 == b.0, "file sets differ at {} / {}", a.0.display(), b.0.display());
        ensure!(a.1 == b.1, "{} differs between invocations", a.0.display());
    }

    // Thread count must not change compare output either.
    let root = tmp.path().join("threads");
    let code = ufgm(
        &["compare", "--config", &s(&cmp), "--out", &s(&root)],
        &[("UFGM_THREADS", "4")],
    )?;
    ensure!(code == 0, "compare with 4 threads: exit {code}");
    for f in ["best_gap.csv", "report.json"] {
        let a = fs::read(root.join(f)).map_err(|e| e.to_string())?;
        let b = fs::read(tmp.path().join("first/compare").join(f)).map_err(|e| e.to_string())?;
        ensure!(a == b, "compare {f} depends on the thread count");
    }

    // Saved traces pass the offline certificate re-check.
    let first = tmp.path().join("first");
    for (trace, eps) in [("fig1.csv", "1e-9"), ("specproj.csv", "1e-5")] {
        let code = ufgm(&["verify", "--trace", &s(&first.join(trace)), "--eps", eps], &[])?;
        ensure!(code == 0, "verify {trace}: exit {code}");
    }

    Ok(format!(
        "{} jobs, {} files identical across two invocations",
        jobs.len(),
        trees[0].len()
    ))
}
