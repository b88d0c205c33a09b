//! The `markerlab` binary: one JSON config in, JSON and CSV reports out.
//!
//! Exit codes: 0 pass, 1 violation, 2 config error, 3 guard or depth cap.

pub mod config;
pub mod suites;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cascade::{check_parameters, choose_parameters, run_cascade_data, summarize, Safety};
use crate::enumerate::{Guards, RunOptions};
use crate::error::{Error, Result};
use crate::marker::{build_marker, density_of_f, marker_summary, MarkerParams};
use crate::quasitile::{covering_with_bound, find_centers, verify_centers, QuasitileSystem};
use crate::subshift::{entropy_estimate, entropy_exact_z};

use config::{Command, ExperimentConfig};
use suites::{MarkerInstance, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "markerlab", version, about = "Marker sets, quasitilings and entropy cascades at desk scale")]
pub struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for reports.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub shards: Option<usize>,
    /// Seed for randomized spot checks; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run a verification suite instead of the config's command.
    #[arg(long)]
    pub suite: Option<String>,
    /// Allow cascade parameters that fail the certified inequalities.
    #[arg(long)]
    pub unsafe_override: bool,
}

/// Error to exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_guard() => EXIT_GUARD,
        Error::Precondition(_) => EXIT_VIOLATION,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a ExperimentConfig,
    pass: bool,
    result: Value,
}

/// A finished command: the JSON result, extra CSV tables and whether it passed.
pub struct Outcome {
    pub command: String,
    pub result: Value,
    pub csv: Vec<(String, String)>,
    pub pass: bool,
}

pub fn write_outcome(dir: &Path, cfg: &ExperimentConfig, o: &Outcome) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let env = Envelope { schema_version: SCHEMA_VERSION, command: &o.command, config: cfg, pass: o.pass, result: o.result.clone() };
    let path = dir.join(format!("{}.json", o.command));
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    for (name, body) in &o.csv {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(path)
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn marker_instance(cfg: &ExperimentConfig) -> Result<MarkerInstance> {
    let x = cfg.subshift()?;
    let Some(m) = &cfg.marker else {
        if !cfg.group.is_z() {
            return Err(Error::config("marker", "required outside Z"));
        }
        return Ok(MarkerInstance { seed: cfg.seed, ..MarkerInstance::standard(x) });
    };
    Ok(MarkerInstance {
        s: m.s.resolve(cfg.group, "marker.s")?,
        t: m.t.resolve(cfg.group, "marker.t")?,
        k: m.k,
        variant: m.variant,
        window: m.verify_window,
        density_n: m.density_n,
        tiles: m.tiles(cfg.group)?,
        delta: m.delta()?,
        random_windows: m.random_windows,
        random_window_len: m.random_window_len,
        seed: cfg.seed,
        x,
    })
}

fn cmd_entropy(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome> {
    let x = cfg.subshift()?;
    let e = cfg.entropy.clone().unwrap_or_default();
    let rows = (e.n_min..=e.n_max).map(|n| entropy_estimate(&x, n, opts)).collect::<Result<Vec<_>>>()?;
    let exact = if x.group().is_z() { Some(entropy_exact_z(&x, opts)?) } else { None };
    let csv = csv_string(
        &["n", "window_size", "count", "bits", "exact"],
        rows.iter()
            .map(|r| vec![r.n.to_string(), r.window_size.to_string(), r.count.to_string(), format!("{:.12}", r.bits), r.exact.to_string()])
            .collect(),
    )?;
    Ok(Outcome {
        command: "entropy".into(),
        result: json!({"estimates": rows, "perron_bits": exact}),
        csv: vec![("entropy.csv".into(), csv)],
        pass: true,
    })
}

fn cmd_marker(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome> {
    let mi = marker_instance(cfg)?;
    let m = build_marker(MarkerParams::new(mi.s.clone(), mi.t.clone(), mi.k, mi.x.clone())?, opts)?.with_variant(mi.variant);
    let samples = cfg.marker.as_ref().map_or(8, |c| c.samples);
    let summary = marker_summary(&m, samples);
    let density = density_of_f(&m, mi.density_n, opts)?;
    let note = if m.is_trivial() { "F is empty: every pattern has the identity among its periods" } else { "" };
    Ok(Outcome {
        command: "marker".into(),
        result: json!({
            "params": {"s": mi.s, "t": mi.t, "k": mi.k, "variant": mi.variant},
            "r": summary.r,
            "nonperiodic_count": summary.nonperiodic_count,
            "sample_members": summary.sample_members,
            "f_empty": m.is_trivial(),
            "note": note,
            "density": density,
        }),
        csv: Vec::new(),
        pass: true,
    })
}

fn cmd_quasitile(cfg: &ExperimentConfig) -> Result<Outcome> {
    let q = cfg.quasitile.as_ref().ok_or_else(|| Error::config("quasitile", "missing block"))?;
    let tiles = q.tiles(cfg.group)?;
    let delta = q.delta()?;
    let sys = QuasitileSystem::new(tiles.clone(), delta)?;
    let f = cfg.group.folner_set(q.n)?.elements;
    let fam = find_centers(&sys, &f)?;
    let check = fam.as_ref().map(|fam| verify_centers(&sys, fam)).transpose()?;
    let covering = covering_with_bound(&tiles, delta, q.n)?;
    let mut rows = Vec::new();
    if let Some(fam) = &fam {
        for (i, c) in fam.centers.iter().enumerate() {
            for p in c.points() {
                let mut r = vec![i.to_string()];
                r.extend(p.coords().iter().map(|v| v.to_string()));
                rows.push(r);
            }
        }
    }
    let mut header = vec!["tile".to_string()];
    header.extend((0..cfg.group.dim()).map(|i| format!("x{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let pass = check.as_ref().is_some_and(|c| c.ok()) && covering.passes();
    Ok(Outcome {
        command: "quasitile".into(),
        result: json!({"centers": fam, "center_check": check, "covering": covering}),
        csv: vec![("centers.csv".into(), csv_string(&header, rows)?)],
        pass,
    })
}

fn cmd_cascade(cfg: &ExperimentConfig, opts: &RunOptions, allow_unsafe: bool) -> Result<Outcome> {
    let c = cfg.cascade.as_ref().ok_or_else(|| Error::config("cascade", "missing block"))?;
    let x = cfg.subshift()?;
    let a = x.alphabet().len();
    let params = match c.explicit(cfg.group)? {
        Some(mut p) => {
            let checks = if p.epsilon.is_finite() { Some(check_parameters(&p, a)?) } else { None };
            if checks.as_ref().is_some_and(|c| c.all()) {
                p.safety = Safety::Certified;
            } else if !allow_unsafe {
                return Err(Error::config(
                    "cascade",
                    "parameters do not meet the certified inequalities; rerun with --unsafe-override",
                ));
            }
            p
        }
        None => {
            let eps = c.epsilon.expect("checked by explicit()");
            let choice = choose_parameters(eps, a, cfg.group, &opts.guards)?;
            if !choice.feasible {
                return Err(Error::Guard {
                    what: format!("certified cascade for epsilon {eps}: {}", choice.warnings.join("; ")),
                    needed: format!("|T| = {}", choice.params.t_tiles.iter().map(|t| t.size()).max().unwrap_or(0)),
                    limit: opts.guards.max_enumeration as u128,
                });
            }
            choice.params
        }
    };
    let run = run_cascade_data(&x, &params, c.stages, c.n, None, opts)?;
    let rep = summarize(&x, &params, c.stages, c.n, &run, cfg.tolerance)?;
    let mut ladder = Vec::new();
    rep.write_ladder_csv(&mut ladder)?;
    Ok(Outcome {
        command: "cascade".into(),
        pass: rep.all_hold,
        result: serde_json::to_value(&rep)?,
        csv: vec![("ladder.csv".into(), String::from_utf8(ladder).expect("utf-8"))],
    })
}

fn cmd_verify(cfg: &ExperimentConfig, suite: &str, opts: &RunOptions, allow_unsafe: bool) -> Result<Outcome> {
    let rep: SuiteReport = match suite {
        "periods" => suites::suite_periods(opts)?,
        "grinch" => suites::suite_grinch()?,
        "covering" => suites::suite_covering()?,
        "marker" => suites::suite_marker(&marker_instance(cfg)?, opts)?,
        "density" => suites::suite_density(&marker_instance(cfg)?, opts)?,
        "joining" => suites::suite_joining(&cfg.subshift()?, 12, opts)?,
        "cascade" => {
            let x = cfg.subshift()?;
            let (params, stages, n) = match &cfg.cascade {
                Some(c) => match c.explicit(cfg.group)? {
                    Some(p) => (p, c.stages, c.n),
                    None => return Err(Error::config("cascade", "the cascade suite needs explicit k, s and t")),
                },
                None => (suites::standard_cascade_params(), 3, 12),
            };
            if params.safety == Safety::UnsafeOverride && !allow_unsafe {
                return Err(Error::config("cascade", "small parameters need --unsafe-override"));
            }
            suites::suite_cascade(&x, &params, stages, n, cfg.tolerance, opts)?.0
        }
        other => return Err(Error::config("--suite", format!("unknown suite {other:?}; expected one of {:?}", suites::SUITES))),
    };
    Ok(Outcome { command: format!("verify-{suite}"), pass: rep.pass, result: serde_json::to_value(&rep)?, csv: Vec::new() })
}

/// Runs one invocation and returns the process exit code.
pub fn run(args: &Args) -> i32 {
    match run_inner(args) {
        Ok((path, pass)) => {
            eprintln!("wrote {}", path.display());
            if pass {
                EXIT_PASS
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_inner(args: &Args) -> Result<(PathBuf, bool)> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let shards = args.shards.or(cfg.shards).unwrap_or(1);
    if shards == 0 {
        return Err(Error::config("--shards", "must be positive"));
    }
    let guards: Guards = cfg.guards.with_env()?;
    cfg.guards = guards;
    let opts = RunOptions { shards, guards };
    let suite = args.suite.clone().or_else(|| cfg.verify.as_ref().and_then(|v| v.suite.clone()));
    let command = match (&suite, cfg.command) {
        (Some(_), _) => Command::Verify,
        (None, Some(c)) => c,
        (None, None) => return Err(Error::config("command", "set `command` in the config or pass --suite")),
    };
    let outcome = match command {
        Command::Entropy => cmd_entropy(&cfg, &opts)?,
        Command::Marker => cmd_marker(&cfg, &opts)?,
        Command::Quasitile => cmd_quasitile(&cfg)?,
        Command::Cascade => cmd_cascade(&cfg, &opts, args.unsafe_override)?,
        Command::Verify => {
            let s = suite.ok_or_else(|| Error::config("verify.suite", "no suite named"))?;
            cmd_verify(&cfg, &s, &opts, args.unsafe_override)?
        }
    };
    let path = write_outcome(&args.out, &cfg, &outcome)?;
    Ok((path, outcome.pass))
}
