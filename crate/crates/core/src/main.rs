//! Command-line driver: each subcommand maps one claim under test to a
//! runnable experiment with a JSON report.
//!
//! Exit codes: 0 = claim reproduced, 1 = claim contradicted,
//! 2 = usage error, 3 = precondition window empty.

use clap::{Parser, Subcommand, ValueEnum};
use polyrod::bar::Bar1DProblem;
use polyrod::buckling::{buckling_experiment, critical_load_estimate, ExperimentError};
use polyrod::convexity::{
    falsify_convexity, falsify_rank_one, polyconvexity_witness, reflection_counterexample,
    RankOneSampling,
};
use polyrod::elastica::ElasticaProblem;
use polyrod::energy::{EnergyModel, ModelKind};
use polyrod::report::{trace_to_csv, Report, RunManifest};
use polyrod::schwarz::{convergence_rate_fit, monolithic_solve, schwarz_solve, SubdomainSpec};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_REPRODUCED: u8 = 0;
const EXIT_CONTRADICTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_WINDOW_EMPTY: u8 = 3;

#[derive(Parser)]
#[command(name = "polyrod", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic nonconvexity counterexample on a lambda grid.
    Counterexample {
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        /// Grid as start:stop:step; points within 1e-3 of 1/2 are
        /// excluded automatically with a note.
        #[arg(long, default_value = "0.05:0.95:0.05")]
        lambda_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded randomized convexity / rank-one / witness checks.
    Falsify {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum)]
        test: FalsifyTest,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        #[arg(long, default_value_t = 2.0)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schwarz vs monolithic on the stable 1D bar, with rate fit.
    Schwarz {
        #[arg(long, default_value = "bar1d")]
        problem: String,
        #[arg(long)]
        subdomains: Option<usize>,
        #[arg(long)]
        overlap: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        stretch: Option<f64>,
        #[arg(long)]
        elements: Option<usize>,
        /// TOML file with the same keys; explicit flags win.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sweep trace as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monolithic-vs-Schwarz buckling comparison on the long rod.
    Buckling {
        #[arg(long)]
        length: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
        /// End shortening as a multiple of the full rod's critical value.
        #[arg(long)]
        compression: Option<f64>,
        #[arg(long)]
        subdomains: Option<usize>,
        #[arg(long)]
        overlap: Option<f64>,
        #[arg(long)]
        stretch_stiffness: Option<f64>,
        #[arg(long)]
        bend_stiffness: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FalsifyTest {
    Convexity,
    RankOne,
    PolyconvexityWitness,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn emit<T: Serialize>(
    mut manifest: RunManifest,
    verdict: &str,
    body: T,
    out: &Option<PathBuf>,
    started: Instant,
) -> std::io::Result<()> {
    manifest.duration_ms = started.elapsed().as_secs_f64() * 1e3;
    let report = Report {
        manifest,
        verdict: verdict.to_string(),
        report: body,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    match out {
        Some(path) => std::fs::write(path, json + "\n"),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn parse_lambda_grid(spec: &str) -> Result<(Vec<f64>, Vec<f64>), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("lambda grid `{spec}` is not start:stop:step"));
    }
    let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("bad grid number `{s}`: {e}"));
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) || !(start > 0.0) || !(stop < 1.0) || stop < start {
        return Err(format!("lambda grid `{spec}` must lie in (0,1) with positive step"));
    }
    let mut grid = Vec::new();
    let mut excluded = Vec::new();
    let n = ((stop - start) / step).round() as usize;
    for i in 0..=n {
        let l = start + i as f64 * step;
        if l >= stop + 1e-12 {
            break;
        }
        if (l - 0.5).abs() < 1e-3 {
            excluded.push(l);
        } else {
            grid.push(l);
        }
    }
    Ok((grid, excluded))
}

struct ConfigFile(toml::Table);

impl ConfigFile {
    fn load(path: &Option<PathBuf>) -> Result<Self, String> {
        match path {
            None => Ok(ConfigFile(toml::Table::new())),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                text.parse::<toml::Table>()
                    .map(ConfigFile)
                    .map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(|v| v.as_float().or(v.as_integer().map(|i| i as f64)))
    }

    fn usize(&self, key: &str) -> Option<usize> {
        self.0.get(key).and_then(|v| v.as_integer()).map(|i| i as usize)
    }

    fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(|v| v.as_integer()).map(|i| i as u64)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Counterexample { kappa, mu, lambda_grid, out } => {
            run_counterexample(kappa, mu, &lambda_grid, &out)
        }
        Command::Falsify { model, test, samples, seed, kappa, mu, out } => {
            run_falsify(&model, test, samples, seed, kappa, mu, &out)
        }
        Command::Schwarz { problem, subdomains, overlap, tol, stretch, elements, config, out, csv } => {
            run_schwarz(&problem, subdomains, overlap, tol, stretch, elements, &config, &out, &csv)
        }
        Command::Buckling {
            length, nodes, compression, subdomains, overlap,
            stretch_stiffness, bend_stiffness, seed, config, out, csv,
        } => run_buckling(
            length, nodes, compression, subdomains, overlap,
            stretch_stiffness, bend_stiffness, seed, &config, &out, &csv,
        ),
    }
}

fn run_counterexample(kappa: f64, mu: f64, grid_spec: &str, out: &Option<PathBuf>) -> ExitCode {
    let started = Instant::now();
    if !(kappa > 0.0) || !(mu > 0.0) {
        return usage_error("kappa and mu must be positive");
    }
    let (grid, excluded) = match parse_lambda_grid(grid_spec) {
        Ok(g) => g,
        Err(e) => return usage_error(&e),
    };
    if grid.is_empty() {
        return usage_error("lambda grid is empty");
    }
    let mut report = match reflection_counterexample(kappa, mu, &grid) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    report.excluded_lambdas = excluded;

    let reproduced =
        report.all_violated && report.w_f1.abs() <= 1e-12 && report.w_f2.abs() <= 1e-12;
    let verdict = if reproduced { "reproduced" } else { "contradicted" };
    let manifest = RunManifest::new(
        "counterexample",
        json!({ "kappa": kappa, "mu": mu, "lambda_grid": grid_spec }),
        None,
    );
    if emit(manifest, verdict, report, out, started).is_err() {
        return usage_error("failed to write report");
    }
    ExitCode::from(if reproduced { EXIT_REPRODUCED } else { EXIT_CONTRADICTED })
}

fn run_falsify(
    model_name: &str,
    test: FalsifyTest,
    samples: u64,
    seed: u64,
    kappa: f64,
    mu: f64,
    out: &Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let Some(kind) = ModelKind::from_name(model_name) else {
        return usage_error(&format!("unknown model `{model_name}`"));
    };
    let model = match EnergyModel::new(kind, kappa, mu) {
        Ok(m) => m,
        Err(e) => return usage_error(&e.to_string()),
    };

    #[derive(Serialize)]
    #[serde(untagged)]
    enum Body {
        Falsify(polyrod::convexity::FalsifyOutcome),
        Witness(polyrod::convexity::WitnessReport),
    }

    // expectation table: is a violation the expected outcome?
    let (body, found, expected_violation) = match test {
        FalsifyTest::Convexity => {
            let outcome = falsify_convexity(&model, seed, samples);
            let found = outcome.violation.is_some();
            (Body::Falsify(outcome), found, kind == ModelKind::NeoHookeanEq3)
        }
        FalsifyTest::RankOne => {
            let sampling = match kind {
                ModelKind::StVenantKirchhoff => RankOneSampling::CompressionBiased,
                _ => RankOneSampling::Isotropic,
            };
            let outcome = falsify_rank_one(&model, seed, samples, sampling);
            let found = outcome.violation.is_some();
            (Body::Falsify(outcome), found, kind == ModelKind::StVenantKirchhoff)
        }
        FalsifyTest::PolyconvexityWitness => {
            let report = polyconvexity_witness(kappa, mu, seed, samples);
            let found = !report.clean();
            (Body::Witness(report), found, false)
        }
    };

    let reproduced = found == expected_violation;
    let verdict = if reproduced { "reproduced" } else { "contradicted" };
    let manifest = RunManifest::new(
        "falsify",
        json!({
            "model": model_name,
            "test": format!("{test:?}"),
            "samples": samples,
            "kappa": kappa,
            "mu": mu,
        }),
        Some(seed),
    );
    if emit(manifest, verdict, body, out, started).is_err() {
        return usage_error("failed to write report");
    }
    ExitCode::from(if reproduced { EXIT_REPRODUCED } else { EXIT_CONTRADICTED })
}

#[derive(Serialize)]
struct SchwarzCmdReport {
    n_elements: usize,
    subdomains: SubdomainSpec,
    stretch: f64,
    tol: f64,
    monolithic_energy: f64,
    schwarz_energy: f64,
    max_deviation_from_monolithic: f64,
    sweeps: usize,
    rho: Option<f64>,
    r_squared: Option<f64>,
    trace: polyrod::schwarz::SchwarzTrace,
}

#[allow(clippy::too_many_arguments)]
fn run_schwarz(
    problem: &str,
    subdomains: Option<usize>,
    overlap: Option<f64>,
    tol: Option<f64>,
    stretch: Option<f64>,
    elements: Option<usize>,
    config: &Option<PathBuf>,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    if problem != "bar1d" {
        return usage_error(&format!("unknown problem `{problem}` (only bar1d)"));
    }
    let cfg = match ConfigFile::load(config) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let k = subdomains.or(cfg.usize("subdomains")).unwrap_or(2);
    let overlap = overlap.or(cfg.f64("overlap")).unwrap_or(0.2);
    let tol = tol.or(cfg.f64("tol")).unwrap_or(1e-10);
    let stretch = stretch.or(cfg.f64("stretch")).unwrap_or(0.1);
    let n_elements = elements.or(cfg.usize("elements")).unwrap_or(40);
    if n_elements < 2 || !(tol > 0.0) {
        return usage_error("need at least 2 elements and a positive tolerance");
    }

    let model = EnergyModel::new(ModelKind::NeoHookeanEq3, 4.0, 2.0).expect("positive moduli");
    let p = Bar1DProblem {
        n_elements,
        length: 1.0,
        area: 1.0,
        model,
        left_disp: 0.0,
        right_disp: stretch,
    };
    let spec = match SubdomainSpec::uniform(p.n_nodes(), k, overlap) {
        Ok(s) => s,
        Err(e) => return usage_error(&e.to_string()),
    };

    let mono = match monolithic_solve(&p, &p.initial_state(), tol.min(1e-11), 200) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let (x, trace) = match schwarz_solve(&p, &spec, &p.initial_state(), tol, 500, Some(&mono.x)) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let deviation = x
        .iter()
        .zip(mono.x.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let fit = convergence_rate_fit(&trace).ok();

    let converged = trace.converged_in(tol) && deviation <= 10.0 * tol;
    let rho_ok = k == 1 || fit.as_ref().is_some_and(|f| f.rho < 1.0);
    let reproduced = converged && rho_ok;
    let verdict = if reproduced { "reproduced" } else { "contradicted" };

    if let Some(path) = csv {
        if std::fs::write(path, trace_to_csv(&trace)).is_err() {
            return usage_error("failed to write CSV trace");
        }
    }
    let report = SchwarzCmdReport {
        n_elements,
        subdomains: spec,
        stretch,
        tol,
        monolithic_energy: mono.energy,
        schwarz_energy: p.total_energy(&x).unwrap_or(f64::NAN),
        max_deviation_from_monolithic: deviation,
        sweeps: trace.sweeps.len(),
        rho: fit.as_ref().map(|f| f.rho),
        r_squared: fit.as_ref().map(|f| f.r_squared),
        trace,
    };
    let manifest = RunManifest::new(
        "schwarz",
        json!({
            "problem": problem,
            "subdomains": k,
            "overlap": overlap,
            "tol": tol,
            "stretch": stretch,
            "elements": n_elements,
        }),
        None,
    );
    if emit(manifest, verdict, report, out, started).is_err() {
        return usage_error("failed to write report");
    }
    ExitCode::from(if reproduced { EXIT_REPRODUCED } else { EXIT_CONTRADICTED })
}

#[allow(clippy::too_many_arguments)]
fn run_buckling(
    length: Option<f64>,
    nodes: Option<usize>,
    compression: Option<f64>,
    subdomains: Option<usize>,
    overlap: Option<f64>,
    stretch_stiffness: Option<f64>,
    bend_stiffness: Option<f64>,
    seed: Option<u64>,
    config: &Option<PathBuf>,
    out: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> ExitCode {
    let started = Instant::now();
    let cfg = match ConfigFile::load(config) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let length = length.or(cfg.f64("length")).unwrap_or(1.0);
    let n_nodes = nodes.or(cfg.usize("nodes")).unwrap_or(64);
    let compression = compression.or(cfg.f64("compression")).unwrap_or(1.5);
    let k = subdomains.or(cfg.usize("subdomains")).unwrap_or(2);
    let overlap = overlap.or(cfg.f64("overlap")).unwrap_or(0.2);
    let k_s = stretch_stiffness.or(cfg.f64("stretch_stiffness")).unwrap_or(1e4);
    let k_b = bend_stiffness.or(cfg.f64("bend_stiffness")).unwrap_or(1.0);
    let seed = seed.or(cfg.u64("seed")).unwrap_or(0);
    if !(length > 0.0) || n_nodes < 8 || !(compression > 0.0) || !(k_s > 0.0) || !(k_b > 0.0) {
        return usage_error("invalid rod parameters");
    }

    let mut p = ElasticaProblem {
        n_nodes,
        length,
        k_s,
        k_b,
        end_shortening: 0.0,
    };
    let d_crit = match critical_load_estimate(&p) {
        Ok(d) => d,
        Err(e) => return usage_error(&e.to_string()),
    };
    p.end_shortening = compression * d_crit;

    let spec = if k == 1 {
        // handled as an empty window below, but keep a valid spec
        SubdomainSpec::new(vec![(0, n_nodes - 1)], n_nodes).expect("full-range spec")
    } else {
        match SubdomainSpec::uniform(n_nodes, k, overlap) {
            Ok(s) => s,
            Err(e) => return usage_error(&e.to_string()),
        }
    };

    let report = match buckling_experiment(&p, &spec, seed) {
        Ok(r) => r,
        Err(ExperimentError::WindowEmpty(msg)) => {
            eprintln!("window empty: {msg}");
            let manifest = RunManifest::new(
                "buckling",
                json!({
                    "length": length, "nodes": n_nodes, "compression": compression,
                    "subdomains": k, "overlap": overlap,
                    "stretch_stiffness": k_s, "bend_stiffness": k_b,
                }),
                Some(seed),
            );
            let _ = emit(manifest, "window-empty", json!({ "reason": msg }), out, started);
            return ExitCode::from(EXIT_WINDOW_EMPTY);
        }
        Err(e) => return usage_error(&e.to_string()),
    };

    if let Some(path) = csv {
        if let Some(trace) = &report.schwarz_trace {
            if std::fs::write(path, trace_to_csv(trace)).is_err() {
                return usage_error("failed to write CSV trace");
            }
        }
    }

    let reproduced = report.discrepancy_exhibited;
    let verdict = if reproduced { "reproduced" } else { "contradicted" };
    let manifest = RunManifest::new(
        "buckling",
        json!({
            "length": length, "nodes": n_nodes, "compression": compression,
            "subdomains": k, "overlap": overlap,
            "stretch_stiffness": k_s, "bend_stiffness": k_b,
        }),
        Some(seed),
    );
    if emit(manifest, verdict, report, out, started).is_err() {
        return usage_error("failed to write report");
    }
    ExitCode::from(if reproduced { EXIT_REPRODUCED } else { EXIT_CONTRADICTED })
}
