//! Command-line front end: every workflow reads JSON files and emits one
//! machine-readable JSON report on stdout, with a human summary on stderr.
//!
//! Exit codes: 0 certified, 2 optimization suspect, 1 input error (no
//! report is printed on exit 1).

use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use polyplank::bernstein;
use polyplank::corollaries;
use polyplank::covering::{uncovered_witness, CoveringOutcome};
use polyplank::distance::{
    brute_force_distance, estimator, DistanceConfig, GridSpec,
};
use polyplank::homogenization;
use polyplank::maximizer::{find_witness, MaximizerConfig, Status};
use polyplank::schema;
use polyplank::{Domain, TrigPoly};

#[derive(Parser)]
#[command(name = "polyplank", version, about = "Witness points far from polynomial zero sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchOpts {
    /// RNG seed (echoed in the report; identical seeds replay exactly).
    #[arg(long)]
    seed: u64,
    /// Multistart count (default 64 per complex dimension).
    #[arg(long)]
    starts: Option<usize>,
    /// Margin tolerance for certification.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

impl SearchOpts {
    fn maximizer(&self) -> MaximizerConfig {
        MaximizerConfig {
            starts: self.starts,
            seed: self.seed,
            margin_tol: self.tol,
            ..MaximizerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Find and certify a witness point for a plank instance.
    Witness {
        /// Instance JSON file.
        #[arg(long)]
        instance: String,
        #[command(flatten)]
        search: SearchOpts,
        /// Cross-check distances against the grid oracle where the
        /// dimension permits it.
        #[arg(long)]
        oracle: bool,
        /// Grid resolution for the oracle cross-check.
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Skip the budget check (no guarantee is asserted).
        #[arg(long)]
        exploratory: bool,
    },
    /// Find a point of the ball missed by every cylinder.
    Covering {
        /// Ball radius R.
        #[arg(long)]
        radius: f64,
        /// Cylinder list JSON file.
        #[arg(long)]
        cylinders: String,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Trigonometric lemma bounds, or `verify` a concrete polynomial.
    Bernstein {
        #[command(subcommand)]
        action: Option<BernsteinAction>,
        /// Degree n (bounds mode).
        #[arg(long)]
        n: Option<u32>,
        /// Root order k (bounds mode).
        #[arg(long)]
        k: Option<u32>,
    },
    /// Unit vector far from the spans of k-subsets of a basis.
    SpanAvoid {
        /// Vector family JSON file.
        #[arg(long)]
        vectors: String,
        /// Span size k in [1, d-1].
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Unit vector far from each of n >= d given vectors.
    ManyVectors {
        #[arg(long)]
        vectors: String,
        /// Cap on the number of hyperplane forms C(n, d-1).
        #[arg(long, default_value_t = corollaries::MAX_FORMS)]
        max_forms: usize,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Maximize the product of |<x - y_k, u_k>| on the unit sphere.
    Polarization {
        /// Vector family JSON file; "shifts" holds the y_k (default 0).
        #[arg(long)]
        vectors: String,
        #[command(flatten)]
        search: SearchOpts,
    },
    /// Phase combination of the dual basis with norm >= sqrt(d).
    Steinhaus {
        #[arg(long)]
        vectors: String,
        /// RNG seed.
        #[arg(long)]
        seed: u64,
        /// Random restarts on top of the greedy pass.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Convergence of the homogenized objective to the ball objective.
    AppendixCheck {
        /// Instance JSON file (complex ball domain).
        #[arg(long)]
        instance: String,
        /// Comma-separated delta_0 schedule.
        #[arg(long, default_value = "10,100,1000", value_delimiter = ',')]
        delta0: Vec<f64>,
        /// Number of random grid points in the ball of radius 0.9 R.
        #[arg(long, default_value_t = 100)]
        grid_points: usize,
        /// RNG seed for the grid sample.
        #[arg(long)]
        seed: u64,
    },
    /// Distance from a point to a polynomial zero set.
    OracleDistance {
        /// Polynomial JSON file.
        #[arg(long)]
        poly: String,
        /// Comma-separated point coordinates: re,im pairs for complex
        /// polynomials, plain reals for real ones.
        #[arg(long, value_delimiter = ',')]
        point: Vec<f64>,
        /// Which estimator to run.
        #[arg(long, default_value = "penalized")]
        estimator: String,
        /// Grid resolution (grid estimator).
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        /// Grid half-width around the point (grid estimator).
        #[arg(long, default_value_t = 2.0)]
        half_width: f64,
        /// RNG seed.
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum BernsteinAction {
    /// Verify the lemma bounds on a concrete trigonometric polynomial.
    Verify {
        /// JSON file {"cos": [a0..an], "sin": [b1..bn]}.
        #[arg(long)]
        poly: String,
        /// Expected root order at 0 (default: as detected).
        #[arg(long)]
        k: Option<u32>,
        /// Relative tolerance for root-order detection.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn emit(report: &serde_json::Value, summary: &str) {
    println!("{report}");
    eprintln!("{summary}");
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Witness {
            instance,
            search,
            oracle,
            resolution,
            exploratory,
        } => {
            let mut j: schema::InstanceJson = serde_json::from_str(&read(&instance)?)?;
            j.exploratory |= exploratory;
            let inst = schema::instance_from_json(&j)?;
            let cfg = search.maximizer();
            let report = find_witness(&inst, &cfg)?;
            let mut out = schema::witness_report_json(&report, &inst.domain());
            let mut suspect = report.status == Status::OptimizationSuspect;
            if oracle {
                if let Domain::ComplexBall { .. } = inst.domain() {
                    let checks =
                        oracle_cross_check(&inst, &report, resolution)?;
                    for (item, check) in out["items"]
                        .as_array_mut()
                        .expect("items array")
                        .iter_mut()
                        .zip(&checks)
                    {
                        if let Some((od, agrees)) = check {
                            item["oracle_distance"] = serde_json::json!(od);
                            item["oracle_agrees"] = serde_json::json!(agrees);
                            if !agrees {
                                suspect = true;
                            }
                        }
                    }
                }
            }
            if suspect {
                out["status"] = serde_json::json!("optimization_suspect");
            }
            let status = out["status"].as_str().unwrap_or_default().to_string();
            emit(
                &out,
                &format!(
                    "witness: value {:.6}, {} item(s), status {status}",
                    report.value,
                    report.items.len()
                ),
            );
            Ok(if suspect { 2 } else { 0 })
        }
        Command::Covering {
            radius,
            cylinders,
            search,
        } => {
            let cyls = schema::parse_cylinders(&read(&cylinders)?)?;
            let cfg = search.maximizer();
            let outcome = uncovered_witness(&cyls, radius, &cfg)?;
            let out = schema::covering_report_json(&outcome, search.seed);
            match &outcome {
                CoveringOutcome::BudgetNotViolated { total, limit } => emit(
                    &out,
                    &format!("covering: budget not violated ({total:.6} >= {limit:.6})"),
                ),
                CoveringOutcome::Witness { margins, .. } => emit(
                    &out,
                    &format!(
                        "covering: witness found, min margin {:.6}",
                        margins.iter().cloned().fold(f64::INFINITY, f64::min)
                    ),
                ),
            }
            Ok(0)
        }
        Command::Bernstein { action, n, k } => match action {
            Some(BernsteinAction::Verify { poly, k, tol }) => {
                let j: serde_json::Value = serde_json::from_str(&read(&poly)?)?;
                let cos: Vec<f64> = serde_json::from_value(
                    j.get("cos").cloned().unwrap_or(serde_json::json!([])),
                )?;
                let sin: Vec<f64> = serde_json::from_value(
                    j.get("sin").cloned().unwrap_or(serde_json::json!([])),
                )?;
                let q = TrigPoly::new(cos, sin);
                let expected = match k {
                    Some(k) => k,
                    None => q.root_order(0.0, tol) as u32,
                };
                let report = bernstein::verify_lemma(&q, expected, tol)?;
                let out = schema::lemma_report_json(&report);
                emit(
                    &out,
                    &format!(
                        "bernstein verify: t0 {:.6}, bounds ({:.6}, {:.6}), passes {}",
                        report.t0, report.bound_a, report.bound_b, report.passes
                    ),
                );
                Ok(if report.passes { 0 } else { 2 })
            }
            None => {
                let (Some(n), Some(k)) = (n, k) else {
                    bail!("bernstein needs --n and --k (or the verify subcommand)");
                };
                let (a, b) = bernstein::lemma_bounds(n, k)?;
                let out = schema::bernstein_bounds_json(n, k, a, b);
                emit(&out, &format!("bernstein: bound_a {a:.6}, bound_b {b:.6}"));
                Ok(0)
            }
        },
        Command::SpanAvoid { vectors, k, search } => {
            let cfg = schema::parse_vectors(&read(&vectors)?)?;
            let rep = corollaries::span_avoidance_witness(cfg.vectors(), k, &search.maximizer())?;
            let ok = rep.min_distance >= rep.bound - search.tol;
            let out = schema::span_avoid_json(&rep, k, search.seed);
            emit(
                &out,
                &format!(
                    "span-avoid: min distance {:.6} vs bound {:.6}",
                    rep.min_distance, rep.bound
                ),
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::ManyVectors {
            vectors,
            max_forms,
            search,
        } => {
            let cfg = schema::parse_vectors(&read(&vectors)?)?;
            let rep =
                corollaries::many_vectors_witness(cfg.vectors(), &search.maximizer(), max_forms)?;
            let ok = rep.min_distance >= rep.bound - search.tol;
            let out = schema::many_vectors_json(&rep, search.seed);
            emit(
                &out,
                &format!(
                    "many-vectors: min distance {:.6} vs bound {:.6}{}",
                    rep.min_distance,
                    rep.bound,
                    if rep.perturbed { " (input perturbed)" } else { "" }
                ),
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::Polarization { vectors, search } => {
            let cfg = schema::parse_vectors(&read(&vectors)?)?;
            let d = cfg.d();
            let zeros = vec![vec![polyplank::C64::new(0.0, 0.0); d]; cfg.vectors().len()];
            let ys = cfg.shifts().map(|s| s.to_vec()).unwrap_or(zeros);
            let rep =
                corollaries::polarization_witness(cfg.vectors(), &ys, &search.maximizer())?;
            let ok = rep.value >= rep.bound - 1e-9;
            let out = schema::polarization_json(&rep, search.seed);
            emit(
                &out,
                &format!(
                    "polarization: value {:.6} vs bound {:.6}",
                    rep.value, rep.bound
                ),
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::Steinhaus {
            vectors,
            seed,
            restarts,
        } => {
            let cfg = schema::parse_vectors(&read(&vectors)?)?;
            let rep = corollaries::steinhaus_witness(cfg.vectors(), seed, restarts)?;
            let d = cfg.d() as f64;
            let ok = rep.u_norm * rep.u_norm >= d - 1e-9;
            let out = schema::steinhaus_json(&rep, seed);
            emit(
                &out,
                &format!("steinhaus: |u|^2 = {:.6} (>= d = {d})", rep.u_norm * rep.u_norm),
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::AppendixCheck {
            instance,
            delta0,
            grid_points,
            seed,
        } => {
            let inst = schema::parse_instance(&read(&instance)?)?;
            let Domain::ComplexBall { radius } = inst.domain() else {
                bail!("appendix-check needs a complex_ball instance");
            };
            let polys: Vec<_> = inst.items().iter().map(|i| i.poly.clone()).collect();
            let deltas: Vec<f64> = inst.items().iter().map(|i| i.delta).collect();
            let grid = homogenization::sample_grid(&polys, radius, grid_points, seed)?;
            let rep =
                homogenization::convergence_report(&polys, &deltas, radius, &delta0, &grid)?;
            let ok = rep.decreasing && rep.last_within_tolerance;
            let out = schema::convergence_json(&rep);
            emit(
                &out,
                &format!(
                    "appendix-check: {} schedule points, decreasing {}",
                    rep.rows.len(),
                    rep.decreasing
                ),
            );
            Ok(if ok { 0 } else { 2 })
        }
        Command::OracleDistance {
            poly,
            point,
            estimator: est_name,
            resolution,
            half_width,
            seed,
        } => {
            let pj: schema::PolyJson = serde_json::from_str(&read(&poly)?)?;
            let p = schema::poly_from_json(&pj)?;
            let pt = match p.field() {
                polyplank::Field::Complex => schema::c64s_from_flat(&point)?,
                polyplank::Field::Real => point
                    .iter()
                    .map(|&x| polyplank::C64::new(x, 0.0))
                    .collect(),
            };
            let cfg = DistanceConfig {
                seed,
                grid: GridSpec {
                    resolution,
                    half_width,
                },
                ..DistanceConfig::default()
            };
            let est = estimator(&est_name)?;
            let result = est.estimate(&p, &pt, &cfg)?;
            let out = schema::distance_json(&result, est.name(), seed);
            emit(
                &out,
                &format!("oracle-distance [{}]: {:.6}", est.name(), result.distance),
            );
            Ok(0)
        }
    }
}

/// Per-item grid cross-check; None when the dimension rules the oracle out.
fn oracle_cross_check(
    inst: &polyplank::PlankInstance,
    report: &polyplank::maximizer::WitnessReport,
    resolution: f64,
) -> Result<Vec<Option<(f64, bool)>>> {
    let mut out = Vec::with_capacity(report.items.len());
    for (item, margin) in inst.items().iter().zip(&report.items) {
        if 2 * item.poly.dim() > 4 {
            out.push(None);
            continue;
        }
        let spec = GridSpec {
            resolution,
            half_width: margin.distance + 10.0 * resolution,
        };
        let oracle = brute_force_distance(&item.poly, &report.witness, &spec)?;
        let diam = spec.diameter(2 * item.poly.dim());
        let agrees = (margin.distance - oracle.distance).abs() <= 2.0 * diam;
        out.push(Some((oracle.distance, agrees)));
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
