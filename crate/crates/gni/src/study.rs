//! Multi-start studies: every solver from every start, in parallel.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gni_core::games::{make_game, GameInstance};
use gni_core::{rng, solvers, Game, Method, SolverConfig, Status, Trace, Vector};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, PlotQuantity, CONVERGENCE_TOL};
use crate::error::{IoContext, Result};
use crate::svg::{self, PlotOptions, Series};
use crate::trace_csv;

/// What the per-run error column measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    /// `‖x − x*‖` against the game's known equilibrium.
    DistanceToEquilibrium,
    /// `‖∇f‖` at the final iterate.
    FinalGradNorm,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub method: Method,
    pub start: usize,
    pub x0: Vector,
    pub trace: Trace,
    /// First `k` with `‖∇f‖ ≤ CONVERGENCE_TOL`, else the number of steps taken.
    pub iterations: usize,
    pub converged: bool,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub converged: usize,
    pub convergence_fraction: f64,
    pub mean_iterations: f64,
    pub median_iterations: f64,
    pub mean_final_error: f64,
    pub mean_final_grad_norm: f64,
    pub statuses: BTreeMap<String, usize>,
    pub eta: f64,
    pub rho: f64,
    pub step_rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub name: String,
    pub game: String,
    pub seed: u64,
    pub starts: usize,
    pub convergence_tol: f64,
    pub error_metric: ErrorMetric,
    pub methods: Vec<MethodSummary>,
}

impl StudySummary {
    pub fn method(&self, m: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|s| s.method == m.label())
    }
}

pub struct Study {
    pub config: ExperimentConfig,
    pub game: GameInstance,
    pub runs: Vec<RunOutcome>,
    pub summary: StudySummary,
}

/// Seeded starting points shared by every solver.
pub fn starting_points<G: Game + ?Sized>(config: &ExperimentConfig, game: &G) -> Result<Vec<Vector>> {
    let mut r = rng::seeded(config.seed);
    (0..config.starts)
        .map(|_| config.init.sample(game, &mut r).map_err(Into::into))
        .collect()
}

pub fn run_study(config: &ExperimentConfig) -> Result<Study> {
    config.validate()?;
    let game = make_game(&config.game, config.seed)?;
    let starts = starting_points(config, &game)?;
    let equilibrium = game.known_equilibrium();
    let jobs: Vec<(&SolverConfig, usize)> = config
        .solvers
        .iter()
        .flat_map(|s| (0..starts.len()).map(move |k| (s, k)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(solver, k)| {
            let x0 = &starts[k];
            let trace = if config.timing {
                let t0 = Instant::now();
                let mut clock = || t0.elapsed().as_secs_f64() * 1e3;
                solvers::solve_with_clock(&game, solver, x0, Some(&mut clock))?
            } else {
                solvers::solve(&game, solver, x0)?
            };
            let hit = trace.first_below(CONVERGENCE_TOL);
            let error = match &equilibrium {
                Some(eq) => (&trace.final_point - eq).norm(),
                None => trace.final_grad_norm(),
            };
            Ok(RunOutcome {
                method: solver.method,
                start: k,
                x0: x0.clone(),
                iterations: hit.unwrap_or_else(|| trace.steps()),
                converged: hit.is_some(),
                error,
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = if equilibrium.is_some() {
        ErrorMetric::DistanceToEquilibrium
    } else {
        ErrorMetric::FinalGradNorm
    };
    let summary = summarize(config, &game, &runs, metric);
    Ok(Study {
        config: config.clone(),
        game,
        runs,
        summary,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

fn summarize<G: Game + ?Sized>(config: &ExperimentConfig, game: &G, runs: &[RunOutcome], metric: ErrorMetric) -> StudySummary {
    let methods = config
        .solvers
        .iter()
        .map(|s| {
            let mine: Vec<&RunOutcome> = runs.iter().filter(|r| r.method == s.method).collect();
            let converged = mine.iter().filter(|r| r.converged).count();
            let mut statuses = BTreeMap::new();
            for r in &mine {
                *statuses.entry(r.trace.status.label().to_string()).or_insert(0) += 1;
            }
            let mut iters: Vec<f64> = mine.iter().map(|r| r.iterations as f64).collect();
            let first = &mine[0].trace;
            MethodSummary {
                method: s.method.label().to_string(),
                runs: mine.len(),
                converged,
                convergence_fraction: converged as f64 / mine.len() as f64,
                mean_iterations: mean(iters.iter().copied()),
                median_iterations: median(&mut iters),
                mean_final_error: mean(mine.iter().map(|r| r.error)),
                mean_final_grad_norm: mean(mine.iter().map(|r| r.trace.final_grad_norm())),
                statuses,
                eta: first.gni.eta,
                rho: first.policy.rho,
                step_rule: first.policy.provenance.label().to_string(),
            }
        })
        .collect();
    StudySummary {
        name: config.name.clone(),
        game: game.name().to_string(),
        seed: config.seed,
        starts: config.starts,
        convergence_tol: CONVERGENCE_TOL,
        error_metric: metric,
        methods,
    }
}

pub fn trace_path(dir: &Path, method: Method, start: usize) -> PathBuf {
    dir.join("traces").join(format!("{}_{:04}.csv", method.label(), start))
}

/// `method,start,status,iterations,converged,error,final_grad_norm,x0_1..,x_1..`
pub fn final_points_csv(runs: &[RunOutcome], n: usize) -> String {
    let mut out = String::from("method,start,status,iterations,converged,error,final_grad_norm");
    for prefix in ["x0_", "x_"] {
        for j in 1..=n {
            write!(out, ",{prefix}{j}").unwrap();
        }
    }
    out.push('\n');
    for r in runs {
        write!(
            out,
            "{},{},{},{},{},{},{}",
            r.method.label(),
            r.start,
            r.trace.status.label(),
            r.iterations,
            r.converged,
            r.error,
            r.trace.final_grad_norm()
        )
        .unwrap();
        for v in r.x0.iter().chain(r.trace.final_point.iter()) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

impl Study {
    /// Writes traces, `final_points.csv`, `summary.json` and, when enabled,
    /// `convergence.svg`. Returns the files written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces).at(&traces)?;
        let players = self.game.structure().players();
        let mut files: Vec<PathBuf> = self
            .runs
            .par_iter()
            .map(|r| {
                let path = trace_path(dir, r.method, r.start);
                trace_csv::emit_csv(&r.trace.records, players, &path)?;
                Ok(path)
            })
            .collect::<Result<_>>()?;

        let fp = dir.join("final_points.csv");
        std::fs::write(&fp, final_points_csv(&self.runs, self.game.structure().total())).at(&fp)?;
        files.push(fp);

        let js = dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary)?;
        text.push('\n');
        std::fs::write(&js, text).at(&js)?;
        files.push(js);

        if self.config.emit_svg {
            let path = dir.join("convergence.svg");
            svg::emit_svg(&self.plot_series(), &self.plot_options(), &path)?;
            files.push(path);
        }
        Ok(files)
    }

    /// The first start of every method.
    pub fn plot_series(&self) -> Vec<Series> {
        self.runs
            .iter()
            .filter(|r| r.start == 0)
            .map(|r| Series {
                label: r.method.label().to_string(),
                points: r
                    .trace
                    .records
                    .iter()
                    .map(|rec| {
                        let y = match self.config.plot {
                            PlotQuantity::GradNorm => rec.grad_norm,
                            PlotQuantity::Merit => rec.merit,
                        };
                        (rec.iter as f64, y)
                    })
                    .collect(),
            })
            .collect()
    }

    fn plot_options(&self) -> PlotOptions {
        PlotOptions {
            title: format!("{} ({})", self.config.name, self.game.name()),
            y_label: match self.config.plot {
                PlotQuantity::GradNorm => "‖∇f‖".into(),
                PlotQuantity::Merit => "V".into(),
            },
        }
    }

    pub fn any_status(&self, status: Status) -> bool {
        self.runs.iter().any(|r| r.trace.status == status)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_even_and_odd_lengths() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }
}
