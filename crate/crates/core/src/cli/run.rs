use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{jsonl, write_atomic};
use crate::bench::{run_training, Problem, RunRecord, TrainOptions};
use crate::error::{Error, Result};
use crate::esd::SpectralReport;
use crate::matcore::mat1;
use crate::optim::OptimizerConfig;

/// Environment variable capping worker threads for `run`.
pub const THREADS_ENV: &str = "SPOP_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub hyperparameters: OptimizerConfig,
    pub final_loss: f64,
    pub min_loss: f64,
    pub heavy_steps: usize,
    /// Mean fitted exponent over the final weight matrices.
    pub mean_alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub steps: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub runs: Vec<RunSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs the jobs on up to `threads` scoped workers; results keep job order.
fn run_all(problem: &dyn Problem, jobs: &[OptimizerConfig], opts: &TrainOptions, threads: usize) -> Vec<Result<RunRecord>> {
    let threads = threads.min(jobs.len()).max(1);
    if threads == 1 {
        return jobs.iter().map(|c| run_training(problem, c, opts)).collect();
    }
    let mut slots: Vec<Option<Result<RunRecord>>> = (0..jobs.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                s.spawn(move || {
                    (w..jobs.len())
                        .step_by(threads)
                        .map(|i| (i, run_training(problem, &jobs[i], opts)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("training worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every job ran")).collect()
}

fn fmt_csv(v: f64) -> String {
    format!("{v:?}")
}

/// Loss curves side by side: `step,<name>,<name>,…`.
fn merged_csv(names: &[String], records: &[RunRecord]) -> String {
    let mut out = String::from("step");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    let steps = records.first().map_or(0, |r| r.steps.len());
    for t in 0..steps {
        out.push_str(&t.to_string());
        for r in records {
            out.push(',');
            out.push_str(&fmt_csv(r.steps[t].loss));
        }
        out.push('\n');
    }
    out
}

/// Runs every optimizer in the config at `path` and writes, under the
/// output directory: `<name>.jsonl` (one step per line), `<name>.<param>.mat1`
/// final weights, `<name>.spectra.jsonl` when checkpoints are set,
/// `losses.csv` and `summary.json`.
pub fn cmd_run(path: &Path) -> Result<RunOutcome> {
    let cfg = ExperimentConfig::load(path)?;
    let threads = threads_from_env()?;
    let problem = cfg.problem.build()?;
    let jobs = cfg.optimizer.iter().map(|o| o.resolve(problem.as_ref())).collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = cfg.optimizer.iter().map(|o| o.label()).collect();
    let opts = cfg.train_options();

    let mut records = Vec::with_capacity(jobs.len());
    for (name, r) in names.iter().zip(run_all(problem.as_ref(), &jobs, &opts, threads)) {
        match r {
            Ok(r) => records.push(r),
            Err(e) => return Err(annotate(e, name)),
        }
    }

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let dir = base.join(&cfg.experiment.output_dir);
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let params = problem.param_names();
    let mut files = Vec::new();
    let mut write = |name: String, bytes: &[u8]| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, bytes)?;
        files.push(p);
        Ok(())
    };

    let mut runs = Vec::with_capacity(records.len());
    for ((name, rec), hp) in names.iter().zip(&records).zip(&jobs) {
        write(format!("{name}.jsonl"), &jsonl(&rec.steps)?)?;
        for (pname, w) in params.iter().zip(&rec.final_params) {
            write(format!("{name}.{pname}.mat1"), &mat1::encode(w))?;
        }
        if !rec.checkpoints.is_empty() {
            let mut lines: Vec<SpectralReport> = Vec::new();
            for c in &rec.checkpoints {
                for (tag, reports) in [("weights", &c.weights), ("update", &c.directions)] {
                    for r in &reports.reports {
                        let mut r = r.clone();
                        r.layer_name = format!("step{}/{tag}/{}", c.step, r.layer_name);
                        lines.push(r);
                    }
                }
            }
            write(format!("{name}.spectra.jsonl"), &jsonl(&lines)?)?;
        }
        runs.push(RunSummary {
            name: name.clone(),
            hyperparameters: hp.clone(),
            final_loss: rec.final_loss,
            min_loss: rec.steps.iter().map(|s| s.loss).fold(f64::INFINITY, f64::min),
            heavy_steps: rec.heavy_steps(),
            mean_alpha: rec.final_report(&params)?.mean_alpha,
        });
    }
    write("losses.csv".into(), merged_csv(&names, &records).as_bytes())?;
    let summary = Summary {
        problem: problem.name().to_string(),
        steps: opts.steps,
        batch_size: opts.batch_size.min(problem.n_samples()),
        seed: opts.seed,
        runs,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write("summary.json".into(), text.as_bytes())?;
    Ok(RunOutcome { output_dir: dir, files, summary })
}

fn annotate(e: Error, name: &str) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("optimizer `{name}`: {m}")),
        e => e,
    }
}
