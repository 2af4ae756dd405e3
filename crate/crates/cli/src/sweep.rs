use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use fpphe::fpp::{classify_outcome, run_fpphe, PassageTimeField, SeedField, StopRule, Trace};
use fpphe::persist::{save, Persist};
use fpphe::rng::derive_seed;
use fpphe::stats::{wilson, Z95};
use fpphe::topology::{LazyRegularTree, LazyTriangulation, Topology};
use fpphe::Graph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::graphref::{GraphRef, Host};

/// Upper bound on `cells · runs · vertices`.
pub const WORK_BUDGET: u128 = 50_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub graph: GraphRef,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub runs: usize,
    pub r_survive: usize,
    /// Stop rule in `name:value` form, e.g. `settled:6`.
    pub stop: String,
    pub base_seed: u64,
    /// Worker threads; `FPPHE_THREADS` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<StopRule<f64>> {
        if self.lambdas.is_empty() || self.mus.is_empty() {
            return Err(CliError::Spec(
                "lambda and mu grids must be non-empty".into(),
            ));
        }
        if self.runs == 0 {
            return Err(CliError::Spec("runs must be at least 1".into()));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(CliError::Spec(format!(
                "lambda {l} must be positive and finite"
            )));
        }
        if let Some(m) = self.mus.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(CliError::Spec(format!("mu {m} must lie in [0, 1]")));
        }
        if self.threads == Some(0) {
            return Err(CliError::Spec("threads must be at least 1".into()));
        }
        let stop: StopRule<f64> = self.stop.parse()?;
        if self.graph.is_lazy() && stop == StopRule::Exhaust {
            return Err(CliError::Spec(
                "an unbounded graph needs a stop rule other than exhaust".into(),
            ));
        }
        Ok(stop)
    }

    /// Reads a spec saved by this crate or written by hand without the
    /// `kind`/`version` envelope.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("kind").is_some() {
            Ok(fpphe::persist::from_json(&text)?)
        } else {
            Ok(serde_json::from_value(value)?)
        }
    }

    /// `(λ, μ)` pairs in row-major order: μ varies fastest.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.lambdas
            .iter()
            .flat_map(|&l| self.mus.iter().map(move |&m| (l, m)))
            .collect()
    }
}

/// Passage-time and seed-field seeds of one run.
///
/// They depend on the cell's parameters rather than its position, so a cell
/// gives the same answer wherever it sits in the grid.
pub fn run_seeds(base: u64, lambda: f64, mu: f64, run: usize) -> (u64, u64) {
    let key = [base, lambda.to_bits(), mu.to_bits(), run as u64];
    (
        derive_seed(&[0, key[0], key[1], key[2], key[3]]),
        derive_seed(&[1, key[0], key[1], key[2], key[3]]),
    )
}

/// Disjoint outcome classes; they sum to the number of runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeCounts {
    pub coexist: usize,
    pub fpp1_only: usize,
    pub fppl_only: usize,
    pub neither: usize,
    pub contaminated: usize,
}

impl RegimeCounts {
    pub fn total(&self) -> usize {
        self.coexist + self.fpp1_only + self.fppl_only + self.neither + self.contaminated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub lambda: f64,
    pub mu: f64,
    pub runs: usize,
    pub fpp1: usize,
    pub fppl: usize,
    pub coexist: usize,
    pub extinct: usize,
    /// Runs that kept going after touching the truncation frontier of a
    /// graph with cycles; excluded from every rate.
    pub contaminated: usize,
    pub regimes: RegimeCounts,
    /// False when every run was contaminated.
    pub usable: bool,
    pub fpp1_ci: (f64, f64),
    pub fppl_ci: (f64, f64),
    pub coexist_ci: (f64, f64),
    pub extinct_ci: (f64, f64),
}

impl CellResult {
    pub fn clean_runs(&self) -> usize {
        self.runs - self.contaminated
    }

    pub fn rate(&self, count: usize) -> f64 {
        match self.clean_runs() {
            0 => f64::NAN,
            n => count as f64 / n as f64,
        }
    }

    fn from_outcomes(lambda: f64, mu: f64, outcomes: &[Option<Outcome>]) -> Self {
        let mut regimes = RegimeCounts::default();
        let (mut fpp1, mut fppl, mut extinct) = (0, 0, 0);
        for o in outcomes {
            let Some(o) = o else {
                regimes.contaminated += 1;
                continue;
            };
            fpp1 += o.fpp1 as usize;
            fppl += o.fppl as usize;
            extinct += o.extinct as usize;
            match (o.fpp1, o.fppl) {
                (true, true) => regimes.coexist += 1,
                (true, false) => regimes.fpp1_only += 1,
                (false, true) => regimes.fppl_only += 1,
                (false, false) => regimes.neither += 1,
            }
        }
        let clean = outcomes.len() - regimes.contaminated;
        let ci = |k| wilson(k, clean, Z95);
        CellResult {
            lambda,
            mu,
            runs: outcomes.len(),
            fpp1,
            fppl,
            coexist: regimes.coexist,
            extinct,
            contaminated: regimes.contaminated,
            regimes,
            usable: clean > 0,
            fpp1_ci: ci(fpp1),
            fppl_ci: ci(fppl),
            coexist_ci: ci(regimes.coexist),
            extinct_ci: ci(extinct),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    fpp1: bool,
    fppl: bool,
    extinct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn cell(&self, lambda: f64, mu: f64) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.lambda == lambda && c.mu == mu)
    }

    /// One row per cell; the interval is the Wilson 95% interval of the
    /// coexistence rate.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("lambda,mu,runs,fpp1,fppl,coexist,extinct,contaminated,ci_low,ci_high\n");
        for c in &self.cells {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{:.6},{:.6}",
                c.lambda,
                c.mu,
                c.runs,
                c.fpp1,
                c.fppl,
                c.coexist,
                c.extinct,
                c.contaminated,
                c.coexist_ci.0,
                c.coexist_ci.1
            )
            .expect("writing to a string");
        }
        s
    }
}

/// Wall-clock figures, kept apart from the deterministic result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTiming {
    pub threads: usize,
    pub total_seconds: f64,
    /// Summed run time per cell.
    pub cell_seconds: Vec<f64>,
}

impl Persist for SweepSpec {
    const KIND: &'static str = "sweep_spec";
}
impl Persist for SweepResult {
    const KIND: &'static str = "sweep_result";
}
impl Persist for SweepTiming {
    const KIND: &'static str = "sweep_timing";
}

/// Worker count: `FPPHE_THREADS`, then the spec, then the machine.
pub fn thread_width(spec: &SweepSpec) -> Result<usize> {
    if let Ok(v) = std::env::var("FPPHE_THREADS") {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Spec(format!(
                "FPPHE_THREADS={v} is not a positive integer"
            ))),
        };
    }
    Ok(spec
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

pub fn sweep(spec: &SweepSpec) -> Result<(SweepResult, SweepTiming)> {
    spec.validate()?;
    sweep_on(&spec.graph.host()?, spec)
}

/// Runs a sweep on an already built host matching `spec.graph`.
pub fn sweep_on(host: &Host, spec: &SweepSpec) -> Result<(SweepResult, SweepTiming)> {
    let stop = spec.validate()?;
    let cells = spec.cells();
    if let Host::Finite(g) = host {
        let work = cells.len() as u128 * spec.runs as u128 * g.vertex_count() as u128;
        if work > WORK_BUDGET {
            return Err(CliError::Spec(format!(
                "sweep needs ~{work} vertex visits, budget is {WORK_BUDGET}"
            )));
        }
    }
    let threads = thread_width(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let start = Instant::now();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.runs).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<(Option<Outcome>, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                let t0 = Instant::now();
                let (lambda, mu) = cells[c];
                let out = one_run(host, lambda, mu, spec.base_seed, r, spec.r_survive, stop);
                out.map(|o| (o, t0.elapsed().as_secs_f64()))
            })
            .collect::<fpphe::Result<_>>()
    })?;
    let mut results = Vec::with_capacity(cells.len());
    let mut cell_seconds = Vec::with_capacity(cells.len());
    for (c, chunk) in outcomes.chunks(spec.runs).enumerate() {
        let (lambda, mu) = cells[c];
        let flat: Vec<Option<Outcome>> = chunk.iter().map(|x| x.0).collect();
        results.push(CellResult::from_outcomes(lambda, mu, &flat));
        cell_seconds.push(chunk.iter().map(|x| x.1).sum());
    }
    let timing = SweepTiming {
        threads,
        total_seconds: start.elapsed().as_secs_f64(),
        cell_seconds,
    };
    Ok((
        SweepResult {
            spec: spec.clone(),
            cells: results,
        },
        timing,
    ))
}

fn one_run(
    host: &Host,
    lambda: f64,
    mu: f64,
    base: u64,
    run: usize,
    r_survive: usize,
    stop: StopRule<f64>,
) -> fpphe::Result<Option<Outcome>> {
    let (pt_seed, seed_seed) = run_seeds(base, lambda, mu, run);
    let pt = PassageTimeField::new(pt_seed);
    let seeds = SeedField::new(seed_seed, mu);
    match host {
        Host::Finite(g) => classify(run_fpphe(g, lambda, &pt, &seeds, stop)?, r_survive, Some(g)),
        Host::LazyTessellation(q) => lazy_run(
            LazyTriangulation::new(*q)?,
            lambda,
            &pt,
            &seeds,
            stop,
            r_survive,
        ),
        Host::LazyTree(d) => lazy_run(
            LazyRegularTree::new(*d)?,
            lambda,
            &pt,
            &seeds,
            stop,
            r_survive,
        ),
    }
}

fn lazy_run<G: Topology>(
    topo: G,
    lambda: f64,
    pt: &PassageTimeField,
    seeds: &SeedField,
    stop: StopRule<f64>,
    r_survive: usize,
) -> fpphe::Result<Option<Outcome>> {
    classify(run_fpphe(topo, lambda, pt, seeds, stop)?, r_survive, None)
}

fn classify(
    trace: Trace<f64>,
    r_survive: usize,
    g: Option<&Graph>,
) -> fpphe::Result<Option<Outcome>> {
    if trace.frontier_touched && !g.is_some_and(Graph::is_tree) {
        return Ok(None);
    }
    let p = classify_outcome(&trace, r_survive, g)?;
    Ok(Some(Outcome {
        fpp1: p.fpp1_survives,
        fppl: p.fppl_survives,
        extinct: p.extinction,
    }))
}

/// Writes `sweep.csv`, `sweep.json` and `timing.json` into `dir`.
pub fn write_outputs(result: &SweepResult, timing: &SweepTiming, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("sweep.csv"), result.to_csv())?;
    save(result, dir.join("sweep.json"))?;
    save(timing, dir.join("timing.json"))?;
    Ok(())
}
