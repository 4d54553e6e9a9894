//! Parameter sweeps over independent simulation points.
//!
//! Points run sequentially or, with the `parallel` feature, on a rayon pool.
//! Either way rows come back in grid order, so the CSV does not depend on
//! the execution mode or thread count.

use crate::circuit::{random_circuit, ArityDistribution, Circuit};
use crate::config::{apply_override, ArchitectureConfig, PhysicalParams};
use crate::engine::simulate;
use crate::error::{Error, Result};
use crate::placement::{load_mapping, vanilla_map};
use crate::report::{csv_row, summarize, ExecutionReport, CSV_COLUMNS};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSource {
    Fixed(Circuit),
    Random {
        qubits: usize,
        gates: usize,
        arity: ArityDistribution,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub arch: ArchitectureConfig,
    pub params: PhysicalParams,
    pub circuit: CircuitSource,
    /// Mapping file contents; vanilla mapping when absent.
    pub mapping: Option<String>,
    pub vary: Vec<(String, Vec<String>)>,
    pub repetitions: usize,
    pub base_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// `threads == 0` uses rayon's default pool.
    Parallel { threads: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: Vec<(String, String)>,
    pub repetition: usize,
    pub seed: u64,
    pub result: std::result::Result<ExecutionReport, Error>,
}

/// Parses `v1,v2,...` or an inclusive integer range `a..b`.
pub fn parse_values(spec: &str) -> Result<Vec<String>> {
    if let Some((a, b)) = spec.split_once("..") {
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::Sweep(format!("bad range bound `{s}` in `{spec}`")))
        };
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi {
            return Err(Error::Sweep(format!("empty range `{spec}`")));
        }
        return Ok((lo..=hi).map(|v| v.to_string()).collect());
    }
    let vals: Vec<String> = spec.split(',').map(|v| v.trim().to_string()).collect();
    if vals.iter().any(String::is_empty) {
        return Err(Error::Sweep(format!("empty value in `{spec}`")));
    }
    Ok(vals)
}

/// Parses `key=values`.
pub fn parse_vary(arg: &str) -> Result<(String, Vec<String>)> {
    let (k, v) = arg
        .split_once('=')
        .ok_or_else(|| Error::Sweep(format!("expected key=values, got `{arg}`")))?;
    let key = k.trim().to_string();
    check_key(&key)?;
    Ok((key, parse_values(v)?))
}

fn check_key(key: &str) -> Result<()> {
    if ArchitectureConfig::is_key(key) || PhysicalParams::is_key(key) {
        Ok(())
    } else {
        Err(Error::Sweep(format!("unknown sweep key `{key}`")))
    }
}

/// Cartesian product in lexicographic order; the first key varies slowest.
pub fn expand_grid(vary: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    let mut grid = vec![Vec::new()];
    for (key, values) in vary {
        grid = grid
            .into_iter()
            .flat_map(|prefix: Vec<(String, String)>| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((key.clone(), v.clone()));
                    p
                })
            })
            .collect();
    }
    grid
}

struct Job<'a> {
    point: Vec<(String, String)>,
    repetition: usize,
    seed: u64,
    circuit: &'a (Circuit, usize),
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Sweep("repetitions must be at least 1".into()));
        }
        for (k, vals) in &self.vary {
            check_key(k)?;
            if vals.is_empty() {
                return Err(Error::Sweep(format!("no values for `{k}`")));
            }
        }
        Ok(())
    }

    fn circuits(&self) -> Result<Vec<(Circuit, usize)>> {
        (0..self.repetitions)
            .map(|rep| match &self.circuit {
                CircuitSource::Fixed(c) => Ok((c.clone(), c.num_qubits())),
                CircuitSource::Random { qubits, gates, arity } => {
                    let seed = self.base_seed + rep as u64;
                    Ok((random_circuit(*qubits, *gates, arity, seed)?, *qubits))
                }
            })
            .collect()
    }

    fn run_point(&self, job: &Job<'_>) -> Result<ExecutionReport> {
        let mut arch = self.arch.clone();
        let mut params = self.params.clone();
        for (k, v) in &job.point {
            apply_override(&mut arch, &mut params, k, v)?;
        }
        arch.validate()?;
        params.validate()?;
        let (circuit, logical) = job.circuit;
        let placement = match &self.mapping {
            Some(text) => load_mapping(text, &arch)?,
            None => vanilla_map(*logical, &arch)?,
        };
        let trace = simulate(circuit, &arch, &params, placement)?;
        Ok(summarize(&trace, &arch, &params).with_detail(false))
    }

    /// Runs every grid point for every repetition.
    pub fn run(&self, exec: Execution) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let circuits = self.circuits()?;
        let jobs: Vec<Job<'_>> = expand_grid(&self.vary)
            .into_iter()
            .flat_map(|point| {
                circuits.iter().enumerate().map(move |(rep, c)| Job {
                    point: point.clone(),
                    repetition: rep,
                    seed: self.base_seed + rep as u64,
                    circuit: c,
                })
            })
            .collect();
        let reports = match exec {
            Execution::Sequential => jobs.iter().map(|j| self.run_point(j)).collect(),
            Execution::Parallel { threads } => self.run_parallel(&jobs, threads)?,
        };
        Ok(jobs
            .into_iter()
            .zip(reports)
            .map(|(j, result)| SweepRow {
                point: j.point,
                repetition: j.repetition,
                seed: j.seed,
                result,
            })
            .collect())
    }

    #[cfg(feature = "parallel")]
    fn run_parallel(&self, jobs: &[Job<'_>], threads: usize) -> Result<Vec<Result<ExecutionReport>>> {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Sweep(format!("thread pool: {e}")))?;
        Ok(pool.install(|| jobs.par_iter().map(|j| self.run_point(j)).collect()))
    }

    #[cfg(not(feature = "parallel"))]
    fn run_parallel(&self, jobs: &[Job<'_>], _threads: usize) -> Result<Vec<Result<ExecutionReport>>> {
        Ok(jobs.iter().map(|j| self.run_point(j)).collect())
    }

    /// CSV of `rows`: swept keys, then `repetition,seed` when repeating,
    /// then the report columns, then `error` if any point failed.
    pub fn to_csv(&self, rows: &[SweepRow]) -> String {
        let repeat = self.repetitions > 1;
        let failed = rows.iter().any(|r| r.result.is_err());
        let mut header: Vec<&str> = self.vary.iter().map(|(k, _)| k.as_str()).collect();
        if repeat {
            header.extend(["repetition", "seed"]);
        }
        header.extend(CSV_COLUMNS);
        if failed {
            header.push("error");
        }
        let mut out = header.join(",");
        out.push('\n');
        for row in rows {
            let mut cells: Vec<String> = row.point.iter().map(|(_, v)| v.clone()).collect();
            if repeat {
                cells.push(row.repetition.to_string());
                cells.push(row.seed.to_string());
            }
            match &row.result {
                Ok(r) => {
                    cells.push(csv_row(r));
                    if failed {
                        cells.push(String::new());
                    }
                }
                Err(e) => {
                    cells.extend(std::iter::repeat_n(String::new(), CSV_COLUMNS.len()));
                    cells.push(format!("\"{}\"", e.to_string().replace('"', "\"\"")));
                }
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
