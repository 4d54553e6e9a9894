//! Slice-by-slice execution of a circuit.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bundle::{build_local_bundle, build_remote_bundle, Bundle, BundleKind};
use super::timing::{BundleTiming, Executor, TimeBreakdown};
use crate::circuit::Circuit;
use crate::config::{ArchitectureConfig, PhysicalParams};
use crate::error::{Error, Result};
use crate::interconnect::CommEvent;
use crate::placement::Placement;
use crate::teleport::plan_teleports;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleRecord {
    pub index: usize,
    pub slice: usize,
    pub kind: BundleKind,
    pub start_ns: f64,
    pub end_ns: f64,
    pub breakdown: TimeBreakdown,
    pub overlap: f64,
    pub instructions: usize,
    pub size_bits: u64,
    /// Bits put on the interconnect while the bundle ran.
    pub classical_bits: u64,
}

impl BundleRecord {
    pub fn duration(&self) -> f64 {
        self.end_ns - self.start_ns
    }
}

/// Occupancy statistics sampled after every bundle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Utilization {
    pub min: usize,
    pub avg: f64,
    pub max: usize,
}

#[derive(Debug, Default)]
struct UtilizationTracker {
    min: usize,
    max: usize,
    mean_sum: f64,
    samples: usize,
}

impl UtilizationTracker {
    fn sample(&mut self, p: &Placement) {
        let (lo, hi) = p.occupancy_range();
        if self.samples == 0 {
            (self.min, self.max) = (lo, hi);
        } else {
            self.min = self.min.min(lo);
            self.max = self.max.max(hi);
        }
        self.mean_sum += p.mapped_count() as f64 / p.num_cores() as f64;
        self.samples += 1;
    }

    fn finish(&self) -> Utilization {
        Utilization {
            min: self.min,
            avg: self.mean_sum / self.samples.max(1) as f64,
            max: self.max,
        }
    }
}

/// Everything observed while running a circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub bundles: Vec<BundleRecord>,
    pub clock_ns: f64,
    pub comm_events: Vec<CommEvent>,
    /// `comm_map[src][dst]`: teleport hops between cores.
    pub comm_map: Vec<Vec<u64>>,
    pub executed_gates: u64,
    /// Teleport operations issued, one per hop.
    pub teleport_hops: u64,
    /// Logical qubit moves, one per qubit relocated within a slice.
    pub qubit_moves: u64,
    pub qubit_ops: Vec<u64>,
    pub qubit_teleports: Vec<u64>,
    pub utilization: Utilization,
    pub final_occupancy: Vec<usize>,
}

impl ExecutionTrace {
    /// Phase totals over all bundles.
    pub fn breakdown(&self) -> TimeBreakdown {
        let mut t = TimeBreakdown::default();
        for b in &self.bundles {
            t.accumulate(&b.breakdown);
        }
        t
    }

    pub fn overlap(&self) -> f64 {
        self.bundles.iter().map(|b| b.overlap).sum()
    }

    pub fn classical_bits(&self) -> u64 {
        self.bundles.iter().map(|b| b.classical_bits).sum()
    }

    /// One line per bundle: index, slice, kind, start, end, then the phases.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for b in &self.bundles {
            let t = &b.breakdown;
            let _ = writeln!(
                out,
                "{} slice={} {} start={:.3} end={:.3} n={} bits={} fetch={:.3} decode={:.3} dispatch={:.3} epr_gen={:.3} epr_dist={:.3} pre={:.3} classical={:.3} post={:.3} gate={:.3} ack={:.3} overlap={:.3}",
                b.index,
                b.slice,
                b.kind,
                b.start_ns,
                b.end_ns,
                b.instructions,
                b.size_bits,
                t.fetch,
                t.decode,
                t.dispatch,
                t.epr_gen,
                t.epr_dist,
                t.pre_proc,
                t.classical_transfer,
                t.post_proc,
                t.gate_exec,
                t.ack,
                b.overlap,
            );
        }
        out
    }
}

fn check_inputs(
    circuit: &Circuit,
    arch: &ArchitectureConfig,
    params: &PhysicalParams,
    placement: &Placement,
) -> Result<()> {
    arch.validate()?;
    params.validate()?;
    if placement.num_cores() != arch.num_cores() || placement.capacity() != arch.qubits_per_core {
        return Err(Error::Mapping(format!(
            "placement is for {} cores of {} qubits, architecture has {} of {}",
            placement.num_cores(),
            placement.capacity(),
            arch.num_cores(),
            arch.qubits_per_core
        )));
    }
    if let Some(q) = (0..circuit.num_qubits()).find(|&q| placement.core_of(q).is_none()) {
        return Err(Error::Mapping(format!("circuit qubit {q} has no core")));
    }
    Ok(())
}

/// Runs `circuit` from `placement`.
///
/// Each slice becomes its remote bundles (one per teleport round) followed
/// by one local bundle; bundles run back to back.
pub fn simulate(
    circuit: &Circuit,
    arch: &ArchitectureConfig,
    params: &PhysicalParams,
    mut placement: Placement,
) -> Result<ExecutionTrace> {
    check_inputs(circuit, arch, params, &placement)?;
    let m = arch.num_cores();
    let n = placement.num_logical().max(circuit.num_qubits());
    let mut ex = Executor::new(arch, params);
    let mut util = UtilizationTracker::default();
    let mut trace = ExecutionTrace {
        bundles: Vec::new(),
        clock_ns: 0.0,
        comm_events: Vec::new(),
        comm_map: vec![vec![0; m]; m],
        executed_gates: 0,
        teleport_hops: 0,
        qubit_moves: 0,
        qubit_ops: vec![0; n],
        qubit_teleports: vec![0; n],
        utilization: Utilization::default(),
        final_occupancy: Vec::new(),
    };

    for (si, slice) in circuit.slices().iter().enumerate() {
        let rounds = plan_teleports(slice, &placement, arch)?;
        let mut moved = BTreeSet::new();
        for round in &rounds {
            let bundle = build_remote_bundle(round, &mut placement)?;
            for op in &round.ops {
                trace.comm_map[op.src_core][op.dst_core] += 1;
                moved.insert(op.qubit);
            }
            trace.teleport_hops += round.ops.len() as u64;
            run_bundle(&mut ex, &bundle, si, &mut trace)?;
            util.sample(&placement);
        }
        for &q in &moved {
            trace.qubit_teleports[q] += 1;
        }
        trace.qubit_moves += moved.len() as u64;

        let bundle = build_local_bundle(slice, &placement)?;
        run_bundle(&mut ex, &bundle, si, &mut trace)?;
        util.sample(&placement);
        for g in slice.gates() {
            for &q in g.qubits() {
                trace.qubit_ops[q] += 1;
            }
        }
        trace.executed_gates += slice.len() as u64;
    }

    if util.samples == 0 {
        util.sample(&placement);
    }
    trace.utilization = util.finish();
    trace.final_occupancy = placement.occupancy().to_vec();
    trace.comm_events = ex.interconnect.into_events();
    Ok(trace)
}

fn run_bundle(ex: &mut Executor<'_>, b: &Bundle, slice: usize, trace: &mut ExecutionTrace) -> Result<()> {
    let first_event = ex.interconnect.events().len();
    let BundleTiming {
        breakdown,
        overlap,
        total,
        size_bits,
    } = ex.exec(b)?;
    let classical_bits = ex.interconnect.events()[first_event..]
        .iter()
        .map(|e| e.bits)
        .sum();
    let start = trace.clock_ns;
    trace.clock_ns += total;
    trace.bundles.push(BundleRecord {
        index: trace.bundles.len(),
        slice,
        kind: b.kind,
        start_ns: start,
        end_ns: trace.clock_ns,
        breakdown,
        overlap,
        instructions: b.len(),
        size_bits,
        classical_bits,
    });
    Ok(())
}
