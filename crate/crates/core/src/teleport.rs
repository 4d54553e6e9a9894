//! Teleport planning under LTM-port limits, multi-hop expansion and EPR timing.

use std::collections::BTreeSet;

use crate::circuit::Slice;
use crate::config::{ArchitectureConfig, PhysicalParams, SystemGeometry, TeleportationType};
use crate::error::Result;
use crate::placement::{select_gate_destination, Placement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TeleportOp {
    pub qubit: usize,
    pub src_core: usize,
    pub dst_core: usize,
}

/// Teleports executed concurrently by one remote bundle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TeleportRound {
    pub ops: Vec<TeleportOp>,
}

impl TeleportRound {
    /// Ports in use at `core`: one per op it sends and one per op it receives.
    pub fn port_uses(&self, core: usize) -> usize {
        self.ops
            .iter()
            .map(|op| usize::from(op.src_core == core) + usize::from(op.dst_core == core))
            .sum()
    }

    pub fn epr_plan(&self) -> EprPlan {
        let involved_cores = self
            .ops
            .iter()
            .flat_map(|op| [op.src_core, op.dst_core])
            .collect();
        EprPlan {
            num_pairs: self.ops.len(),
            involved_cores,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EprPlan {
    pub num_pairs: usize,
    pub involved_cores: BTreeSet<usize>,
}

/// Teleports needed before `slice` can run, packed into rounds.
///
/// Gates are visited in order; each gate spanning cores moves its off-core
/// operands to the core picked by the destination policy, seeing the
/// placement left by earlier gates of the slice. Ops go into the earliest
/// round with a free LTM port at both ends; hops of a split chain land in
/// strictly increasing rounds.
pub fn plan_teleports(
    slice: &Slice,
    placement: &Placement,
    arch: &ArchitectureConfig,
) -> Result<Vec<TeleportRound>> {
    let geometry = SystemGeometry::new(arch);
    let mut work = placement.clone();
    let mut chains: Vec<Vec<TeleportOp>> = Vec::new();

    for gate in slice.gates() {
        let dst = select_gate_destination(gate, &work, arch.dst_selection_mode)?;
        for &q in gate.qubits() {
            let src = work.core_of(q).expect("checked by destination selection");
            if src == dst {
                continue;
            }
            let op = TeleportOp {
                qubit: q,
                src_core: src,
                dst_core: dst,
            };
            let chain = match arch.teleportation_type {
                TeleportationType::AllToAll => vec![op],
                TeleportationType::Split => expand_multihop(op, &geometry),
            };
            for hop in &chain {
                work.apply_teleport(q, hop.dst_core)?;
            }
            chains.push(chain);
        }
    }

    Ok(pack_rounds(&chains, arch.num_cores(), arch.ltm_ports))
}

/// A hop never lands in a round before any earlier-planned departure from
/// its destination core, so per-round occupancy stays within what the
/// sequential plan already proved feasible.
fn pack_rounds(chains: &[Vec<TeleportOp>], num_cores: usize, ltm_ports: usize) -> Vec<TeleportRound> {
    let mut rounds: Vec<TeleportRound> = Vec::new();
    let mut usage: Vec<Vec<usize>> = Vec::new();
    let mut last_departure = vec![0usize; num_cores];
    for chain in chains {
        let mut earliest = 0;
        for &op in chain {
            let from = earliest.max(last_departure[op.dst_core]);
            let r = (from..rounds.len())
                .find(|&r| usage[r][op.src_core] < ltm_ports && usage[r][op.dst_core] < ltm_ports)
                .unwrap_or_else(|| {
                    rounds.push(TeleportRound::default());
                    usage.push(vec![0; num_cores]);
                    rounds.len() - 1
                });
            rounds[r].ops.push(op);
            usage[r][op.src_core] += 1;
            usage[r][op.dst_core] += 1;
            last_departure[op.src_core] = last_departure[op.src_core].max(r);
            earliest = r + 1;
        }
    }
    rounds
}

/// Splits a teleport into adjacent-core hops along the XY route.
pub fn expand_multihop(op: TeleportOp, geometry: &SystemGeometry) -> Vec<TeleportOp> {
    let (mut x, mut y) = geometry.coords(op.src_core);
    let (tx, ty) = geometry.coords(op.dst_core);
    let mut hops = Vec::new();
    let mut here = op.src_core;
    while (x, y) != (tx, ty) {
        if x != tx {
            x = if tx > x { x + 1 } else { x - 1 };
        } else {
            y = if ty > y { y + 1 } else { y - 1 };
        }
        let next = geometry.core_at(x, y);
        hops.push(TeleportOp {
            qubit: op.qubit,
            src_core: here,
            dst_core: next,
        });
        here = next;
    }
    hops
}

/// Time to generate `num_pairs` EPR pairs.
pub fn epr_gen_time(num_pairs: usize, params: &PhysicalParams) -> f64 {
    match num_pairs {
        0 => 0.0,
        _ if params.epr_parallel => params.epr_delay,
        n => n as f64 * params.epr_delay,
    }
}

/// Distribution time: the slowest delivery, a single constant here.
pub fn epr_dist_time(round: &TeleportRound, params: &PhysicalParams) -> f64 {
    if round.is_empty() {
        0.0
    } else {
        params.dist_delay
    }
}
