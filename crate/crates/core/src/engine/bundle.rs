//! Instruction bundles and their encoded size.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::{default_delay_key, Slice};
use crate::config::{ArchitectureConfig, PhysicalParams};
use crate::error::{Error, Result};
use crate::placement::Placement;
use crate::teleport::TeleportRound;

/// `ceil(lg2 n)`, with `ceil(lg2 1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstructionKind {
    /// Gate on local (relative) qubit addresses.
    Gate {
        name: Option<String>,
        operands: Vec<usize>,
    },
    /// Teleport source half: local source address, absolute destination address.
    Tps { src: usize, dst_abs: usize },
    /// Teleport destination half on a local address.
    Tpd { dst: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub core: usize,
    pub kind: InstructionKind,
}

impl Instruction {
    pub fn num_operands(&self) -> usize {
        match &self.kind {
            InstructionKind::Gate { operands, .. } => operands.len(),
            InstructionKind::Tps { .. } => 2,
            InstructionKind::Tpd { .. } => 1,
        }
    }

    /// Encoded operand bits. TPS keeps its destination as an absolute address.
    pub fn operand_bits(&self, arch: &ArchitectureConfig) -> u64 {
        let local = ceil_log2(arch.qubits_per_core) as u64;
        match &self.kind {
            InstructionKind::Tps { .. } => local + ceil_log2(arch.total_qubits()) as u64,
            _ => self.num_operands() as u64 * local,
        }
    }

    /// Key into `gate_delays` for gate instructions.
    pub fn delay_key(&self) -> Option<String> {
        match &self.kind {
            InstructionKind::Gate { name: Some(n), .. } => Some(n.clone()),
            InstructionKind::Gate { name: None, operands } => Some(default_delay_key(operands.len())),
            _ => None,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            InstructionKind::Gate { name, operands } => {
                let ops: Vec<String> = operands.iter().map(usize::to_string).collect();
                write!(f, "{}@{}({})", name.as_deref().unwrap_or("g"), self.core, ops.join(","))
            }
            InstructionKind::Tps { src, dst_abs } => write!(f, "TPS@{}({src},{dst_abs}')", self.core),
            InstructionKind::Tpd { dst } => write!(f, "TPD@{}({dst})", self.core),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    Local,
    Remote,
}

impl fmt::Display for BundleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BundleKind::Local => "local",
            BundleKind::Remote => "remote",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub kind: BundleKind,
    pub instructions: Vec<Instruction>,
}

impl Bundle {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Distinct target cores, ascending.
    pub fn cores(&self) -> Vec<usize> {
        let mut cores: Vec<usize> = self.instructions.iter().map(|i| i.core).collect();
        cores.sort_unstable();
        cores.dedup();
        cores
    }

    /// `(src_core, dst_core)` of every teleport in the bundle, in order.
    pub fn teleport_pairs(&self, arch: &ArchitectureConfig) -> Vec<(usize, usize)> {
        self.instructions
            .iter()
            .filter_map(|i| match i.kind {
                InstructionKind::Tps { dst_abs, .. } => Some((i.core, dst_abs / arch.qubits_per_core)),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.instructions.iter().map(Instruction::to_string).collect();
        write!(f, "<{}>", parts.join(" | "))
    }
}

/// Remote bundle for one teleport round; moves the qubits in `placement`.
///
/// All departures of the round are applied before the arrivals.
pub fn build_remote_bundle(round: &TeleportRound, placement: &mut Placement) -> Result<Bundle> {
    let q = placement.capacity();
    let sources: Vec<usize> = round
        .ops
        .iter()
        .map(|op| {
            debug_assert_eq!(placement.core_of(op.qubit), Some(op.src_core));
            placement
                .slot_of(op.qubit)
                .ok_or_else(|| Error::Mapping(format!("qubit {} is not mapped", op.qubit)))
        })
        .collect::<Result<_>>()?;
    let mut staged = placement.clone();
    for op in &round.ops {
        staged.detach(op.qubit)?;
    }
    let mut instructions = Vec::with_capacity(2 * round.ops.len());
    for (op, src) in round.ops.iter().zip(sources) {
        staged.assign(op.qubit, op.dst_core).map_err(|_| {
            Error::Capacity(format!(
                "core {} has no free slot to receive qubit {}",
                op.dst_core, op.qubit
            ))
        })?;
        let dst = staged.slot_of(op.qubit).expect("just assigned");
        instructions.push(Instruction {
            core: op.src_core,
            kind: InstructionKind::Tps {
                src,
                dst_abs: op.dst_core * q + dst,
            },
        });
        instructions.push(Instruction {
            core: op.dst_core,
            kind: InstructionKind::Tpd { dst },
        });
    }
    *placement = staged;
    Ok(Bundle {
        kind: BundleKind::Remote,
        instructions,
    })
}

/// Local bundle running every gate of `slice` under `placement`.
pub fn build_local_bundle(slice: &Slice, placement: &Placement) -> Result<Bundle> {
    let mut instructions = Vec::with_capacity(slice.len());
    for gate in slice.gates() {
        let mut core = None;
        let mut operands = Vec::with_capacity(gate.arity());
        for &qb in gate.qubits() {
            let c = placement
                .core_of(qb)
                .ok_or_else(|| Error::Mapping(format!("qubit {qb} is not mapped")))?;
            if *core.get_or_insert(c) != c {
                return Err(Error::Mapping(format!(
                    "gate {gate} spans cores after teleport planning"
                )));
            }
            operands.push(placement.slot_of(qb).expect("mapped"));
        }
        instructions.push(Instruction {
            core: core.expect("gate has qubits"),
            kind: InstructionKind::Gate {
                name: gate.name().map(str::to_string),
                operands,
            },
        });
    }
    Ok(Bundle {
        kind: BundleKind::Local,
        instructions,
    })
}

/// One remote bundle per round, then the slice's local bundle.
pub fn build_bundles(
    slice: &Slice,
    rounds: &[TeleportRound],
    placement: &mut Placement,
) -> Result<Vec<Bundle>> {
    let mut out = Vec::with_capacity(rounds.len() + 1);
    for round in rounds {
        out.push(build_remote_bundle(round, placement)?);
    }
    out.push(build_local_bundle(slice, placement)?);
    Ok(out)
}

/// Encoded bundle size in bits: a length header of `ceil(lg2 NI)` bits,
/// then per instruction the core address, opcode and operand fields.
pub fn bundle_size_bits(b: &Bundle, arch: &ArchitectureConfig, params: &PhysicalParams) -> Result<u64> {
    let ni = params.max_bundle_instructions;
    if b.len() > ni {
        return Err(Error::BundleTooLong { len: b.len(), max: ni });
    }
    let core_bits = ceil_log2(arch.num_cores()) as u64;
    let opcode = params.bits_instruction as u64;
    let body: u64 = b
        .instructions
        .iter()
        .map(|i| core_bits + opcode + i.operand_bits(arch))
        .sum();
    Ok(ceil_log2(ni) as u64 + body)
}

/// Dispatcher traffic per target core, ascending by core: the core address is
/// stripped, opcode and operands are sent.
pub fn dispatch_volumes(b: &Bundle, arch: &ArchitectureConfig, params: &PhysicalParams) -> Vec<(usize, u64)> {
    let mut per_core: Vec<(usize, u64)> = Vec::new();
    for i in &b.instructions {
        let bits = params.bits_instruction as u64 + i.operand_bits(arch);
        match per_core.iter_mut().find(|(c, _)| *c == i.core) {
            Some(entry) => entry.1 += bits,
            None => per_core.push((i.core, bits)),
        }
    }
    per_core.sort_unstable_by_key(|&(c, _)| c);
    per_core
}
