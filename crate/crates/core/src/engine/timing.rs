//! Per-bundle execution time.

use serde::{Deserialize, Serialize};

use super::bundle::{bundle_size_bits, ceil_log2, dispatch_volumes, Bundle, BundleKind, InstructionKind};
use crate::circuit::default_delay_key;
use crate::config::{ArchitectureConfig, PhysicalParams};
use crate::error::{Error, Result};
use crate::interconnect::Interconnect;
use crate::teleport::{epr_dist_time, epr_gen_time, TeleportOp, TeleportRound};

/// Time spent in each phase, in ns.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeBreakdown {
    pub fetch: f64,
    pub decode: f64,
    pub dispatch: f64,
    pub epr_gen: f64,
    pub epr_dist: f64,
    pub pre_proc: f64,
    pub classical_transfer: f64,
    pub post_proc: f64,
    pub gate_exec: f64,
    pub ack: f64,
}

impl TimeBreakdown {
    /// Sum of all phases, ignoring overlap.
    pub fn sum(&self) -> f64 {
        self.fetch
            + self.decode
            + self.dispatch
            + self.epr_gen
            + self.epr_dist
            + self.pre_proc
            + self.classical_transfer
            + self.post_proc
            + self.gate_exec
            + self.ack
    }

    pub fn accumulate(&mut self, o: &TimeBreakdown) {
        self.fetch += o.fetch;
        self.decode += o.decode;
        self.dispatch += o.dispatch;
        self.epr_gen += o.epr_gen;
        self.epr_dist += o.epr_dist;
        self.pre_proc += o.pre_proc;
        self.classical_transfer += o.classical_transfer;
        self.post_proc += o.post_proc;
        self.gate_exec += o.gate_exec;
        self.ack += o.ack;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BundleTiming {
    pub breakdown: TimeBreakdown,
    /// Dispatch hidden behind EPR preparation (remote bundles only).
    pub overlap: f64,
    pub total: f64,
    pub size_bits: u64,
}

/// Delay of a gate, falling back to `default_{k}q` for unknown names.
pub fn gate_delay(name: Option<&str>, arity: usize, params: &PhysicalParams) -> Result<f64> {
    let fallback = default_delay_key(arity);
    if let Some(d) = name.and_then(|n| params.gate_delays.get(n)) {
        return Ok(*d);
    }
    params
        .gate_delays
        .get(&fallback)
        .copied()
        .ok_or_else(|| Error::UnknownGate {
            name: name.map_or_else(|| fallback.clone(), str::to_string),
            fallback,
        })
}

pub fn fetch_time(size_bits: u64, params: &PhysicalParams) -> f64 {
    size_bits as f64 / params.memory_bandwidth * 1e9
}

pub fn decode_time(num_instructions: usize, params: &PhysicalParams) -> f64 {
    params.decode_d1 + params.decode_d2 * num_instructions as f64
}

/// Holds what a bundle needs to be timed: the system description and the
/// interconnect, whose state (token positions, event log) carries over.
pub struct Executor<'a> {
    pub arch: &'a ArchitectureConfig,
    pub params: &'a PhysicalParams,
    pub interconnect: Interconnect,
}

impl<'a> Executor<'a> {
    pub fn new(arch: &'a ArchitectureConfig, params: &'a PhysicalParams) -> Self {
        Executor {
            arch,
            params,
            interconnect: Interconnect::new(arch, params),
        }
    }

    fn dispatch(&mut self, b: &Bundle) -> f64 {
        let from = self.interconnect.dispatcher();
        dispatch_volumes(b, self.arch, self.params)
            .into_iter()
            .map(|(core, bits)| self.interconnect.cct(from, core, bits))
            .sum()
    }

    fn ack(&mut self, b: &Bundle) -> f64 {
        let to = self.interconnect.dispatcher();
        let bits = ceil_log2(self.arch.num_cores()) as u64 + 1;
        b.cores()
            .into_iter()
            .map(|core| self.interconnect.cct(core, to, bits))
            .sum()
    }

    pub fn exec(&mut self, b: &Bundle) -> Result<BundleTiming> {
        match b.kind {
            BundleKind::Local => self.exec_local(b),
            BundleKind::Remote => self.exec_remote(b),
        }
    }

    pub fn exec_local(&mut self, b: &Bundle) -> Result<BundleTiming> {
        let size_bits = bundle_size_bits(b, self.arch, self.params)?;
        let mut gate_exec = 0.0f64;
        for i in &b.instructions {
            if let InstructionKind::Gate { name, operands } = &i.kind {
                gate_exec = gate_exec.max(gate_delay(name.as_deref(), operands.len(), self.params)?);
            }
        }
        let mut t = TimeBreakdown {
            fetch: fetch_time(size_bits, self.params),
            decode: decode_time(b.len(), self.params),
            gate_exec,
            ..Default::default()
        };
        t.dispatch = self.dispatch(b);
        t.ack = self.ack(b);
        let total = t.fetch + t.decode + t.dispatch + t.gate_exec + t.ack;
        Ok(BundleTiming {
            breakdown: t,
            overlap: 0.0,
            total,
            size_bits,
        })
    }

    pub fn exec_remote(&mut self, b: &Bundle) -> Result<BundleTiming> {
        let size_bits = bundle_size_bits(b, self.arch, self.params)?;
        let pairs = b.teleport_pairs(self.arch);
        let round = TeleportRound {
            ops: pairs
                .iter()
                .map(|&(src_core, dst_core)| TeleportOp {
                    qubit: 0,
                    src_core,
                    dst_core,
                })
                .collect(),
        };
        let mut t = TimeBreakdown {
            fetch: fetch_time(size_bits, self.params),
            decode: decode_time(b.len(), self.params),
            epr_gen: epr_gen_time(pairs.len(), self.params),
            epr_dist: epr_dist_time(&round, self.params),
            ..Default::default()
        };
        t.dispatch = self.dispatch(b);
        if !pairs.is_empty() {
            t.pre_proc = self.params.pre_delay;
            t.post_proc = self.params.post_delay;
        }
        let bits = 2 + ceil_log2(self.arch.total_qubits()) as u64;
        t.classical_transfer = pairs
            .iter()
            .map(|&(s, d)| self.interconnect.cct(s, d, bits))
            .sum();
        t.ack = self.ack(b);
        let epr = t.epr_gen + t.epr_dist;
        let overlap = t.dispatch.min(epr);
        let total = t.fetch
            + t.decode
            + t.dispatch.max(epr)
            + t.pre_proc
            + t.classical_transfer
            + t.post_proc
            + t.ack;
        Ok(BundleTiming {
            breakdown: t,
            overlap,
            total,
            size_bits,
        })
    }
}
