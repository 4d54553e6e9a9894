//! Classical communication cost models.
//!
//! `CCT(src, dst, bits)` for a wired mesh NoC (wormhole: one cycle per hop
//! plus one cycle per flit) and for a token-passing wireless NoC.

use serde::{Deserialize, Serialize};

use crate::config::{ArchitectureConfig, NodeId, PhysicalParams, SystemGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommEvent {
    pub src: NodeId,
    pub dst: NodeId,
    pub bits: u64,
    pub elapsed: f64,
}

/// Manhattan distance between two nodes under XY routing.
pub fn hops(geometry: &SystemGeometry, src: NodeId, dst: NodeId) -> usize {
    let (x1, y1) = geometry.coords(src);
    let (x2, y2) = geometry.coords(dst);
    x1.abs_diff(x2) + y1.abs_diff(y2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NocModel {
    pub clock_time: f64,
    pub link_width: usize,
    pub geometry: SystemGeometry,
}

impl NocModel {
    pub fn new(arch: &ArchitectureConfig, params: &PhysicalParams) -> Self {
        NocModel {
            clock_time: params.noc_clock_time,
            link_width: arch.link_width,
            geometry: SystemGeometry::new(arch),
        }
    }

    pub fn flits(&self, bits: u64) -> u64 {
        bits.div_ceil(self.link_width as u64)
    }

    pub fn cct(&self, src: NodeId, dst: NodeId, bits: u64) -> CommEvent {
        let cycles = hops(&self.geometry, src, dst) as u64 + self.flits(bits);
        CommEvent {
            src,
            dst,
            bits,
            elapsed: self.clock_time * cycles as f64,
        }
    }
}

/// Token-ring MAC over one or more radio channels.
///
/// Nodes are ordered by index with the dispatcher last. A sender waits for
/// the token of the channel that reaches it soonest (lowest channel index on
/// ties); the token then stays with the sender.
#[derive(Debug, Clone, PartialEq)]
pub struct WinocModel {
    pub wbit_rate: f64,
    pub token_pass_time: f64,
    pub num_nodes: usize,
    token_position: Vec<NodeId>,
}

impl WinocModel {
    pub fn new(arch: &ArchitectureConfig, params: &PhysicalParams) -> Self {
        let num_nodes = arch.num_cores() + 1;
        let channels = arch.radio_channels.max(1);
        WinocModel::with_tokens(
            params.wbit_rate,
            params.token_pass_time,
            num_nodes,
            (0..channels).map(|c| c * num_nodes / channels).collect(),
        )
    }

    pub fn with_tokens(
        wbit_rate: f64,
        token_pass_time: f64,
        num_nodes: usize,
        token_position: Vec<NodeId>,
    ) -> Self {
        assert!(!token_position.is_empty(), "at least one radio channel");
        assert!(token_position.iter().all(|&t| t < num_nodes));
        WinocModel {
            wbit_rate,
            token_pass_time,
            num_nodes,
            token_position,
        }
    }

    pub fn token_positions(&self) -> &[NodeId] {
        &self.token_position
    }

    fn ring_distance(&self, from: NodeId, to: NodeId) -> usize {
        (to + self.num_nodes - from) % self.num_nodes
    }

    pub fn cct(&mut self, src: NodeId, dst: NodeId, bits: u64) -> CommEvent {
        let (channel, distance) = self
            .token_position
            .iter()
            .enumerate()
            .map(|(ch, &pos)| (ch, self.ring_distance(pos, src)))
            .min_by_key(|&(ch, d)| (d, ch))
            .expect("at least one channel");
        self.token_position[channel] = src;
        let wait = self.token_pass_time * distance as f64;
        let transmit = bits as f64 / self.wbit_rate * 1e9;
        CommEvent {
            src,
            dst,
            bits,
            elapsed: wait + transmit,
        }
    }
}

/// The system's classical interconnect, recording every transfer.
#[derive(Debug, Clone)]
pub struct Interconnect {
    medium: Medium,
    geometry: SystemGeometry,
    events: Vec<CommEvent>,
}

#[derive(Debug, Clone)]
enum Medium {
    Wired(NocModel),
    Wireless(WinocModel),
}

impl Interconnect {
    pub fn new(arch: &ArchitectureConfig, params: &PhysicalParams) -> Self {
        let medium = if arch.wireless_enabled {
            Medium::Wireless(WinocModel::new(arch, params))
        } else {
            Medium::Wired(NocModel::new(arch, params))
        };
        Interconnect {
            medium,
            geometry: SystemGeometry::new(arch),
            events: Vec::new(),
        }
    }

    pub fn geometry(&self) -> &SystemGeometry {
        &self.geometry
    }

    pub fn dispatcher(&self) -> NodeId {
        self.geometry.dispatcher()
    }

    pub fn is_wireless(&self) -> bool {
        matches!(self.medium, Medium::Wireless(_))
    }

    /// Time in ns to move `bits` from `src` to `dst`; logs one event.
    pub fn cct(&mut self, src: NodeId, dst: NodeId, bits: u64) -> f64 {
        let ev = match &mut self.medium {
            Medium::Wired(noc) => noc.cct(src, dst, bits),
            Medium::Wireless(w) => w.cct(src, dst, bits),
        };
        self.events.push(ev);
        ev.elapsed
    }

    pub fn events(&self) -> &[CommEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<CommEvent> {
        self.events
    }
}
