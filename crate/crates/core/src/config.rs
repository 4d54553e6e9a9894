//! Architecture and physical-parameter files.
//!
//! Both files are `key = value` lines with `#` comments. Durations are in
//! nanoseconds and rates in bits per second throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeleportationType {
    AllToAll,
    Split,
}

impl FromStr for TeleportationType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_to_all" | "all-to-all" => Ok(TeleportationType::AllToAll),
            "split" | "multi_hop" => Ok(TeleportationType::Split),
            _ => Err(Error::Config(format!("unknown teleportation_type `{s}`"))),
        }
    }
}

impl fmt::Display for TeleportationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TeleportationType::AllToAll => "all_to_all",
            TeleportationType::Split => "split",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DstSelectionMode {
    LoadAware,
    LoadIndependent,
}

impl FromStr for DstSelectionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "load_aware" | "load-aware" => Ok(DstSelectionMode::LoadAware),
            "load_independent" | "load-independent" => Ok(DstSelectionMode::LoadIndependent),
            _ => Err(Error::Config(format!("unknown dst_selection_mode `{s}`"))),
        }
    }
}

impl fmt::Display for DstSelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DstSelectionMode::LoadAware => "load_aware",
            DstSelectionMode::LoadIndependent => "load_independent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureConfig {
    pub mesh_x: usize,
    pub mesh_y: usize,
    /// NoC link width in bits; also the flit size.
    pub link_width: usize,
    pub qubits_per_core: usize,
    pub ltm_ports: usize,
    pub wireless_enabled: bool,
    pub radio_channels: usize,
    pub teleportation_type: TeleportationType,
    pub dst_selection_mode: DstSelectionMode,
}

const ARCH_MANDATORY: [&str; 6] = [
    "mesh_x",
    "mesh_y",
    "link_width",
    "qubits_per_core",
    "ltm_ports",
    "wireless_enabled",
];

impl Default for ArchitectureConfig {
    fn default() -> Self {
        ArchitectureConfig {
            mesh_x: 1,
            mesh_y: 1,
            link_width: 8,
            qubits_per_core: 1,
            ltm_ports: 1,
            wireless_enabled: false,
            radio_channels: 1,
            teleportation_type: TeleportationType::AllToAll,
            dst_selection_mode: DstSelectionMode::LoadAware,
        }
    }
}

impl ArchitectureConfig {
    pub fn num_cores(&self) -> usize {
        self.mesh_x * self.mesh_y
    }

    pub fn total_qubits(&self) -> usize {
        self.num_cores() * self.qubits_per_core
    }

    pub fn is_key(key: &str) -> bool {
        matches!(
            key,
            "mesh_x"
                | "mesh_y"
                | "link_width"
                | "qubits_per_core"
                | "ltm_ports"
                | "wireless_enabled"
                | "radio_channels"
                | "teleportation_type"
                | "dst_selection_mode"
        )
    }

    /// Assigns one field from its textual value. Does not re-validate.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mesh_x" => self.mesh_x = parse_count(key, value)?,
            "mesh_y" => self.mesh_y = parse_count(key, value)?,
            "link_width" => self.link_width = parse_count(key, value)?,
            "qubits_per_core" => self.qubits_per_core = parse_count(key, value)?,
            "ltm_ports" => self.ltm_ports = parse_count(key, value)?,
            "wireless_enabled" => self.wireless_enabled = parse_bool(key, value)?,
            "radio_channels" => self.radio_channels = parse_count(key, value)?,
            "teleportation_type" => self.teleportation_type = value.parse()?,
            "dst_selection_mode" => self.dst_selection_mode = value.parse()?,
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mesh_x", self.mesh_x),
            ("mesh_y", self.mesh_y),
            ("link_width", self.link_width),
            ("qubits_per_core", self.qubits_per_core),
            ("ltm_ports", self.ltm_ports),
        ];
        for (k, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{k} must be at least 1")));
            }
        }
        if self.wireless_enabled && self.radio_channels == 0 {
            return Err(Error::Config(
                "radio_channels must be at least 1 when wireless_enabled".into(),
            ));
        }
        Ok(())
    }
}

pub fn parse_architecture(text: &str) -> Result<ArchitectureConfig> {
    let mut cfg = ArchitectureConfig::default();
    let mut seen = Vec::new();
    for (key, value) in key_values(text)? {
        cfg.set(&key, &value)?;
        seen.push(key);
    }
    for k in ARCH_MANDATORY {
        if !seen.iter().any(|s| s == k) {
            return Err(Error::MissingKey(k.to_string()));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub gate_delays: BTreeMap<String, f64>,
    pub epr_delay: f64,
    pub dist_delay: f64,
    pub pre_delay: f64,
    pub post_delay: f64,
    /// NoC cycle time; one router plus link traversal.
    pub noc_clock_time: f64,
    pub wbit_rate: f64,
    pub token_pass_time: f64,
    pub memory_bandwidth: f64,
    /// Opcode field width, `ceil(lg2 G)` for `G` gate types.
    pub bits_instruction: u32,
    pub decode_d1: f64,
    pub decode_d2: f64,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub epr_parallel: bool,
    /// Largest number of instructions a bundle may carry (`NI`).
    pub max_bundle_instructions: usize,
}

impl Default for PhysicalParams {
    /// Present-day technology values; `noc_clock_time` defaults to 1 GHz.
    fn default() -> Self {
        PhysicalParams {
            gate_delays: BTreeMap::new(),
            epr_delay: 1000.0,
            dist_delay: 0.01,
            pre_delay: 390.0,
            post_delay: 30.0,
            noc_clock_time: 1.0,
            wbit_rate: 12e9,
            token_pass_time: 1.0,
            memory_bandwidth: 128e9,
            bits_instruction: 4,
            decode_d1: 0.0,
            decode_d2: 10.0,
            t1: None,
            t2: None,
            epr_parallel: true,
            max_bundle_instructions: 16,
        }
    }
}

impl PhysicalParams {
    pub fn is_key(key: &str) -> bool {
        matches!(
            key,
            "gate_delays"
                | "epr_delay"
                | "dist_delay"
                | "pre_delay"
                | "post_delay"
                | "noc_clock_time"
                | "noc_frequency"
                | "wbit_rate"
                | "token_pass_time"
                | "memory_bandwidth"
                | "bits_instruction"
                | "decode_d1"
                | "decode_d2"
                | "t1"
                | "t2"
                | "epr_parallel"
                | "max_bundle_instructions"
        )
    }

    /// Assigns one field from its textual value. `noc_frequency` (Hz) is
    /// accepted as an alias that sets `noc_clock_time`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "gate_delays" => self.gate_delays = parse_gate_delays(value)?,
            "epr_delay" => self.epr_delay = parse_f64(key, value)?,
            "dist_delay" => self.dist_delay = parse_f64(key, value)?,
            "pre_delay" => self.pre_delay = parse_f64(key, value)?,
            "post_delay" => self.post_delay = parse_f64(key, value)?,
            "noc_clock_time" => self.noc_clock_time = parse_f64(key, value)?,
            "noc_frequency" => {
                let hz = parse_f64(key, value)?;
                if hz <= 0.0 {
                    return Err(Error::Config("noc_frequency must be positive".into()));
                }
                self.noc_clock_time = 1e9 / hz;
            }
            "wbit_rate" => self.wbit_rate = parse_f64(key, value)?,
            "token_pass_time" => self.token_pass_time = parse_f64(key, value)?,
            "memory_bandwidth" => self.memory_bandwidth = parse_f64(key, value)?,
            "bits_instruction" => self.bits_instruction = parse_count(key, value)? as u32,
            "decode_d1" => self.decode_d1 = parse_f64(key, value)?,
            "decode_d2" => self.decode_d2 = parse_f64(key, value)?,
            "t1" => self.t1 = Some(parse_f64(key, value)?),
            "t2" => self.t2 = Some(parse_f64(key, value)?),
            "epr_parallel" => self.epr_parallel = parse_bool(key, value)?,
            "max_bundle_instructions" => self.max_bundle_instructions = parse_count(key, value)?,
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("epr_delay", self.epr_delay),
            ("dist_delay", self.dist_delay),
            ("pre_delay", self.pre_delay),
            ("post_delay", self.post_delay),
            ("token_pass_time", self.token_pass_time),
            ("decode_d1", self.decode_d1),
            ("decode_d2", self.decode_d2),
        ];
        for (k, v) in durations {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{k} must be a non-negative duration")));
            }
        }
        for (k, v) in &self.gate_delays {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::Config(format!("gate delay `{k}` must be non-negative")));
            }
        }
        let rates = [
            ("noc_clock_time", self.noc_clock_time),
            ("wbit_rate", self.wbit_rate),
            ("memory_bandwidth", self.memory_bandwidth),
        ];
        for (k, v) in rates {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        for (k, v) in [("t1", self.t1), ("t2", self.t2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Config(format!("{k} must be positive")));
                }
            }
        }
        if self.bits_instruction == 0 {
            return Err(Error::Config("bits_instruction must be at least 1".into()));
        }
        if self.max_bundle_instructions == 0 {
            return Err(Error::Config("max_bundle_instructions must be at least 1".into()));
        }
        Ok(())
    }

    /// Coherence parameters, when both are configured.
    pub fn coherence_times(&self) -> Option<(f64, f64)> {
        self.t1.zip(self.t2)
    }
}

pub fn parse_parameters(text: &str) -> Result<PhysicalParams> {
    let mut p = PhysicalParams::default();
    for (key, value) in key_values(text)? {
        p.set(&key, &value)?;
    }
    p.validate()?;
    Ok(p)
}

/// Applies a `key=value` override to whichever record owns the key.
pub fn apply_override(
    arch: &mut ArchitectureConfig,
    params: &mut PhysicalParams,
    key: &str,
    value: &str,
) -> Result<()> {
    if ArchitectureConfig::is_key(key) {
        arch.set(key, value)?;
        arch.validate()
    } else if PhysicalParams::is_key(key) {
        params.set(key, value)?;
        params.validate()
    } else {
        Err(Error::UnknownKey(key.to_string()))
    }
}

fn key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", i + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .or_else(|_| {
            // allow "1e3"-style integers
            v.parse::<f64>()
                .ok()
                .filter(|f| f.fract() == 0.0 && *f >= 0.0 && *f < 1e15)
                .map(|f| f as usize)
                .ok_or(())
        })
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got `{v}`")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got `{v}`"))),
    }
}

fn parse_gate_delays(v: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, delay) = item
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("gate_delays: expected `name:delay`, got `{item}`")))?;
        out.insert(name.trim().to_string(), parse_f64("gate_delays", delay.trim())?);
    }
    Ok(out)
}

/// Node index of a core or the dispatcher on the interconnect.
pub type NodeId = usize;

/// Mesh layout derived from an [`ArchitectureConfig`].
///
/// Cores are numbered row-major: core `i` sits at `(i % mesh_x, i / mesh_x)`.
/// The dispatcher is node `M` and shares the router at `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemGeometry {
    mesh_x: usize,
    mesh_y: usize,
}

impl SystemGeometry {
    pub fn new(arch: &ArchitectureConfig) -> Self {
        SystemGeometry {
            mesh_x: arch.mesh_x,
            mesh_y: arch.mesh_y,
        }
    }

    pub fn num_cores(&self) -> usize {
        self.mesh_x * self.mesh_y
    }

    /// Cores plus the dispatcher.
    pub fn num_nodes(&self) -> usize {
        self.num_cores() + 1
    }

    pub fn dispatcher(&self) -> NodeId {
        self.num_cores()
    }

    pub fn coords(&self, node: NodeId) -> (usize, usize) {
        if node == self.dispatcher() {
            (0, 0)
        } else {
            (node % self.mesh_x, node / self.mesh_x)
        }
    }

    pub fn core_at(&self, x: usize, y: usize) -> NodeId {
        y * self.mesh_x + x
    }

    pub fn mesh(&self) -> (usize, usize) {
        (self.mesh_x, self.mesh_y)
    }
}
