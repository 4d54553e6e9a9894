//! Run statistics and their text, JSON and CSV renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{ArchitectureConfig, PhysicalParams};
use crate::engine::ExecutionTrace;

/// `C(t) = exp(-t/T1) * (exp(-t/T2)/2 + 1/2)`.
pub fn coherence(t: f64, t1: f64, t2: f64) -> f64 {
    (-t / t1).exp() * (0.5 * (-t / t2).exp() + 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitDetail {
    pub qubit: usize,
    pub ops: u64,
    pub teleports: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub executed_gates: u64,
    pub intercore_comms: u64,
    pub intercore_traffic: u64,
    pub comm_map: Vec<Vec<u64>>,
    pub bundles: usize,
    pub throughput_avg_bps: f64,
    pub throughput_peak_bps: f64,
    pub util_min: usize,
    pub util_avg: f64,
    pub util_max: usize,
    pub t_fetch_ns: f64,
    pub t_decode_ns: f64,
    pub t_dispatch_ns: f64,
    pub t_epr_gen_ns: f64,
    pub t_epr_dist_ns: f64,
    pub t_pre_ns: f64,
    pub t_classical_ns: f64,
    pub t_post_ns: f64,
    pub t_gate_ns: f64,
    pub t_ack_ns: f64,
    pub t_overlap_ns: f64,
    pub t_comm_ns: f64,
    pub t_comp_ns: f64,
    pub t_control_ns: f64,
    pub t_total_ns: f64,
    pub coherence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<QubitDetail>>,
}

impl ExecutionReport {
    /// Share of the run spent moving classical bits:
    /// `(dispatch + classical transfer + ack) / total`.
    pub fn classical_share(&self) -> f64 {
        if self.t_total_ns == 0.0 {
            return 0.0;
        }
        (self.t_dispatch_ns + self.t_classical_ns + self.t_ack_ns) / self.t_total_ns
    }

    /// Drops the per-qubit counters unless `detailed` is set.
    pub fn with_detail(mut self, detailed: bool) -> Self {
        if !detailed {
            self.qubits = None;
        }
        self
    }
}

pub fn summarize(trace: &ExecutionTrace, _arch: &ArchitectureConfig, params: &PhysicalParams) -> ExecutionReport {
    let b = trace.breakdown();
    let overlap = trace.overlap();
    let comm = b.dispatch
        + b.epr_gen
        + b.epr_dist
        + b.pre_proc
        + b.classical_transfer
        + b.post_proc
        + b.ack
        - overlap;
    let total = trace.clock_ns;
    let rate = |bits: u64, ns: f64| if ns > 0.0 { bits as f64 / (ns * 1e-9) } else { 0.0 };
    let throughput_avg = rate(trace.classical_bits(), total);
    let throughput_peak = trace
        .bundles
        .iter()
        .map(|r| rate(r.classical_bits, r.duration()))
        .fold(0.0, f64::max);
    let qubits = trace
        .qubit_ops
        .iter()
        .zip(&trace.qubit_teleports)
        .enumerate()
        .map(|(qubit, (&ops, &teleports))| QubitDetail { qubit, ops, teleports })
        .collect();
    ExecutionReport {
        executed_gates: trace.executed_gates,
        intercore_comms: trace.teleport_hops,
        intercore_traffic: trace.qubit_moves,
        comm_map: trace.comm_map.clone(),
        bundles: trace.bundles.len(),
        throughput_avg_bps: throughput_avg,
        throughput_peak_bps: throughput_peak,
        util_min: trace.utilization.min,
        util_avg: trace.utilization.avg,
        util_max: trace.utilization.max,
        t_fetch_ns: b.fetch,
        t_decode_ns: b.decode,
        t_dispatch_ns: b.dispatch,
        t_epr_gen_ns: b.epr_gen,
        t_epr_dist_ns: b.epr_dist,
        t_pre_ns: b.pre_proc,
        t_classical_ns: b.classical_transfer,
        t_post_ns: b.post_proc,
        t_gate_ns: b.gate_exec,
        t_ack_ns: b.ack,
        t_overlap_ns: overlap,
        t_comm_ns: comm,
        t_comp_ns: b.gate_exec,
        t_control_ns: b.fetch + b.decode,
        t_total_ns: total,
        coherence: params.coherence_times().map(|(t1, t2)| coherence(total, t1, t2)),
        qubits: Some(qubits),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (text, json, csv)")),
        }
    }
}

/// Column names of [`csv_row`]; `comm_map` and per-qubit detail are omitted.
pub const CSV_COLUMNS: [&str; 26] = [
    "executed_gates",
    "intercore_comms",
    "intercore_traffic",
    "bundles",
    "throughput_avg_bps",
    "throughput_peak_bps",
    "util_min",
    "util_avg",
    "util_max",
    "t_fetch_ns",
    "t_decode_ns",
    "t_dispatch_ns",
    "t_epr_gen_ns",
    "t_epr_dist_ns",
    "t_pre_ns",
    "t_classical_ns",
    "t_post_ns",
    "t_gate_ns",
    "t_ack_ns",
    "t_overlap_ns",
    "t_comm_ns",
    "t_comp_ns",
    "t_control_ns",
    "t_total_ns",
    "classical_share",
    "coherence",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

pub fn csv_row(r: &ExecutionReport) -> String {
    let fields = [
        r.executed_gates.to_string(),
        r.intercore_comms.to_string(),
        r.intercore_traffic.to_string(),
        r.bundles.to_string(),
        r.throughput_avg_bps.to_string(),
        r.throughput_peak_bps.to_string(),
        r.util_min.to_string(),
        r.util_avg.to_string(),
        r.util_max.to_string(),
        r.t_fetch_ns.to_string(),
        r.t_decode_ns.to_string(),
        r.t_dispatch_ns.to_string(),
        r.t_epr_gen_ns.to_string(),
        r.t_epr_dist_ns.to_string(),
        r.t_pre_ns.to_string(),
        r.t_classical_ns.to_string(),
        r.t_post_ns.to_string(),
        r.t_gate_ns.to_string(),
        r.t_ack_ns.to_string(),
        r.t_overlap_ns.to_string(),
        r.t_comm_ns.to_string(),
        r.t_comp_ns.to_string(),
        r.t_control_ns.to_string(),
        r.t_total_ns.to_string(),
        r.classical_share().to_string(),
        r.coherence.map(|c| c.to_string()).unwrap_or_default(),
    ];
    fields.join(",")
}

fn text(r: &ExecutionReport) -> String {
    let mut s = String::new();
    let pct = |v: f64| if r.t_total_ns > 0.0 { 100.0 * v / r.t_total_ns } else { 0.0 };
    let _ = writeln!(s, "Executed gates        {}", r.executed_gates);
    let _ = writeln!(s, "Inter-core comms      {} teleports", r.intercore_comms);
    let _ = writeln!(s, "Inter-core traffic    {} qubits", r.intercore_traffic);
    let _ = writeln!(s, "Inter-core comm-map   (row = source core)");
    for row in &r.comm_map {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>4}")).collect();
        let _ = writeln!(s, "  {}", cells.join(""));
    }
    let _ = writeln!(
        s,
        "Throughput            avg {:.6e} bit/s, peak {:.6e} bit/s",
        r.throughput_avg_bps, r.throughput_peak_bps
    );
    let _ = writeln!(
        s,
        "Core utilization      min {} avg {:.3} max {} qubits",
        r.util_min, r.util_avg, r.util_max
    );
    let _ = writeln!(s, "Communication time    {:.3} ns ({:.2}%)", r.t_comm_ns, pct(r.t_comm_ns));
    let rows = [
        ("dispatch", r.t_dispatch_ns),
        ("epr generation", r.t_epr_gen_ns),
        ("epr distribution", r.t_epr_dist_ns),
        ("pre-processing", r.t_pre_ns),
        ("classical transfer", r.t_classical_ns),
        ("post-processing", r.t_post_ns),
        ("ack", r.t_ack_ns),
        ("overlap (subtracted)", r.t_overlap_ns),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "  {k:<20} {v:.3} ns");
    }
    let _ = writeln!(s, "Computation time      {:.3} ns ({:.2}%)", r.t_comp_ns, pct(r.t_comp_ns));
    let _ = writeln!(
        s,
        "Control time          {:.3} ns ({:.2}%; fetch {:.3}, decode {:.3})",
        r.t_control_ns,
        pct(r.t_control_ns),
        r.t_fetch_ns,
        r.t_decode_ns
    );
    let _ = writeln!(s, "Execution time        {:.3} ns over {} bundles", r.t_total_ns, r.bundles);
    let _ = writeln!(s, "Classical share       {:.2}%", 100.0 * r.classical_share());
    match r.coherence {
        Some(c) => {
            let _ = writeln!(s, "Coherence             {c:.6}");
        }
        None => {
            let _ = writeln!(s, "Coherence             n/a (t1/t2 not set)");
        }
    }
    if let Some(qs) = &r.qubits {
        let _ = writeln!(s, "Per-qubit             qubit ops teleports");
        for q in qs {
            let _ = writeln!(s, "  {:>6} {:>6} {:>6}", q.qubit, q.ops, q.teleports);
        }
    }
    s
}

/// Renders a report. CSV output carries its header line.
pub fn emit(r: &ExecutionReport, format: Format) -> String {
    match format {
        Format::Text => text(r),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Csv => format!("{}\n{}\n", csv_header(), csv_row(r)),
    }
}
