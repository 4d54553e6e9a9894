//! Execution-time simulation of modular multi-core quantum processors.
//!
//! A circuit is cut into slices of parallel gates. Before each slice, qubits
//! that must share a core are teleported over quantum links, in rounds bounded
//! by each core's link ports. Every round and every slice is issued as an
//! instruction bundle by a central dispatcher over a classical interconnect
//! (a wired mesh NoC or a token-passing wireless NoC), and the time of each
//! bundle is accumulated phase by phase.
//!
//! ```
//! use mcqsim::{parse_circuit, simulate, vanilla_map, ArchitectureConfig, PhysicalParams};
//!
//! let circuit = parse_circuit("cnot(0,1) cnot(2,3)\ncnot(1,2)").unwrap();
//! let arch = ArchitectureConfig { mesh_x: 2, mesh_y: 1, qubits_per_core: 4, ..Default::default() };
//! let mut params = PhysicalParams::default();
//! params.gate_delays.insert("default_2q".into(), 100.0);
//! let placement = vanilla_map(circuit.num_qubits(), &arch).unwrap();
//! let trace = simulate(&circuit, &arch, &params, placement).unwrap();
//! assert!(trace.clock_ns > 0.0);
//! ```

pub mod circuit;
pub mod config;
pub mod engine;
pub mod error;
pub mod interconnect;
pub mod placement;
pub mod report;
pub mod sweep;
pub mod teleport;

pub use circuit::{parse_circuit, random_circuit, ArityDistribution, Circuit, Gate, Slice};
pub use config::{
    apply_override, parse_architecture, parse_parameters, ArchitectureConfig, DstSelectionMode,
    PhysicalParams, SystemGeometry, TeleportationType,
};
pub use engine::{simulate, ExecutionTrace, TimeBreakdown};
pub use error::{Error, ErrorCategory, Result};
pub use placement::{load_mapping, vanilla_map, Placement};
pub use report::{coherence, emit, summarize, ExecutionReport, Format};
pub use sweep::{Execution, Sweep};
