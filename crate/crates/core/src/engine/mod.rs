//! Bundle construction, timing and the simulation loop.

pub mod bundle;
pub mod sim;
pub mod timing;

pub use bundle::{
    build_bundles, bundle_size_bits, ceil_log2, dispatch_volumes, Bundle, BundleKind, Instruction,
    InstructionKind,
};
pub use sim::{simulate, BundleRecord, ExecutionTrace, Utilization};
pub use timing::{gate_delay, BundleTiming, Executor, TimeBreakdown};
