//! Macrorealism and continuity checks.

mod channel;
mod continuity;
mod mr;
mod multiplicativity;

pub use channel::{Channel, ClosedChannel, MasterChannel, ToyChannel};
pub use continuity::{
    continuity_witness, ContinuityReport, SlotRoles, SlotTimeSeries, DEFAULT_DELTA_TRANSFER, DEFAULT_EPS_MID,
    MAX_RESOLUTION,
};
pub use mr::{default_pair_times, mr_condition_check, ordered_pairs, MRReport, PairResult, Verdict, DEFAULT_MR_EPSILON};
pub use multiplicativity::{multiplicativity_scan, two_state_mr_check, ScanResult};
