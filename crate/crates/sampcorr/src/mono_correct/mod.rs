//! Correctors that turn a distribution close to non-increasing into a
//! non-increasing one.
//!
//! * [`learned`]: learn the flattened histogram, then project it.
//! * [`oblivious`]: mix the input with a fixed decreasing staircase; needs at
//!   most one draw per output.
//! * [`waterfill`]: cdf queries on superbuckets, with boundary violations
//!   repaired lazily at sampling time.

pub mod learned;
pub mod oblivious;
pub mod waterfill;

pub use learned::{learned_corrector_build, LearnedCorrector};
pub use oblivious::{oblivious_correct, oblivious_promise, ObliviousCorrector, ObliviousPlan};
pub use waterfill::{water_boundary_correction, BoundaryRecord, Staircase, WaterfillState};
