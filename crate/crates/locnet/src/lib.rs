//! UE-assisted networked localization toolkit.
//!
//! One BS and several UEs with GPS-reported positions cooperatively
//! localize passive targets from OFDM echoes. The pipeline runs in two
//! phases: Phase I synthesizes frequency-domain received vectors, recovers
//! sparse delay-tap channels, corrects each UE's sampling timing offset via
//! its line-of-sight tap, and converts tap supports into range sets;
//! Phase II jointly associates ranges with targets, removes UEs whose
//! reported positions are grossly wrong, and multilaterates each target.
//! An active mode adds uplink self-sensing ranges that prune inconsistent
//! UEs and association candidates before the search.
//!
//! The [`harness`] module wraps it all in a deterministic, seedable Monte
//! Carlo runner with the benchmark schemes used for comparison.

pub mod assoc;
pub mod harness;
pub mod locate;
pub mod oracle;
pub mod ranging;
pub mod scene;
pub mod sparse;
pub mod waveform;

pub(crate) mod util;

pub use scene::{Point2, Scenario, ScenarioConfig};
