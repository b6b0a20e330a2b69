//! Joint goodput and per-frame energy model for a single-stream IEEE 802.11a
//! link.
//!
//! The crate evaluates, for every (MCS, transmission power) pair, the expected
//! effective goodput of the DCF retry process, the expected energy spent per
//! frame and the resulting energy efficiency in bits per Joule. On top of the
//! model, [`explorer`] sweeps the parameter space to compare goodput-optimal
//! operation with energy efficiency, and [`oracle`] re-derives the same
//! expectations by Monte-Carlo simulation.

pub mod dcf;
pub mod energy;
pub mod error;
pub mod explorer;
mod kv;
pub mod oracle;
pub mod phy;
pub mod profiles;
pub mod scenario;

pub use dcf::{AttemptPlan, DcfParams, ResolvedPlan};
pub use energy::{DeviceProfile, EnergyParameter};
pub use error::{Error, Result};
pub use explorer::SweepGrid;
pub use phy::{ChannelModel, CodeRate, Mode, Modulation, TxPower};
pub use scenario::LinkScenario;
