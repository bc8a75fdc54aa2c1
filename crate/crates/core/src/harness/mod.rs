//! Integration, verification and scenario plumbing.

pub mod equivalence;
pub mod hamilton;
pub mod integrate;
pub mod measure;
pub mod monitor;
pub mod output;
pub mod sample;
pub mod scenario;
pub mod sweep;
pub mod systems;

pub use integrate::{integrate_system, IntegratorConfig, Method, MonitorKind, MonitorSpec, OdeSystem, Trajectory};
pub use monitor::{monitor_suite, CheckStatus, MonitorReport};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioRun};
pub use systems::{Model, SystemKind};
