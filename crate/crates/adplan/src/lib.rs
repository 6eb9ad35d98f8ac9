//! File formats, random graphs and experiment runs on top of `adplan-core`.

pub mod error;
pub mod generate;
pub mod graph_io;
pub mod output;
pub mod run;
pub mod scenario;

pub use error::{HarnessError, Result};
pub use generate::{generate_graph, Generated, RandomGraphSpec};
pub use run::{run_scenario, Report, RunOptions, Strategy};
pub use scenario::{Loaded, Scenario};
