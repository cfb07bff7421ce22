//! Clustered asymmetric TSP toolkit: instance model, zone preparation,
//! history mining, visual metrics, a two-stage GRASP, heuristic box
//! splitting for the travel time / history trade-off, and route scoring.

pub mod amazon;
pub mod context;
pub mod error;
pub mod field;
pub mod geo;
pub mod instance;
pub mod objective;
pub mod pareto;
pub mod scoring;
pub mod solver;
pub mod synth;
pub mod visual;
pub mod zones;

pub use context::RouteContext;
pub use error::{Error, Result};
pub use field::{build_field, VectorField};
pub use instance::{validate_solution, HistoricalRoute, Instance, RouteSolution, Stop, TravelTimes};
pub use objective::{Components, Weights};
pub use pareto::{pareto_solve, HbsConfig, ParetoArchive};
pub use scoring::{score, ScoreReport};
pub use solver::{roh, solve, Mode, SearchConfig};
pub use synth::{generate_synthetic, DriverPolicy, SyntheticCase};
