//! Sweeps in ε, the counterexample regression, manufactured-solution
//! studies and the hypothesis battery.

pub mod checks;
pub mod counterexample;
pub mod manufactured;
pub mod report;
pub mod sweep;

pub use checks::{run_checks, run_checks_with, BatteryReport};
pub use counterexample::{closed_form, closed_form_sup, counterexample_instance, run_counterexample, CounterexampleReport};
pub use manufactured::{run_manufactured, run_manufactured_thin, MmsReport};
pub use report::Format;
pub use sweep::{run_sweep, solve_limit, solve_thin_at, ConvergenceReport, SweepConfig, SweepRow};
