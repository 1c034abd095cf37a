//! Multi-antenna placement delivery arrays (MAPDAs) for combinatorial
//! multi-access coded caching.
//!
//! A server with `L` antennas serves `K = C(nodes, r)` users, each reading
//! the caches of a distinct `r`-subset of the cache nodes. The crate builds
//! MAPDAs for this network from 0-1 knapsack solutions over column groups
//! of the user-retrieve array, verifies them, evaluates closed-form and
//! baseline metrics, and simulates one-shot zero-forcing delivery.
//!
//! ```
//! use mapda::{construct_knapsack, metrics, verify, Solver, SystemParams};
//!
//! let p = SystemParams::new(5, 3, 1, 2, 1).unwrap();
//! let c = construct_knapsack(&p, Solver::Dp).unwrap();
//! assert!(verify(&c.mapda).valid);
//! let m = metrics(&c.mapda).unwrap();
//! assert_eq!(m.tuple(), Some((10, 15, 9, 10)));
//! ```

pub mod assembly;
pub mod baselines;
pub mod combinatorics;
pub mod delivery;
pub mod error;
pub mod exec;
pub mod knapsack;
pub mod mapda;
pub mod placement;

pub use assembly::{
    construct_knapsack, construct_knapsack_best_shift, construct_merged, construct_sub_network, predict_metrics, predict_knapsack, replicate,
    ClosedForm, Construction, FillVector, FilledArray, Solver,
};
pub use baselines::{baseline_metrics, comparison_table, sweep, BaselineSpec, SchemeSpec, SweepScheme, TableRow};
pub use combinatorics::Subset;
pub use delivery::{build_precoders, gen_channel, simulate, simulate_trials, Channel, DeliveryReport, TrialsReport};
pub use error::{Error, Result};
pub use knapsack::{build_instance, solve_brute, solve_dp, KnapsackInstance, KnapsackSolution};
pub use mapda::{dof_upper_bound, metrics, verify, verify_compact, Entry, Mapda, SchemeMetrics, VerificationReport};
pub use placement::SystemParams;
