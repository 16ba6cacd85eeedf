//! Exact basket calculus for terminal weak Q-Fano 3-folds.
//!
//! Baskets of orbifold pairs, anti-plurigenera by orbifold Riemann–Roch,
//! packings and canonical sequences, birationality criteria for the
//! anti-pluricanonical maps, classification of baskets under plurigenus
//! constraints, and verification against the bundled tables.

pub mod basket;
pub mod canonical;
pub mod classify;
pub mod criteria;
pub mod error;
pub mod filter;
pub mod fixtures;
pub mod packing;
pub mod par;
pub mod rational;
pub mod riemann_roch;

pub use basket::{pair, Basket, OrbifoldPair};
pub use classify::{
    classify, enumerate_b0, enumerate_index_profiles, B0Candidate, ClassificationConstraints,
    ClassifyOptions, IndexSlot,
};
pub use criteria::{
    birational_bound_b, birational_bound_b2, lambda_of, mu0_candidates, not_pencil_by_plurigenus,
    not_pencil_threshold, rr_lower_bound, table_pipeline, theta, theta_max, BirationalityReport,
    B2Spec, Branch, BoundCase, BranchPolicy, CriterionInputs, CriterionUsed, LambdaBound, MuCandidate,
    MuSource, N1Policy, PipelineError, SameLeaf, Split,
};
pub use error::{
    BasketError, ClassifyError, ConstraintError, DomainError, FixtureError, ParseRationalError,
    Truncated,
};
pub use canonical::{
    farey_neighbors, unpack, CanonicalSequence, FareyPosition, Infeasible, Level,
};
pub use filter::{geometric_filter, FilterCheck, FilterConfig};
pub use packing::{
    closure, dominates, is_prime_packing, pack_once, single_packings, ClosureOptions, PackingStep, PruneClause,
    DEFAULT_STATE_LIMIT,
};
pub use par::Execution;
pub use rational::{ratio, Rational};
pub use riemann_roch::{
    anti_volume, delta_n, gamma, l_term, plurigenus, plurigenus_closed, r_index, r_max, sigma,
    sigma_prime, Plurigenera, Plurigenus, WeightedBasket,
};
pub use fixtures::{
    verify_all, verify_table, Discrepancy, FixtureBody, FixtureSource, TableFixture, TableReport,
    TableStatus,
};
