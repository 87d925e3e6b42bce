//! Test-only support shared across the workspace: a deterministic fixture
//! corpus with hand-audited expected values, independent oracle
//! implementations of every analysis, random corpus generation, and
//! proptest strategies for relations, predicates, and pipeline programs.
//!
//! Nothing in here is reachable from production code paths; the crates under
//! test list this one in `dev-dependencies` only.

pub mod corpus;
pub mod fixture;
pub mod oracle;
pub mod strategy;
