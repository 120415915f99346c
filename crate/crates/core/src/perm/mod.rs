//! Permutations and permutation groups: stabilizer chains, exact orders,
//! membership, normal closures and derived subgroups.

mod group;
mod permutation;
mod schreier;
mod tree_chain;

pub use group::{bsgs_from_generators, is_gamma_element, order_mod_subgroup, PermGroup};
pub use permutation::{element_order, Permutation};
pub use schreier::StabChain;
pub use tree_chain::TreeChain;

pub(crate) use permutation::factorize;
