//! Finitely generated abelian groups in canonical (invariant-factor) form.

mod group;
mod matrix;
mod snf;

pub use group::{direct_sum, DirectSum, Group, GroupElement, Order, Projection};
pub(crate) use group::split_top_level;
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SmithForm};
