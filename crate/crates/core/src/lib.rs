//! Exact Hausdorff dimension of closures of regular branch groups acting on
//! the m-adic tree.

pub mod catalog;
pub mod perm;
pub mod tree;
pub mod hausdorff;
pub mod quotients;
pub mod branchcheck;
pub mod cli;
