//! Exact algebra of inductive systems of finite-dimensional rational vector
//! spaces over finite distributive quasi-lattices.

pub mod corpus;
pub mod decomposition;
pub mod lattice;
pub mod linalg;
pub mod localization;
pub mod replay;
pub mod system;
