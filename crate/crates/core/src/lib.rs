//! Operator-space norms on families of matrices, truncated free-group and
//! full Fock space representations, free products of pointed Hilbert
//! spaces, and a seeded harness that checks the classical inequalities
//! relating them.

pub mod fock;
pub mod freegroup;
pub mod freeprod;
pub mod linalg;
pub mod opspace;
pub mod sampling;
pub mod verify;
