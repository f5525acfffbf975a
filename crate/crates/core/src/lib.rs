//! Exact lattice-level calculus for K3 surfaces: Mukai lattices and vectors,
//! cohomological actions of standard Fourier-Mukai kernels, reflection
//! chambers, supersingular lattice invariants, partner criteria and zeta
//! function bookkeeping from Frobenius data.

pub mod arith;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod moduli;
pub mod mukai;
pub mod transforms;
pub mod zeta;

pub use error::{Error, Result};
pub use lattice::{in_coset, validate_lattice, DiscriminantGroup, Lattice, Signature, Sublattice};
pub use matrix::IntMatrix;
pub use moduli::{
    change_rank, char0_lift_hypotheses, fine_moduli, improve_vector, moduli_nonempty, partner_uniqueness,
    section7_pipeline, AmpleChamber,
};
pub use mukai::{
    deformation_dimension, euler_pairing, is_isometry, mukai_pairing, mukai_vector, Isometry, MukaiLattice, MukaiVector,
};
pub use transforms::{chamber_walk, enumerate_roots, normalize, Generator, RootSet, Transform};
pub use zeta::{zeta_equal, FrobeniusData};
