//! Exact-arithmetic toolkit for character sums over finite fields:
//! Gauss and Jacobi sums, hypergeometric functions over F_q, equivariant
//! point counts of diagonal and Dwork hypersurfaces, and the associated
//! Artin L-functions and zeta functions — with brute-force enumeration
//! oracles for every closed form.

pub mod arith;
pub mod charsum;
pub mod cyclo;
pub mod counting;
pub mod ffield;
pub mod lfun;
pub mod report;
pub mod verify;
pub mod hyperf;
pub mod modeval;
pub mod numeric;

pub use hyperf::{hyper_f, hyper_f_reduced, poch, poch_circ, poch_multiplication, reduce_with_remainder, HGParams, ReduceOutcome};
pub use charsum::{char_of_order, gauss, gauss_circ, jacobi, lift, AddChar, Char};
pub use cyclo::{Cyclo, CycloError};
pub use ffield::{build_field, build_tower, FieldCtx, FieldElem, FieldError, TowerMap};
pub use numeric::{approx_cyclo, ComplexApprox};
