//! Discrete tau functions, bilinear recurrences and their verification oracles.

pub mod combinatorics;
pub mod exact;
pub mod fock;
pub mod lattice;
pub mod oeis;
pub mod recurrence;
pub mod scan;
pub mod symbolic;
pub mod verify;
