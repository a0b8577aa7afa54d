//! Exact-arithmetic toolkit for binary and quaternary sequences built from
//! cyclotomic classes of a prime field.
//!
//! The crate constructs several families of low-autocorrelation sequences
//! (an order-8 cyclotomic family of odd prime period, Tang–Lindner order-4
//! sequences, Gray-mapped pairings of binary sequences, Ding–Helleseth–
//! Martinsen sequences of period 2p and the equivalent Shen family), and
//! analyzes them with exact integer arithmetic only: periodic correlation
//! over Gaussian integers, symbol balance, and linear complexity over the
//! two- and four-element fields via polynomial gcd with a Berlekamp–Massey
//! cross-check.
//!
//! Everything is a pure function of its inputs; with the default `parallel`
//! feature the shift loops and verification scans fan out on rayon, and the
//! `*_seq` variants stay available for comparison.

pub mod constructions;
pub mod cyclotomy;
pub mod lincomp;
mod par;
pub mod seqcore;
pub mod verify;

pub use constructions::{ChungVariant, ConstructionSpec, Family};
pub use cyclotomy::CyclotomicSystem;
pub use seqcore::{Alphabet, BalanceClass, GaussianInt, PeriodicSeq};

/// Largest prime accepted anywhere; keeps every intermediate product of two
/// residues inside `u64` so all arithmetic stays exact.
pub const MAX_PRIME: u64 = 1 << 31;
