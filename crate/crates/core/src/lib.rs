//! Core algorithms for the tiling / Hamiltonian / PEPS reduction workbench.
//!
//! The crate is organised along a chain of encodings, each module exposing
//! exact, exhaustively checkable operations:
//!
//! - [`turing`]: nondeterministic Turing machines with bounded-time
//!   acceptance decided by exhaustive search.
//! - [`tmcompile`]: compilation of a machine and input word into a
//!   bounded-tiling instance.
//! - [`tiling`]: bounded-tiling instances, backtracking solver and exact
//!   tiling counts, including periodic counts on tori.
//! - [`hamiltonian`]: the classical commuting Hamiltonian whose ground energy
//!   is zero exactly on solvable instances, plus the associated two-local
//!   decision problem.
//! - [`tensor`]: PEPS tensors built from tile sets, direct-sum and
//!   tensor-product combinators, and exact double-layer contraction for zero
//!   testing on open lattices and tori.
//! - [`parent`]: parent-Hamiltonian machinery: the boundary-to-physical map
//!   of a region, canonical projector terms, domination and image
//!   decomposition checks, and the composed gap-construction term.
//!
//! All arithmetic that feeds a decision is exact (big integers); floating
//! point appears only in the spectral computations of [`parent`], always with
//! explicit tolerances. The crate is `no_std` (with `alloc`); IO, file
//! formats and the command-line front end live in the companion `tilepeps`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod hamiltonian;
pub mod parent;
pub mod tensor;
pub mod tiling;
pub mod tmcompile;
pub mod turing;
