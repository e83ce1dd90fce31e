//! Amplitude-based probability, coherent-state Fock spaces and the
//! thermal/quantum correspondence for harmonic systems.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chain;
pub mod charfn;
pub mod exterior;
pub mod fock;
pub mod measurement;
pub mod numerics;
pub mod sphere;
pub mod states;
pub mod toy;
