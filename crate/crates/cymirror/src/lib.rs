//! Exact-arithmetic closed and open mirror symmetry for one-parameter
//! Calabi-Yau threefolds.
//!
//! The library computes, over exact rationals, the Frobenius basis of a
//! Picard-Fuchs operator at a point of maximal unipotent monodromy, the
//! mirror map, the Yukawa coupling and instanton numbers, integral
//! monodromy and limiting period matrices, and the open-string extension:
//! superpotentials, infinitesimal invariants, extended monodromy, the real
//! quintic open Gromov-Witten series, and WDVV / Open WDVV flatness checks.
//!
//! Normalization: all series live in graded variables in which every power
//! of 2*pi*i is absorbed, so coefficients stay rational. The formal symbol
//! `log` in a q-series stands for t = log(q)/(2*pi*i). Zeta values appear
//! only in limit data, carried symbolically by [`constants::FormalConstant`].

pub mod constants;
pub mod series;
pub mod matrix;
pub mod picard_fuchs;
pub mod closed_mirror;
pub mod quantum;
pub mod extension;
pub mod hodge;
pub mod jobspec;
pub mod report;
