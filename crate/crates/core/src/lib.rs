//! Exact computation and verification toolkit for the Fibonacci-type sequence
//! `h_n = t_n h_{n-1} + h_{n-2}` whose coefficients `t_n = (-1)^{s_2(n)}` follow
//! the Prouhet-Thue-Morse sequence.
//!
//! The crate is organised by concern:
//!
//! * [`sequence`]: the PTM sequence, exact terms `h_n`, signs and scans.
//! * [`automata`]: deterministic finite automata with output (DFAO) and the
//!   operations needed on them: running, reversal, minimization, kernels, DOT.
//! * [`modauto`]: the step functions `f_k`, their eventual period and the
//!   cascade automaton computing `h_n mod m`.
//! * [`identities`]: exact verification of the identities satisfied by `h_n`.
//! * [`contfrac`]: continued fractions of `h_n / h_{n-1}`.
//! * [`series`]: truncated power series and the functional equations.
//! * [`conjectures`]: finite scans supporting the open conjectures.
//! * [`suite`]: the full verification battery behind `verify-all`.

pub mod automata;
pub mod conjectures;
pub mod contfrac;
pub mod error;
pub mod identities;
pub mod modauto;
pub mod sequence;
pub mod series;
pub mod suite;

pub use automata::{Dfao, Direction, KernelReport};
pub use contfrac::{CfKind, ContinuedFraction};
pub use error::{Error, Result};
pub use identities::{IdentityReport, Matrix4};
pub use modauto::{Cascade, PeriodPair, StepFunction};
pub use num_bigint::BigInt;
pub use sequence::{fib, h, ptm, sign_closed, RunKind, SequenceWindow, Sign, Term, TermTable, Terms};
pub use series::{DensePolynomial, Ring, TruncatedSeries};
pub use suite::{RunConfig, SuiteReport};
