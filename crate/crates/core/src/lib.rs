//! Sparsity-targeted choice of the l1 regularization parameter.
//!
//! The crate computes, for a range of l1-regularized models, the parameter
//! values at which the solution reaches a prescribed (block or transform)
//! sparsity level, solves those models with a fixed-point proximity
//! iteration, and checks the solutions against closed forms and optimality
//! conditions.
//!
//! ```
//! use l1pc::fppa::{fppa_solve, FppaConfig};
//! use l1pc::linalg::sparsity_level;
//! use l1pc::param_choice::{lambda_for_sparsity, lasso_identity_thresholds};
//! use l1pc::prox::{L1Norm, SquaredDistance};
//! use l1pc::transforms::Identity;
//!
//! let x = vec![3.0, -1.0, 0.5, 2.0];
//! let t = lasso_identity_thresholds(&x);
//! let lambda = lambda_for_sparsity(&t, 2)?; // two nonzeros remain
//! let c = Identity { n: x.len() };
//! let cfg = FppaConfig::for_operator(&c, 2000)?;
//! let r = fppa_solve(&L1Norm { weight: lambda }, &SquaredDistance { target: x }, &c, &cfg)?;
//! assert_eq!(sparsity_level(r.u_inf.as_slice(), 1e-9).level, 2);
//! # Ok::<(), l1pc::Error>(())
//! ```

// `!(x > 0.0)` is the idiom that also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fppa;
pub mod linalg;
pub mod oracle;
pub mod param_choice;
pub mod prox;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
pub use linalg::{LinearOperator, Matrix, Partition, SparsityReport, Vector};
