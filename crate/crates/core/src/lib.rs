//! Screening contracts for privacy as a good.
//!
//! A utility company offers a two-item menu of privacy settings and prices
//! to consumers whose valuation of privacy (their type) is private
//! information. This crate solves the resulting contract-design problem:
//!
//! - [`model`] — problem instances: consumer utility, operator cost, and
//!   privacy-breach risk, with grid-based assumption validation.
//! - [`scalar_opt`] — the one-dimensional concave maximization kernel.
//! - [`screening`] — first-best and second-best menus via the constraint
//!   reduction, menu verification, profit, rent, and welfare.
//! - [`risk_analysis`] — comparative statics between the no-risk and
//!   with-risk optima: critical priors, ordering checks, prior sweeps.
//! - [`oracle`] — independent brute-force solver of the full
//!   four-constraint program, used for certification.
//! - [`dlc`] — closed-form solutions for the direct-load-control example.
//! - [`cli`] — config parsing, the `solve | sweep | verify | compare`
//!   subcommands, and the sweep CSV format.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability.

pub mod cli;
pub mod dlc;
pub mod error;
pub mod model;
pub mod oracle;
pub mod risk_analysis;
pub mod scalar_opt;
pub mod screening;

pub use error::{Error, Result};
pub use model::{
    CostModel, ModelSpec, PrivacyInterval, RiskModel, Theta, TypePair, UtilityModel,
    ValidationReport,
};
pub use scalar_opt::{Boundary, OptResult};
pub use screening::{
    Contract, ContractMenu, ConstraintResiduals, Regime, SolveOptions, SolveReport,
};
