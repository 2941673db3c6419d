//! Pricing and analytics for amortizing perpetual options (AmPOs).
//!
//! An AmPO is a perpetual American call or put whose claimable notional
//! decays as `N_t = N₀·e^{−qt}`. The decay replaces explicit installment
//! payments, so every unit of notional stays identical.
//!
//! Modules:
//! - [`pricing`]: exponents, exercise boundaries, premia, regimes
//! - [`greeks`]: delta, gamma, vega, economic theta, dated Black-Scholes peer
//! - [`statics`]: derivatives in the amortization rate
//! - [`oracle`]: lattice, ODE residual and finite-difference checks
//! - [`analysis`]: effective maturity, safety/efficiency ratios, vega optimization

pub mod analysis;
pub mod error;
pub mod greeks;
pub mod oracle;
pub mod params;
pub mod pricing;
pub mod statics;

pub use error::{AmpoError, Result};
pub use params::{AmortizationSchedule, ContractParams, ExponentForm, MarketParams, OptionKind};
pub use pricing::{
    compute_exponents, compute_exponents_with, exercise_boundary, price, to_equivalent_perpetual,
    EquivalentPerpetual, Exponents, Quote, Regime,
};
