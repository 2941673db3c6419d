//! Sensitivities to the amortization rate `q`.
//!
//! The premium depends on `q` only through the exponents, with
//! `∂α_C/∂q = ∂α_P/∂q = 1/(σ²ᾱ)`. The mixed `∂²V/∂σ∂q` is assembled by the
//! chain rule through `α`, `ᾱ` and the explicit `σ²` in `∂V/∂q`:
//!
//! ```text
//! ∂²V/∂σ∂q = (∂/∂α ∂V/∂q)(∂α/∂σ) + (∂/∂ᾱ ∂V/∂q)(∂ᾱ/∂σ) − (2/σ)(∂V/∂q)
//! ```
//!
//! The first derivative in `q` and the mixed partial are only defined inside
//! the continuation region; outside it these routines refuse.

use serde::{Deserialize, Serialize};

use crate::error::{AmpoError, Result};
use crate::params::{ContractParams, MarketParams, OptionKind};
use crate::pricing::{
    boundary_from_exponents, compute_exponents_with, contract_exponents, in_continuation,
    premium_from_exponents, Exponents,
};

/// Chain-rule factors of the mixed partial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedPartialFactors {
    /// `∂/∂α (∂V/∂q)` holding `ᾱ` and `σ` fixed.
    pub d_alpha_of_dq: f64,
    /// `∂α/∂σ` for the option's own exponent.
    pub d_alpha_d_sigma: f64,
    /// `∂/∂ᾱ (∂V/∂q)` holding `α` and `σ` fixed.
    pub d_alpha_bar_of_dq: f64,
    /// `∂ᾱ/∂σ = −(2r² + σ²(r + 2q̃))/(σ⁵ᾱ)`.
    pub d_alpha_bar_d_sigma: f64,
    /// `−(2/σ)·∂V/∂q`, the derivative through the explicit `σ²`.
    pub explicit_sigma: f64,
}

impl MixedPartialFactors {
    pub fn assemble(&self) -> f64 {
        self.d_alpha_of_dq * self.d_alpha_d_sigma
            + self.d_alpha_bar_of_dq * self.d_alpha_bar_d_sigma
            + self.explicit_sigma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticsReport {
    pub d_premium_dq: f64,
    pub d_boundary_dq: f64,
    pub d2_premium_dsigma_dq: f64,
    pub intermediates: MixedPartialFactors,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub small_q: f64,
    pub small_q_premium: f64,
    pub vanilla_premium: f64,
    pub small_q_rel_error: f64,
    pub large_q: f64,
    pub large_q_premium: f64,
    pub intrinsic: f64,
    pub large_q_abs_error: f64,
}

struct Continuation {
    exps: Exponents,
    premium: f64,
    /// `ln((α_C−1)S/(α_C K))` (≤ 0) for calls, `ln((1+α_P)S/(α_P K))` (≥ 0)
    /// for puts.
    log_term: f64,
}

fn continuation_state(m: &MarketParams, c: &ContractParams) -> Result<Continuation> {
    let exps = contract_exponents(m, c)?;
    let quote = premium_from_exponents(c.kind, m.spot, c.strike, &exps)?;
    if !in_continuation(c.kind, m.spot, quote.boundary) {
        return Err(AmpoError::OutsideContinuation {
            spot: m.spot,
            boundary: quote.boundary,
        });
    }
    let log_term = match c.kind {
        OptionKind::Call => ((exps.alpha_c - 1.0) * m.spot / (exps.alpha_c * c.strike)).ln(),
        OptionKind::Put => ((1.0 + exps.alpha_p) * m.spot / (exps.alpha_p * c.strike)).ln(),
    };
    Ok(Continuation {
        exps,
        premium: quote.premium,
        log_term,
    })
}

fn premium_q_slope(kind: OptionKind, sigma: f64, st: &Continuation) -> f64 {
    let scale = st.premium / (sigma * sigma * st.exps.alpha_bar);
    match kind {
        OptionKind::Call => scale * st.log_term,
        OptionKind::Put => -scale * st.log_term,
    }
}

pub fn d_premium_dq(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let st = continuation_state(m, c)?;
    Ok(premium_q_slope(c.kind, m.vol, &st))
}

pub fn d_boundary_dq(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    boundary_from_exponents(c.kind, c.strike, &e)?;
    let var = m.vol * m.vol;
    Ok(match c.kind {
        OptionKind::Call => {
            let a1 = e.alpha_c - 1.0;
            -c.strike / (var * a1 * a1 * e.alpha_bar)
        }
        OptionKind::Put => {
            let a1 = 1.0 + e.alpha_p;
            c.strike / (var * a1 * a1 * e.alpha_bar)
        }
    })
}

/// `∂ᾱ/∂σ` in closed form.
pub fn d_alpha_bar_d_sigma(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    Ok(alpha_bar_sigma_slope(m, c, &e))
}

fn alpha_bar_sigma_slope(m: &MarketParams, c: &ContractParams, e: &Exponents) -> f64 {
    let (r, sigma) = (m.rate, m.vol);
    let q_tilde = c.amort + c.form.radical_shift(r);
    let numer = 2.0 * r * r + sigma * sigma * (r + 2.0 * q_tilde);
    -numer / (sigma.powi(5) * e.alpha_bar)
}

pub fn mixed_partial_factors(m: &MarketParams, c: &ContractParams) -> Result<MixedPartialFactors> {
    let st = continuation_state(m, c)?;
    let (r, sigma) = (m.rate, m.vol);
    let var = sigma * sigma;
    let abar = st.exps.alpha_bar;
    let d_abar = alpha_bar_sigma_slope(m, c, &st.exps);
    let sigma3 = sigma * var;
    let l = st.log_term;
    let dq = premium_q_slope(c.kind, sigma, &st);
    let (d_alpha_of_dq, d_alpha_d_sigma, d_alpha_bar_of_dq) = match c.kind {
        OptionKind::Call => {
            let a = st.exps.alpha_c;
            (
                st.premium / (var * abar) * (l * l + 1.0 / (a * (a - 1.0))),
                2.0 * r / sigma3 + d_abar,
                -st.premium / (var * abar * abar) * l,
            )
        }
        OptionKind::Put => {
            let a = st.exps.alpha_p;
            (
                st.premium / (var * abar) * (l * l + 1.0 / ((1.0 + a) * a)),
                -2.0 * r / sigma3 + d_abar,
                st.premium / (var * abar * abar) * l,
            )
        }
    };
    Ok(MixedPartialFactors {
        d_alpha_of_dq,
        d_alpha_d_sigma,
        d_alpha_bar_of_dq,
        d_alpha_bar_d_sigma: d_abar,
        explicit_sigma: -2.0 / sigma * dq,
    })
}

pub fn d2_premium_dsigma_dq(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    Ok(mixed_partial_factors(m, c)?.assemble())
}

pub fn statics(m: &MarketParams, c: &ContractParams) -> Result<StaticsReport> {
    let intermediates = mixed_partial_factors(m, c)?;
    Ok(StaticsReport {
        d_premium_dq: d_premium_dq(m, c)?,
        d_boundary_dq: d_boundary_dq(m, c)?,
        d2_premium_dsigma_dq: intermediates.assemble(),
        intermediates,
    })
}

pub const LIMIT_SMALL_Q: f64 = 1e-10;
pub const LIMIT_LARGE_Q: f64 = 1e4;

/// Premium at vanishing and at very large amortization against the two
/// limiting values: the vanilla perpetual (exponents at `q = 0`) and the
/// intrinsic value. `c.amort` is ignored.
pub fn limit_suite(m: &MarketParams, c: &ContractParams) -> Result<LimitReport> {
    m.validate()?;
    let small = premium_from_exponents(
        c.kind,
        m.spot,
        c.strike,
        &compute_exponents_with(m, LIMIT_SMALL_Q, c.form)?,
    )?
    .premium;
    let vanilla_exps = compute_exponents_with(m, 0.0, c.form)?;
    if vanilla_exps.is_degenerate() {
        return Err(AmpoError::Degenerate(format!(
            "q = 0 exponents collapse (alpha_c = {}, alpha_p = {}); no finite vanilla boundary",
            vanilla_exps.alpha_c, vanilla_exps.alpha_p
        )));
    }
    let vanilla = premium_from_exponents(c.kind, m.spot, c.strike, &vanilla_exps)?.premium;
    let large = premium_from_exponents(
        c.kind,
        m.spot,
        c.strike,
        &compute_exponents_with(m, LIMIT_LARGE_Q, c.form)?,
    )?
    .premium;
    let intrinsic = c.kind.intrinsic(m.spot, c.strike);
    Ok(LimitReport {
        small_q: LIMIT_SMALL_Q,
        small_q_premium: small,
        vanilla_premium: vanilla,
        small_q_rel_error: (small - vanilla).abs() / vanilla.abs().max(1e-300),
        large_q: LIMIT_LARGE_Q,
        large_q_premium: large,
        intrinsic,
        large_q_abs_error: (large - intrinsic).abs(),
    })
}
