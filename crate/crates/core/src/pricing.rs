//! Closed-form valuation of amortizing perpetual options.
//!
//! A unit of notional decaying at rate `q` is worth the same as a perpetual
//! American option with discount rate `r + q` and dividend yield `q`, so the
//! premium, exercise boundary and regime follow from the two roots
//! `α_C > 1` and `α_P > 0` of the perpetual pricing ODE.
//!
//! ```text
//! call:  S̄_C = α_C K / (α_C − 1)      C₀ = K/(α_C − 1) · ((α_C − 1) S₀ / (α_C K))^α_C
//! put:   S̄_P = α_P K / (1 + α_P)      P₀ = K/(1 + α_P) · (α_P K / ((1 + α_P) S₀))^α_P
//! ```
//!
//! Beyond the boundary the premium is the intrinsic value.

use serde::{Deserialize, Serialize};

use crate::error::{require, AmpoError, Result};
use crate::params::{ContractParams, ExponentForm, MarketParams, OptionKind};

/// Exponents governing every closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub alpha_c: f64,
    pub alpha_p: f64,
    /// `(α_C + α_P)/2`, which equals the radical itself.
    pub alpha_bar: f64,
}

impl Exponents {
    pub fn for_kind(&self, kind: OptionKind) -> f64 {
        match kind {
            OptionKind::Call => self.alpha_c,
            OptionKind::Put => self.alpha_p,
        }
    }

    /// True when the roots collapse to `α_C ≤ 1` or `α_P ≤ 0` (only possible
    /// at `r = q = 0`).
    pub fn is_degenerate(&self) -> bool {
        self.alpha_c <= 1.0 || self.alpha_p <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Continuation,
    ExerciseNow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub premium: f64,
    pub boundary: f64,
    pub regime: Regime,
}

/// Vanilla perpetual American option that prices identically to an AmPO.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentPerpetual {
    pub rate_eff: f64,
    pub dividend_eff: f64,
    pub payoff_kind: OptionKind,
    pub strike: f64,
}

impl EquivalentPerpetual {
    /// Textbook perpetual American premium on a dividend-paying asset:
    /// roots of `½σ²α² + (r_eff − δ − ½σ²)α − r_eff = 0`.
    pub fn closed_form_premium(&self, spot: f64, vol: f64) -> Result<f64> {
        require(spot.is_finite() && spot > 0.0, "spot", "> 0", spot)?;
        require(vol.is_finite() && vol > 0.0, "vol", "> 0", vol)?;
        let var = vol * vol;
        let drift = (self.rate_eff - self.dividend_eff) / var - 0.5;
        let root = (drift * drift + 2.0 * self.rate_eff / var).sqrt();
        let exps = Exponents {
            alpha_c: root - drift,
            alpha_p: root + drift,
            alpha_bar: root,
        };
        premium_from_exponents(self.payoff_kind, spot, self.strike, &exps).map(|q| q.premium)
    }
}

/// Exponents under the default (published) radical.
pub fn compute_exponents(m: &MarketParams, q: f64) -> Result<Exponents> {
    compute_exponents_with(m, q, ExponentForm::Published)
}

pub fn compute_exponents_with(m: &MarketParams, q: f64, form: ExponentForm) -> Result<Exponents> {
    if !(m.vol.is_finite() && m.vol > 0.0) {
        return Err(AmpoError::Domain(format!(
            "exponents need vol > 0 (got {})",
            m.vol
        )));
    }
    require(m.rate.is_finite() && m.rate >= 0.0, "rate", ">= 0", m.rate)?;
    require(q.is_finite() && q >= 0.0, "amort", ">= 0", q)?;

    let var = m.vol * m.vol;
    let a = m.rate / var;
    let half = match form {
        ExponentForm::Published => 0.5,
        ExponentForm::OdeConsistent => -0.5,
    };
    let root = ((a + half) * (a + half) + 2.0 * (m.rate + q) / var).sqrt();
    let alpha_c = root - a + 0.5;
    let alpha_p = root + a - 0.5;
    Ok(Exponents {
        alpha_c,
        alpha_p,
        alpha_bar: (alpha_c + alpha_p) / 2.0,
    })
}

pub(crate) fn contract_exponents(m: &MarketParams, c: &ContractParams) -> Result<Exponents> {
    m.validate()?;
    c.validate()?;
    compute_exponents_with(m, c.amort, c.form)
}

pub(crate) fn boundary_from_exponents(kind: OptionKind, strike: f64, e: &Exponents) -> Result<f64> {
    match kind {
        OptionKind::Call if e.alpha_c > 1.0 => Ok(e.alpha_c * strike / (e.alpha_c - 1.0)),
        OptionKind::Call => Err(AmpoError::Domain(format!(
            "call boundary needs alpha_c > 1 (got {})",
            e.alpha_c
        ))),
        OptionKind::Put if e.alpha_p > 0.0 => Ok(e.alpha_p * strike / (1.0 + e.alpha_p)),
        OptionKind::Put => Err(AmpoError::Domain(format!(
            "put boundary needs alpha_p > 0 (got {})",
            e.alpha_p
        ))),
    }
}

/// Spot at the boundary counts as continuation.
pub fn in_continuation(kind: OptionKind, spot: f64, boundary: f64) -> bool {
    match kind {
        OptionKind::Call => spot <= boundary,
        OptionKind::Put => spot >= boundary,
    }
}

/// `x^α` via `exp(α·ln x)`, `x > 0` guaranteed by the callers' region checks.
pub(crate) fn pow_pos(x: f64, alpha: f64) -> f64 {
    (alpha * x.ln()).exp()
}

/// Base of the power in the premium formula; equals 1 at the boundary and
/// lies in (0, 1] inside the continuation region.
pub(crate) fn moneyness(kind: OptionKind, spot: f64, strike: f64, e: &Exponents) -> f64 {
    match kind {
        OptionKind::Call => (e.alpha_c - 1.0) * spot / (e.alpha_c * strike),
        OptionKind::Put => e.alpha_p * strike / ((1.0 + e.alpha_p) * spot),
    }
}

pub(crate) fn premium_from_exponents(
    kind: OptionKind,
    spot: f64,
    strike: f64,
    e: &Exponents,
) -> Result<Quote> {
    let boundary = boundary_from_exponents(kind, strike, e)?;
    if !in_continuation(kind, spot, boundary) {
        return Ok(Quote {
            premium: kind.intrinsic(spot, strike),
            boundary,
            regime: Regime::ExerciseNow,
        });
    }
    let x = moneyness(kind, spot, strike, e);
    let premium = match kind {
        OptionKind::Call => strike / (e.alpha_c - 1.0) * pow_pos(x, e.alpha_c),
        OptionKind::Put => strike / (1.0 + e.alpha_p) * pow_pos(x, e.alpha_p),
    };
    Ok(Quote {
        premium,
        boundary,
        regime: Regime::Continuation,
    })
}

pub fn exercise_boundary(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    boundary_from_exponents(c.kind, c.strike, &e)
}

pub fn price(m: &MarketParams, c: &ContractParams) -> Result<Quote> {
    let e = contract_exponents(m, c)?;
    premium_from_exponents(c.kind, m.spot, c.strike, &e)
}

/// Lemma-style mapping: discount at `r + q`, dividend yield `q`.
pub fn to_equivalent_perpetual(c: &ContractParams, m: &MarketParams) -> Result<EquivalentPerpetual> {
    m.validate()?;
    c.validate()?;
    Ok(EquivalentPerpetual {
        rate_eff: m.rate + c.amort,
        dividend_eff: c.amort,
        payoff_kind: c.kind,
        strike: c.strike,
    })
}
