//! Spot, volatility and time sensitivities of the perpetual premium, plus a
//! dated Black-Scholes call used as the comparison peer.
//!
//! Every Greek is piecewise: the closed form inside the continuation region
//! and the intrinsic-value derivative (±1 delta, zero gamma and vega) beyond
//! the boundary.

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{require, AmpoError, Result};
use crate::params::{ContractParams, MarketParams, OptionKind};
use crate::pricing::{
    boundary_from_exponents, contract_exponents, in_continuation, moneyness, pow_pos,
    premium_from_exponents, price,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreeksReport {
    pub delta: f64,
    pub gamma: f64,
    /// Explicit calendar-time derivative of the perpetual premium; always 0.
    pub theta_explicit: f64,
    /// Decay of the holder's position from amortization, `−q·V`.
    pub theta_economic: f64,
    /// Per unit of σ (not per vol point).
    pub vega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatedGreeksReport {
    pub premium: f64,
    pub delta: f64,
    pub gamma: f64,
    /// Calendar-time theta, per year.
    pub theta: f64,
    pub vega: f64,
}

pub fn delta(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    let boundary = boundary_from_exponents(c.kind, c.strike, &e)?;
    if !in_continuation(c.kind, m.spot, boundary) {
        return Ok(c.kind.omega());
    }
    let x = moneyness(c.kind, m.spot, c.strike, &e);
    Ok(match c.kind {
        OptionKind::Call => pow_pos(x, e.alpha_c - 1.0),
        OptionKind::Put => -pow_pos(x, 1.0 + e.alpha_p),
    })
}

pub fn gamma(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    let boundary = boundary_from_exponents(c.kind, c.strike, &e)?;
    if !in_continuation(c.kind, m.spot, boundary) {
        return Ok(0.0);
    }
    let x = moneyness(c.kind, m.spot, c.strike, &e);
    Ok(match c.kind {
        OptionKind::Call => {
            let a = e.alpha_c;
            (a - 1.0) * (a - 1.0) / (a * c.strike) * pow_pos(x, a - 2.0)
        }
        OptionKind::Put => {
            let a = e.alpha_p;
            a * c.strike / (m.spot * m.spot) * pow_pos(x, a)
        }
    })
}

pub fn theta_economic(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    Ok(-c.amort * price(m, c)?.premium)
}

/// Closed-form vega.
///
/// ```text
/// ν_C = 4C₀/σ · ln((α_C−1)S₀/(α_C K)) · ((α_C−1)r − q̃) / ((2α_C−1)σ² + 2r)
/// ν_P = 4P₀/σ · ln((1+α_P)S₀/(α_P K)) · ((1+α_P)r + q̃) / ((2α_P+1)σ² − 2r)
/// ```
///
/// with `q̃ = q + shift` (the radical shift of the exponent form; `q̃ = q + r`
/// for the published radical, which turns the numerators into
/// `(α_C−2)r − q` and `(2+α_P)r + q`).
pub fn vega(m: &MarketParams, c: &ContractParams) -> Result<f64> {
    let e = contract_exponents(m, c)?;
    let quote = premium_from_exponents(c.kind, m.spot, c.strike, &e)?;
    if !in_continuation(c.kind, m.spot, quote.boundary) {
        return Ok(0.0);
    }
    let (r, sigma) = (m.rate, m.vol);
    let var = sigma * sigma;
    let q_tilde = c.amort + c.form.radical_shift(r);
    let lead = 4.0 * quote.premium / sigma;
    match c.kind {
        OptionKind::Call => {
            let a = e.alpha_c;
            let log_term = ((a - 1.0) * m.spot / (a * c.strike)).ln();
            let ratio = ((a - 1.0) * r - q_tilde) / ((2.0 * a - 1.0) * var + 2.0 * r);
            Ok(lead * log_term * ratio)
        }
        OptionKind::Put => {
            let a = e.alpha_p;
            let denom = (2.0 * a + 1.0) * var - 2.0 * r;
            if denom.abs() < 1e-14 {
                return Err(AmpoError::Domain(format!(
                    "put vega denominator (2α_P+1)σ² − 2r vanishes (α_P = {a}, σ = {sigma}, r = {r})"
                )));
            }
            let log_term = ((1.0 + a) * m.spot / (a * c.strike)).ln();
            Ok(lead * log_term * ((1.0 + a) * r + q_tilde) / denom)
        }
    }
}

pub fn greeks(m: &MarketParams, c: &ContractParams) -> Result<GreeksReport> {
    Ok(GreeksReport {
        delta: delta(m, c)?,
        gamma: gamma(m, c)?,
        theta_explicit: 0.0,
        theta_economic: theta_economic(m, c)?,
        vega: vega(m, c)?,
    })
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// European call on a non-dividend asset (equal to the American call).
pub fn dated_bs_call(m: &MarketParams, strike: f64, maturity: f64) -> Result<DatedGreeksReport> {
    m.validate()?;
    require(strike.is_finite() && strike > 0.0, "strike", "> 0", strike)?;
    require(
        maturity.is_finite() && maturity > 0.0,
        "maturity",
        "> 0",
        maturity,
    )?;
    let (s, r, sigma, t) = (m.spot, m.rate, m.vol, maturity);
    let sqrt_t = t.sqrt();
    let d1 = ((s / strike).ln() + (r + 0.5 * sigma * sigma) * t) / (sigma * sqrt_t);
    let d2 = d1 - sigma * sqrt_t;
    let discounted_strike = strike * (-r * t).exp();
    let pdf = norm_pdf(d1);
    Ok(DatedGreeksReport {
        premium: s * norm_cdf(d1) - discounted_strike * norm_cdf(d2),
        delta: norm_cdf(d1),
        gamma: pdf / (s * sigma * sqrt_t),
        theta: -s * pdf * sigma / (2.0 * sqrt_t) - r * discounted_strike * norm_cdf(d2),
        vega: s * pdf * sqrt_t,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // reference values carry every digit computed
mod tests {
    use super::*;
    use crate::params::ExponentForm;

    fn params_a() -> MarketParams {
        MarketParams::new(100.0, 0.05, 0.5).unwrap()
    }
    fn call() -> ContractParams {
        ContractParams::call(100.0, 0.1).unwrap()
    }
    fn put() -> ContractParams {
        ContractParams::put(100.0, 0.1).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn deltas() {
        let m = params_a();
        // 0.375^0.6
        assert!(rel(delta(&m, &call()).unwrap(), 0.555_160_758_730_730_02) < 1e-13);
        assert!((delta(&m, &put()).unwrap() + 0.25).abs() < 1e-14);
        assert_eq!(delta(&m.with_spot(30.0), &put()).unwrap(), -1.0);
        assert_eq!(delta(&m.with_spot(300.0), &call()).unwrap(), 1.0);
    }

    #[test]
    fn gammas() {
        let m = params_a();
        assert!(rel(gamma(&m, &put()).unwrap(), 0.005) < 1e-13);
        assert!(rel(gamma(&m, &call()).unwrap(), 0.003_330_964_552_384_380_1) < 1e-12);
        assert_eq!(gamma(&m.with_spot(300.0), &call()).unwrap(), 0.0);
        assert_eq!(gamma(&m.with_spot(30.0), &put()).unwrap(), 0.0);
    }

    #[test]
    fn economic_theta() {
        let m = params_a();
        assert!((theta_economic(&m, &put()).unwrap() + 2.5).abs() < 1e-13);
        assert!(rel(theta_economic(&m, &call()).unwrap(), -3.469_754_742_067_062_6) < 1e-12);
        let g = greeks(&m, &put()).unwrap();
        assert_eq!(g.theta_explicit, 0.0);
        // deep OTM call far from the strike has a premium that underflows to 0
        let tiny = theta_economic(&m.with_spot(1e-300), &call()).unwrap();
        assert_eq!(tiny, 0.0);
    }

    #[test]
    fn vegas() {
        let m = params_a();
        // 200·ln2·0.25/0.65
        assert!(rel(vega(&m, &put()).unwrap(), 53.319_013_889_226_562) < 1e-12);
        assert!(rel(vega(&m, &call()).unwrap(), 50.263_191_903_441_702) < 1e-12);
        assert_eq!(vega(&m.with_spot(300.0), &call()).unwrap(), 0.0);
        assert_eq!(vega(&m.with_spot(20.0), &put()).unwrap(), 0.0);
    }

    #[test]
    fn vega_matches_sigma_chain_rule_in_both_forms() {
        // V·ln(x)·∂α/∂σ with ∂α/∂σ from differentiating the radical directly
        let m = MarketParams::new(90.0, 0.03, 0.35).unwrap();
        for form in [ExponentForm::Published, ExponentForm::OdeConsistent] {
            for kind in [OptionKind::Call, OptionKind::Put] {
                let c = ContractParams::new(100.0, 0.2, kind).unwrap().with_form(form);
                let h = 1e-6;
                let up = crate::pricing::compute_exponents_with(&m.with_vol(0.35 + h), 0.2, form).unwrap();
                let dn = crate::pricing::compute_exponents_with(&m.with_vol(0.35 - h), 0.2, form).unwrap();
                let dalpha = (up.for_kind(kind) - dn.for_kind(kind)) / (2.0 * h);
                let e = crate::pricing::compute_exponents_with(&m, 0.2, form).unwrap();
                let v = price(&m, &c).unwrap().premium;
                let log_x = moneyness(kind, m.spot, 100.0, &e).ln();
                let chain = v * log_x * dalpha;
                assert!(rel(vega(&m, &c).unwrap(), chain) < 1e-8, "{form:?} {kind:?}");
            }
        }
    }

    #[test]
    fn vega_denominators_equal_two_sigma_squared_alpha_bar() {
        for &(r, sigma, q) in &[(0.0, 0.2, 0.01), (0.05, 0.5, 0.1), (0.2, 0.05, 3.0)] {
            let m = MarketParams::new(100.0, r, sigma).unwrap();
            for form in [ExponentForm::Published, ExponentForm::OdeConsistent] {
                let e = crate::pricing::compute_exponents_with(&m, q, form).unwrap();
                let var = sigma * sigma;
                let target = 2.0 * var * e.alpha_bar;
                assert!(rel((2.0 * e.alpha_p + 1.0) * var - 2.0 * r, target) < 1e-12);
                assert!(rel((2.0 * e.alpha_c - 1.0) * var + 2.0 * r, target) < 1e-12);
            }
        }
    }

    #[test]
    fn dated_call_reference() {
        let m = params_a();
        let d = dated_bs_call(&m, 100.0, 2.0).unwrap();
        assert!(rel(d.premium, 31.327_683_827_656_458) < 1e-13);
        assert!(rel(d.delta, 0.689_691_026_781_155_16) < 1e-13);
        assert!(rel(d.gamma, 0.004_991_418_560_723_048_5) < 1e-12);
        assert!(rel(d.theta, -8.121_344_143_426_763_5) < 1e-12);
        assert!(rel(d.vega, 49.914_185_607_230_485) < 1e-12);
        assert!(d.theta < 0.0);
    }

    #[test]
    fn dated_call_limits() {
        // ATM premium ≈ S·σ·φ(0) as σ → 0
        let low_vol = MarketParams::new(100.0, 0.0, 1e-12).unwrap();
        assert!(dated_bs_call(&low_vol, 100.0, 1.0).unwrap().premium < 1e-9);

        let m = params_a().with_spot(1e4);
        let d = dated_bs_call(&m, 100.0, 1.0).unwrap();
        let asymptote = 1e4 - 100.0 * (-0.05f64).exp();
        assert!((d.premium - asymptote).abs() < 1e-9);
        assert!(dated_bs_call(&params_a(), 100.0, 0.0).is_err());
    }

    #[test]
    fn normal_cdf_accuracy() {
        assert_eq!(norm_cdf(0.0), 0.5);
        // Φ(1.96), Φ(−3) reference values
        assert!((norm_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
        assert!((norm_cdf(-3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-17);
        assert!((norm_cdf(-10.0) - 7.619_853_024_160_527e-24).abs() < 1e-36);
    }
}
