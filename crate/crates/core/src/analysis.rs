//! Case studies comparing AmPOs against dated calls and choosing `q`.
//!
//! All studies are at-the-money style setups around a single market state.
//! The dated peer is a Black-Scholes call; without dividends the American
//! and European calls coincide.

use serde::{Deserialize, Serialize};

use crate::error::{require, AmpoError, Result};
use crate::greeks::{dated_bs_call, gamma, vega};
use crate::params::{ContractParams, ExponentForm, MarketParams, OptionKind};
use crate::pricing::price;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaturityResult {
    pub q: f64,
    pub effective_maturity: f64,
    /// `e^{−qT}`.
    pub effective_notional: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub q: f64,
    /// AmPO gamma over the gamma of the dated call at the effective maturity.
    pub gamma_ratio: f64,
    /// `q·C₀ / |Θ_dated|`.
    pub theta_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    CallOnly,
    PutOnly,
    Straddle,
}

impl std::str::FromStr for Strategy {
    type Err = AmpoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "call" | "call-only" => Ok(Strategy::CallOnly),
            "put" | "put-only" => Ok(Strategy::PutOnly),
            "straddle" => Ok(Strategy::Straddle),
            other => Err(AmpoError::Domain(format!(
                "unknown strategy `{other}` (expected call, put or straddle)"
            ))),
        }
    }
}

impl Strategy {
    fn legs(self) -> &'static [OptionKind] {
        match self {
            Strategy::CallOnly => &[OptionKind::Call],
            Strategy::PutOnly => &[OptionKind::Put],
            Strategy::Straddle => &[OptionKind::Call, OptionKind::Put],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::CallOnly => "call",
            Strategy::PutOnly => "put",
            Strategy::Straddle => "straddle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: Strategy,
    pub budget: f64,
}

impl StrategySpec {
    pub fn new(kind: Strategy, budget: f64) -> Result<Self> {
        require(budget.is_finite() && budget > 0.0, "budget", "> 0", budget)?;
        Ok(Self { kind, budget })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimumLocation {
    Interior,
    LowerEdge,
    UpperEdge,
    /// The coarse scan showed more than one peak; `q_star` is the grid argmax.
    Multimodal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub q_star: f64,
    pub positional_vega_at_star: f64,
    pub location: OptimumLocation,
    pub curve: Vec<(f64, f64)>,
}

pub const DEFAULT_BUDGET: f64 = 100.0;
pub const DEFAULT_SCAN_POINTS: usize = 200;

/// A market state and strike shared by every case study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub market: MarketParams,
    pub strike: f64,
    pub form: ExponentForm,
}

impl Study {
    pub fn new(market: MarketParams, strike: f64) -> Result<Self> {
        market.validate()?;
        require(strike.is_finite() && strike > 0.0, "strike", "> 0", strike)?;
        Ok(Self {
            market,
            strike,
            form: ExponentForm::default(),
        })
    }

    pub fn with_form(self, form: ExponentForm) -> Self {
        Self { form, ..self }
    }

    fn contract(&self, kind: OptionKind, q: f64) -> Result<ContractParams> {
        Ok(ContractParams::new(self.strike, q, kind)?.with_form(self.form))
    }

    /// Maturity of the dated call whose premium equals the AmPO call premium.
    pub fn effective_maturity(&self, q: f64) -> Result<MaturityResult> {
        let m = &self.market;
        let target = price(m, &self.contract(OptionKind::Call, q)?)?.premium;
        if target >= m.spot - 1e-12 {
            return Err(AmpoError::NoSolution(format!(
                "AmPO premium {target} reaches the dated-call supremum {}",
                m.spot
            )));
        }
        let dated = |t: f64| dated_bs_call(m, self.strike, t).map(|d| d.premium - target);

        // Dated premium rises from the intrinsic value (T → 0) towards S₀.
        if OptionKind::Call.intrinsic(m.spot, self.strike) >= target {
            return Err(AmpoError::NoSolution(format!(
                "AmPO premium {target} is not above the dated intrinsic value"
            )));
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while dated(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e9 {
                return Err(AmpoError::NoSolution(format!(
                    "no dated maturity below 1e9 years matches premium {target}"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = dated(mid)?;
            if f == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let miss = dated(t)?.abs();
        if miss > 1e-10 {
            return Err(AmpoError::NoSolution(format!(
                "bisection stalled {miss:.3e} away from the AmPO premium"
            )));
        }
        Ok(MaturityResult {
            q,
            effective_maturity: t,
            effective_notional: (-q * t).exp(),
        })
    }

    pub fn effective_notional_curve(&self, q_grid: &[f64]) -> Result<Vec<MaturityResult>> {
        q_grid.iter().map(|&q| self.effective_maturity(q)).collect()
    }

    pub fn ratio_point(&self, q: f64) -> Result<RatioPoint> {
        let m = &self.market;
        let call = self.contract(OptionKind::Call, q)?;
        let t = self.effective_maturity(q)?.effective_maturity;
        let dated = dated_bs_call(m, self.strike, t)?;
        let premium = price(m, &call)?.premium;
        Ok(RatioPoint {
            q,
            gamma_ratio: gamma(m, &call)? / dated.gamma,
            theta_ratio: q * premium / dated.theta.abs(),
        })
    }

    pub fn ratio_study(&self, q_grid: &[f64]) -> Result<Vec<RatioPoint>> {
        q_grid.iter().map(|&q| self.ratio_point(q)).collect()
    }

    /// `budget × vega / premium` over the strategy's legs.
    pub fn positional_vega(&self, spec: &StrategySpec, q: f64) -> Result<f64> {
        let m = &self.market;
        let mut premium = 0.0;
        let mut total_vega = 0.0;
        for &kind in spec.kind.legs() {
            let c = self.contract(kind, q)?;
            premium += price(m, &c)?.premium;
            total_vega += vega(m, &c)?;
        }
        if premium < 1e-12 {
            return Err(AmpoError::Degenerate(format!(
                "{} premium {premium:e} at q = {q} is too small for a positional ratio",
                spec.kind.as_str()
            )));
        }
        Ok(spec.budget * total_vega / premium)
    }

    pub fn optimize_q(&self, spec: &StrategySpec, q_range: (f64, f64)) -> Result<OptimizationResult> {
        self.optimize_q_with_scan(spec, q_range, DEFAULT_SCAN_POINTS)
    }

    /// Coarse scan over `points` evenly spaced rates, then golden-section
    /// refinement to 1e−6 around the peak when the scan shows one interior
    /// maximum.
    pub fn optimize_q_with_scan(
        &self,
        spec: &StrategySpec,
        q_range: (f64, f64),
        points: usize,
    ) -> Result<OptimizationResult> {
        let (lo, hi) = q_range;
        require(lo.is_finite() && lo > 0.0, "q_min", "> 0", lo)?;
        require(hi.is_finite() && hi > lo, "q_max", "> q_min", hi)?;
        require(points >= 3, "scan points", ">= 3", points as f64)?;

        let curve = linspace(lo, hi, points)
            .into_iter()
            .map(|q| Ok((q, self.positional_vega(spec, q)?)))
            .collect::<Result<Vec<_>>>()?;

        let (best, _) = curve
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &(_, v))| if v > acc.1 { (i, v) } else { acc });

        let (q_star, location) = if best == 0 {
            (lo, OptimumLocation::LowerEdge)
        } else if best == points - 1 {
            (hi, OptimumLocation::UpperEdge)
        } else if peak_count(&curve) == 1 {
            let f = |q: f64| self.positional_vega(spec, q).unwrap_or(f64::NEG_INFINITY);
            let q = golden_section_max(f, curve[best - 1].0, curve[best + 1].0, 1e-6);
            (q, OptimumLocation::Interior)
        } else {
            (curve[best].0, OptimumLocation::Multimodal)
        };

        Ok(OptimizationResult {
            q_star,
            positional_vega_at_star: self.positional_vega(spec, q_star)?,
            location,
            curve,
        })
    }
}

/// Evenly spaced inclusive grid.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Number of sign changes from rising to falling in the forward differences.
pub fn peak_count(curve: &[(f64, f64)]) -> usize {
    let diffs: Vec<f64> = curve.windows(2).map(|w| w[1].1 - w[0].1).filter(|d| *d != 0.0).collect();
    diffs.windows(2).filter(|w| w[0] > 0.0 && w[1] < 0.0).count()
}

/// Sign changes of any kind in the forward differences.
pub fn sign_changes(values: &[f64]) -> usize {
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).filter(|d| *d != 0.0).collect();
    diffs.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
