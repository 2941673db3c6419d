//! Independent numerical checks for the closed forms: a CRR lattice for the
//! equivalent dividend-paying perpetual, the pricing-ODE residual and a small
//! finite-difference engine.

use serde::{Deserialize, Serialize};

use crate::error::{require, AmpoError, Result};
use crate::greeks::{delta, gamma, vega};
use crate::params::{ContractParams, MarketParams, OptionKind};
use crate::pricing::{exercise_boundary, in_continuation, price, to_equivalent_perpetual, EquivalentPerpetual};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Truncation horizon standing in for the perpetuity, years.
    pub horizon: f64,
    pub steps: usize,
    /// Largest accepted relative price change between `steps / 2` and `steps`.
    pub convergence: f64,
    pub richardson: bool,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            horizon: 200.0,
            steps: 4000,
            convergence: 5e-3,
            richardson: false,
        }
    }
}

impl LatticeConfig {
    /// `min(50/q, 200)` years.
    pub fn horizon_for(amort: f64) -> f64 {
        (50.0 / amort).min(200.0)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.horizon.is_finite() && self.horizon > 0.0,
            "horizon",
            "> 0",
            self.horizon,
        )?;
        require(self.steps >= 2, "steps", ">= 2", self.steps as f64)?;
        require(
            self.convergence.is_finite() && self.convergence > 0.0,
            "convergence",
            "> 0",
            self.convergence,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeResult {
    pub price: f64,
    pub coarse_price: f64,
    pub boundary_estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub oracle_price: f64,
    pub analytic_price: f64,
    pub rel_error: f64,
    pub boundary_estimate: Option<f64>,
    pub analytic_boundary: f64,
}

impl OracleReport {
    pub fn boundary_rel_error(&self) -> Option<f64> {
        self.boundary_estimate
            .map(|b| (b - self.analytic_boundary).abs() / self.analytic_boundary)
    }
}

struct Run {
    price: f64,
    boundary: Option<f64>,
}

/// Backward induction with early exercise on a recombining CRR tree.
fn crr(e: &EquivalentPerpetual, m: &MarketParams, horizon: f64, steps: usize) -> Result<Run> {
    let dt = horizon / steps as f64;
    let log_up = m.vol * dt.sqrt();
    let log_spot = m.spot.ln();
    // Trees spanning more than f64's exponent range saturate their outermost
    // nodes; those sit far inside either region and only need their intrinsic.
    let saturate = log_spot.abs() + steps as f64 * log_up > 700.0;
    let spot_at = |layer: usize, j: usize| {
        (log_spot + (2.0 * j as f64 - layer as f64) * log_up)
            .clamp(-700.0, 700.0)
            .exp()
    };
    let up = log_up.exp();
    let down = 1.0 / up;
    let growth = ((e.rate_eff - e.dividend_eff) * dt).exp();
    let p = (growth - down) / (up - down);
    if !(p > 0.0 && p < 1.0) {
        return Err(AmpoError::Domain(format!(
            "risk-neutral probability {p} outside (0, 1); increase steps"
        )));
    }
    let disc = (-e.rate_eff * dt).exp();
    let (pu, pd) = (disc * p, disc * (1.0 - p));
    let kind = e.payoff_kind;
    let strike = e.strike;

    // spots[j] = S₀·u^{2j−i} on layer i
    let mut spots: Vec<f64> = (0..=steps).map(|j| spot_at(steps, j)).collect();
    let mut values: Vec<f64> = spots.iter().map(|&s| kind.intrinsic(s, strike)).collect();

    // Two adjacent early layers, interleaved, give the boundary estimate.
    let probe = (steps / 20).max(2);
    let mut probe_nodes: Vec<(f64, f64)> = Vec::new();

    for i in (0..steps).rev() {
        for j in 0..=i {
            spots[j] = if saturate { spot_at(i, j) } else { spots[j] * up };
            let hold = pu * values[j + 1] + pd * values[j];
            let exercise = kind.intrinsic(spots[j], strike);
            values[j] = hold.max(exercise);
        }
        if i == probe || i == probe - 1 {
            probe_nodes.extend(
                (0..=i).map(|j| (spots[j], values[j] - kind.intrinsic(spots[j], strike))),
            );
        }
    }

    Ok(Run {
        price: values[0],
        boundary: boundary_from_excess(kind, strike, probe_nodes),
    })
}

/// Near the boundary the time value behaves like `½Γ(S − S̄)²`, so its square
/// root is linear in log-spot; extrapolate it to zero from the two
/// continuation nodes closest to the exercise region.
fn boundary_from_excess(kind: OptionKind, strike: f64, mut nodes: Vec<(f64, f64)>) -> Option<f64> {
    if matches!(kind, OptionKind::Put) {
        nodes.iter_mut().for_each(|n| n.0 = -n.0);
    }
    // Ascending in distance towards the exercise region.
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tiny = 1e-12 * strike;
    let first_exercise = nodes
        .iter()
        .position(|&(s, v)| v <= tiny && kind.intrinsic(s.abs(), strike) > 0.0)?;
    if first_exercise < 2 {
        return None;
    }
    let (s1, v1) = nodes[first_exercise - 2];
    let (s2, v2) = nodes[first_exercise - 1];
    if !(v1 > v2 && v2 > 0.0) {
        return None;
    }
    let (x1, x2) = (s1.abs().ln(), s2.abs().ln());
    let (r1, r2) = (v1.sqrt(), v2.sqrt());
    Some((x2 + (x2 - x1) * r2 / (r1 - r2)).exp())
}

/// Prices the equivalent perpetual by backward induction to `cfg.horizon`,
/// and checks that halving the step count moves the price by at most
/// `cfg.convergence` (relative).
pub fn lattice_price(e: &EquivalentPerpetual, m: &MarketParams, cfg: &LatticeConfig) -> Result<LatticeResult> {
    m.validate()?;
    cfg.validate()?;
    let fine = crr(e, m, cfg.horizon, cfg.steps)?;
    let coarse_steps = cfg.steps / 2;
    let coarse = crr(e, m, cfg.horizon, coarse_steps)?;
    let change = (fine.price - coarse.price).abs() / fine.price.abs().max(1e-12);
    if change > cfg.convergence {
        return Err(AmpoError::Convergence {
            steps: cfg.steps,
            coarse_steps,
            change,
            tolerance: cfg.convergence,
        });
    }
    let price = if cfg.richardson {
        2.0 * fine.price - coarse.price
    } else {
        fine.price
    };
    Ok(LatticeResult {
        price,
        coarse_price: coarse.price,
        boundary_estimate: fine.boundary,
    })
}

/// Lattice price of the equivalent perpetual against the closed form.
pub fn oracle_report(m: &MarketParams, c: &ContractParams, cfg: &LatticeConfig) -> Result<OracleReport> {
    let eq = to_equivalent_perpetual(c, m)?;
    let lattice = lattice_price(&eq, m, cfg)?;
    let analytic = price(m, c)?.premium;
    Ok(OracleReport {
        oracle_price: lattice.price,
        analytic_price: analytic,
        rel_error: (lattice.price - analytic).abs() / analytic.max(1e-12),
        boundary_estimate: lattice.boundary_estimate,
        analytic_boundary: exercise_boundary(m, c)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    pub spot: f64,
    /// `½σ²S²V'' + rSV' − (r+q)V`.
    pub residual: f64,
    /// `|residual| / ((r+q)·V)`.
    pub relative: f64,
}

pub fn pde_residual(m: &MarketParams, c: &ContractParams, spots: &[f64]) -> Result<Vec<PdeResidual>> {
    pde_residual_scaled(m, c, spots, 1.0)
}

/// Same as [`pde_residual`] with the premium (but not its derivatives)
/// multiplied by `premium_scale`; used to confirm the checker detects a
/// wrong value function.
pub fn pde_residual_scaled(
    m: &MarketParams,
    c: &ContractParams,
    spots: &[f64],
    premium_scale: f64,
) -> Result<Vec<PdeResidual>> {
    m.validate()?;
    c.validate()?;
    let boundary = exercise_boundary(m, c)?;
    let discount = m.rate + c.amort;
    spots
        .iter()
        .map(|&s| {
            let at = m.with_spot(s);
            at.validate()?;
            if !in_continuation(c.kind, s, boundary) {
                return Err(AmpoError::OutsideContinuation { spot: s, boundary });
            }
            let v = price(&at, c)?.premium * premium_scale;
            let d1 = delta(&at, c)?;
            let d2 = gamma(&at, c)?;
            let residual =
                0.5 * m.vol * m.vol * s * s * d2 + m.rate * s * d1 - discount * v;
            Ok(PdeResidual {
                spot: s,
                residual,
                relative: residual.abs() / (discount * v).abs().max(1e-300),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdMode {
    Central,
    /// One-sided; a negative `step` makes it a backward stencil.
    Forward,
}

/// Second-order-accurate difference stencils with step `step·|x|`
/// (`step` itself when `x == 0`).
pub fn finite_difference<F>(f: F, x: f64, order: FdOrder, mode: FdMode, step: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let h = if x == 0.0 { step } else { step * x.abs() };
    match (order, mode) {
        (FdOrder::First, FdMode::Central) => (f(x + h) - f(x - h)) / (2.0 * h),
        (FdOrder::Second, FdMode::Central) => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        (FdOrder::First, FdMode::Forward) => {
            (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
        }
        (FdOrder::Second, FdMode::Forward) => {
            (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub name: String,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl FdCheck {
    fn new(name: &str, analytic: f64, numeric: f64, tolerance: f64) -> Self {
        let rel_error = (analytic - numeric).abs() / analytic.abs().max(1e-12);
        Self {
            name: name.to_string(),
            analytic,
            numeric,
            rel_error,
            tolerance,
            passed: rel_error <= tolerance,
        }
    }
}

/// Chooses a stencil around `x` that stays on the continuation side of a
/// kink at `kink`: central if both neighbours are inside, else one-sided
/// pointing away from the kink, shrinking the step if even that crosses.
pub fn stencil_inside<P>(x: f64, step: f64, reach: f64, inside: P) -> (FdMode, f64)
where
    P: Fn(f64) -> bool,
{
    let h = step * x.abs();
    if inside(x - h) && inside(x + h) {
        return (FdMode::Central, step);
    }
    let sign = if inside(x + reach * h) { 1.0 } else { -1.0 };
    let mut s = step;
    while !inside(x + sign * reach * s * x.abs()) && s > 1e-12 {
        s *= 0.5;
    }
    (FdMode::Forward, sign * s)
}

/// Analytic delta, gamma and vega against finite differences of `price`.
pub fn fd_greek_checks(m: &MarketParams, c: &ContractParams, step: f64, tolerance: f64) -> Result<Vec<FdCheck>> {
    let boundary = exercise_boundary(m, c)?;
    let premium_at_spot = |s: f64| price(&m.with_spot(s), c).map(|q| q.premium).unwrap_or(f64::NAN);
    let spot_inside = |s: f64| in_continuation(c.kind, s, boundary);
    if !spot_inside(m.spot) {
        return Err(AmpoError::OutsideContinuation {
            spot: m.spot,
            boundary,
        });
    }
    let (mode, s) = stencil_inside(m.spot, step, 3.0, spot_inside);
    let fd_delta = finite_difference(premium_at_spot, m.spot, FdOrder::First, mode, s);
    let (mode2, s2) = stencil_inside(m.spot, step, 4.0, spot_inside);
    let fd_gamma = finite_difference(premium_at_spot, m.spot, FdOrder::Second, mode2, s2);

    let premium_at_vol = |v: f64| price(&m.with_vol(v), c).map(|q| q.premium).unwrap_or(f64::NAN);
    let vol_inside = |v: f64| {
        exercise_boundary(&m.with_vol(v), c)
            .map(|b| in_continuation(c.kind, m.spot, b))
            .unwrap_or(false)
    };
    let (mode_v, s_v) = stencil_inside(m.vol, step, 2.0, vol_inside);
    let fd_vega = finite_difference(premium_at_vol, m.vol, FdOrder::First, mode_v, s_v);

    Ok(vec![
        FdCheck::new("delta", delta(m, c)?, fd_delta, tolerance),
        FdCheck::new("gamma", gamma(m, c)?, fd_gamma, tolerance),
        FdCheck::new("vega", vega(m, c)?, fd_vega, tolerance),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ExponentForm;

    fn params_a() -> MarketParams {
        MarketParams::new(100.0, 0.05, 0.5).unwrap()
    }

    #[test]
    fn fd_polynomials() {
        let d = finite_difference(|x| x * x, 3.0, FdOrder::First, FdMode::Central, 1e-4);
        assert!((d - 6.0).abs() < 1e-9);
        let d2 = finite_difference(|x| x * x * x, 2.0, FdOrder::Second, FdMode::Central, 1e-4);
        assert!((d2 - 12.0).abs() < 1e-6);
        let fwd = finite_difference(|x| x * x, 3.0, FdOrder::First, FdMode::Forward, 1e-5);
        assert!((fwd - 6.0).abs() < 1e-8);
        let bwd = finite_difference(|x| x * x * x, 2.0, FdOrder::Second, FdMode::Forward, -1e-4);
        assert!((bwd - 12.0).abs() < 1e-5);
        let at0 = finite_difference(|x| x.sin(), 0.0, FdOrder::First, FdMode::Central, 1e-5);
        assert!((at0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fd_checks_pass_at_reference_point() {
        for c in [ContractParams::call(100.0, 0.1).unwrap(), ContractParams::put(100.0, 0.1).unwrap()] {
            for chk in fd_greek_checks(&params_a(), &c, 1e-4, 1e-5).unwrap() {
                assert!(chk.passed, "{chk:?}");
            }
        }
    }

    #[test]
    fn fd_checks_near_boundary_stay_one_sided() {
        let m = params_a();
        let put = ContractParams::put(100.0, 0.1).unwrap();
        let spot = 50.0 * (1.0 + 1e-5);
        let checks = fd_greek_checks(&m.with_spot(spot), &put, 1e-4, 1e-4).unwrap();
        assert!(checks[0].passed, "{:?}", checks[0]);
        assert!(checks[1].passed, "{:?}", checks[1]);
        // vega is O(ln(S/S̄)) here, so the σ-stencil truncation error is large
        // relative to it
        assert!(checks[2].rel_error < 5e-3, "{:?}", checks[2]);
    }

    #[test]
    fn residual_vanishes_for_ode_consistent_form() {
        let m = params_a();
        let c = ContractParams::put(100.0, 0.1).unwrap().with_form(ExponentForm::OdeConsistent);
        let spots: Vec<f64> = (0..20).map(|i| 50.0 + 10.0 * i as f64).collect();
        for r in pde_residual(&m, &c, &spots).unwrap() {
            assert!(r.relative < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn residual_of_published_form_is_rate_share() {
        // published exponents solve the ODE with discount 2r + q, leaving r·V
        let m = params_a();
        let c = ContractParams::put(100.0, 0.1).unwrap();
        let r = pde_residual(&m, &c, &[80.0]).unwrap()[0];
        let v = 100.0 * 100.0 / (4.0 * 80.0);
        assert!((r.residual - 0.05 * v).abs() < 1e-12);
        assert!((r.relative - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn residual_detects_scaled_premium() {
        let m = params_a();
        let c = ContractParams::call(100.0, 0.1).unwrap().with_form(ExponentForm::OdeConsistent);
        let r = pde_residual_scaled(&m, &c, &[100.0], 1.01).unwrap()[0];
        assert!((r.relative - 0.01 / 1.01).abs() < 1e-10);
        assert!(pde_residual(&m, &c, &[1e4]).is_err());
    }

    #[test]
    fn lattice_matches_textbook_equivalent() {
        let m = params_a();
        for kind in [OptionKind::Put, OptionKind::Call] {
            let c = ContractParams::new(100.0, 0.1, kind).unwrap().with_form(ExponentForm::OdeConsistent);
            let rep = oracle_report(&m, &c, &LatticeConfig::default()).unwrap();
            assert!(rep.rel_error < 5e-3, "{kind:?} {rep:?}");
            assert!(rep.boundary_rel_error().unwrap() < 0.02, "{kind:?} {rep:?}");
        }
    }

    #[test]
    fn lattice_exercise_region_is_intrinsic() {
        let m = params_a().with_spot(40.0);
        let eq = to_equivalent_perpetual(&ContractParams::put(100.0, 0.1).unwrap(), &m).unwrap();
        let res = lattice_price(&eq, &m, &LatticeConfig::default()).unwrap();
        assert!((res.price - 60.0).abs() / 60.0 < 1e-3);
    }

    #[test]
    fn under_resolved_lattice_fails_convergence() {
        let m = params_a();
        let eq = to_equivalent_perpetual(&ContractParams::put(100.0, 0.1).unwrap(), &m).unwrap();
        let cfg = LatticeConfig {
            steps: 200,
            convergence: 1e-4,
            ..LatticeConfig::default()
        };
        assert!(matches!(lattice_price(&eq, &m, &cfg), Err(AmpoError::Convergence { .. })));
    }

    #[test]
    fn horizon_rule() {
        assert_eq!(LatticeConfig::horizon_for(0.1), 200.0);
        assert_eq!(LatticeConfig::horizon_for(1.0), 50.0);
    }
}
