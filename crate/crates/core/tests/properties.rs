use ampo::analysis::{sign_changes, Strategy as Position, StrategySpec, Study, DEFAULT_BUDGET};
use ampo::greeks::{dated_bs_call, delta, gamma, greeks, vega};
use ampo::oracle::pde_residual;
use ampo::statics::{d_boundary_dq, d_premium_dq};
use ampo::{exercise_boundary, price, ContractParams, ExponentForm, MarketParams, OptionKind, Regime};
use proptest::prelude::*;

const K: f64 = 100.0;

fn kind() -> impl Strategy<Value = OptionKind> {
    prop_oneof![Just(OptionKind::Call), Just(OptionKind::Put)]
}

fn form() -> impl Strategy<Value = ExponentForm> {
    prop_oneof![Just(ExponentForm::Published), Just(ExponentForm::OdeConsistent)]
}

/// (market at S = K, contract) with r ∈ [0, 0.1], σ ∈ [0.1, 0.8], q ∈ [0.01, 1].
fn model() -> impl Strategy<Value = (MarketParams, ContractParams)> {
    (0.0..0.10f64, 0.10..0.80f64, 0.01..1.0f64, kind(), form()).prop_map(|(r, s, q, k, f)| {
        (
            MarketParams::new(K, r, s).unwrap(),
            ContractParams::new(K, q, k).unwrap().with_form(f),
        )
    })
}

/// Spot `S̄·e^{∓u}` inside the continuation region.
fn inside(m: &MarketParams, c: &ContractParams, u: f64) -> MarketParams {
    let b = exercise_boundary(m, c).unwrap();
    m.with_spot(match c.kind {
        OptionKind::Call => b * (-u).exp(),
        OptionKind::Put => b * u.exp(),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn premium_within_no_arbitrage_bounds((m, c) in model(), log_spot in (0.2f64).ln()..(5.0f64).ln()) {
        let m = m.with_spot(K * log_spot.exp());
        let v = price(&m, &c).unwrap().premium;
        let intrinsic = c.kind.intrinsic(m.spot, K);
        prop_assert!(v >= intrinsic - 1e-12 * K);
        match c.kind {
            OptionKind::Call => prop_assert!(v <= m.spot * (1.0 + 1e-12)),
            OptionKind::Put => prop_assert!(v <= K * (1.0 + 1e-12)),
        }
    }

    #[test]
    fn premium_monotone_in_spot((m, c) in model(), a in 0.2..5.0f64, b in 0.2..5.0f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let v_lo = price(&m.with_spot(K * lo), &c).unwrap().premium;
        let v_hi = price(&m.with_spot(K * hi), &c).unwrap().premium;
        match c.kind {
            OptionKind::Call => prop_assert!(v_hi >= v_lo),
            OptionKind::Put => prop_assert!(v_hi <= v_lo),
        }
    }

    #[test]
    fn value_matching_and_smooth_pasting((m, c) in model()) {
        let b = exercise_boundary(&m, &c).unwrap();
        let at = m.with_spot(b);
        let q = price(&at, &c).unwrap();
        prop_assert_eq!(q.regime, Regime::Continuation);
        prop_assert!(rel(q.premium, c.kind.intrinsic(b, K)) < 1e-12);
        prop_assert!((delta(&at, &c).unwrap() - c.kind.omega()).abs() < 1e-12);
    }

    #[test]
    fn delta_continuous_across_boundary((m, c) in model()) {
        let b = exercise_boundary(&m, &c).unwrap();
        for side in [1.0 - 1e-9, 1.0 + 1e-9] {
            let d = delta(&m.with_spot(b * side), &c).unwrap();
            prop_assert!((d - c.kind.omega()).abs() < 1e-6, "delta {} at {}·S̄", d, side);
        }
    }

    #[test]
    fn greek_signs_and_economic_theta((m, c) in model(), u in 0.01..1.5f64) {
        let m = inside(&m, &c, u);
        let g = greeks(&m, &c).unwrap();
        let v = price(&m, &c).unwrap().premium;
        match c.kind {
            OptionKind::Call => prop_assert!(g.delta > 0.0 && g.delta < 1.0),
            OptionKind::Put => prop_assert!(g.delta < 0.0 && g.delta > -1.0),
        }
        prop_assert!(g.gamma > 0.0);
        prop_assert!(g.vega > 0.0);
        prop_assert_eq!(g.theta_explicit, 0.0);
        prop_assert!(rel(g.theta_economic, -c.amort * v) < 1e-14);
    }

    #[test]
    fn exercise_region_is_flat((m, c) in model(), u in 0.01..1.5f64) {
        let b = exercise_boundary(&m, &c).unwrap();
        let m = m.with_spot(match c.kind {
            OptionKind::Call => b * u.exp(),
            OptionKind::Put => b * (-u).exp(),
        });
        let q = price(&m, &c).unwrap();
        prop_assert_eq!(q.regime, Regime::ExerciseNow);
        prop_assert_eq!(q.premium, c.kind.intrinsic(m.spot, K));
        prop_assert_eq!(gamma(&m, &c).unwrap(), 0.0);
        prop_assert_eq!(vega(&m, &c).unwrap(), 0.0);
    }

    #[test]
    fn statics_signs((m, c) in model(), u in 0.01..1.5f64) {
        let m = inside(&m, &c, u);
        prop_assert!(d_premium_dq(&m, &c).unwrap() < 0.0);
        let db = d_boundary_dq(&m, &c).unwrap();
        match c.kind {
            OptionKind::Call => prop_assert!(db < 0.0),
            OptionKind::Put => prop_assert!(db > 0.0),
        }
    }

    #[test]
    fn ode_consistent_form_solves_pricing_ode((m, c) in model(), u in 0.0..2.0f64) {
        let c = c.with_form(ExponentForm::OdeConsistent);
        let b = exercise_boundary(&m, &c).unwrap();
        let spot = match c.kind {
            OptionKind::Call => b * (-u).exp(),
            OptionKind::Put => b * u.exp(),
        };
        let r = pde_residual(&m, &c, &[spot]).unwrap();
        prop_assert!(r[0].relative < 1e-8, "relative residual {}", r[0].relative);
    }

    #[test]
    fn effective_maturity_reprices_the_perpetual(r in 0.0..0.10f64, s in 0.1..0.8f64, q in 0.01..2.0f64) {
        let m = MarketParams::new(K, r, s).unwrap();
        let study = Study::new(m, K).unwrap();
        let t = study.effective_maturity(q).unwrap();
        let target = price(&m, &ContractParams::call(K, q).unwrap()).unwrap().premium;
        let dated = dated_bs_call(&m, K, t.effective_maturity).unwrap().premium;
        prop_assert!((dated - target).abs() < 1e-8);
        prop_assert!(rel(t.effective_notional, (-q * t.effective_maturity).exp()) < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn optimum_stable_under_grid_doubling(r in 0.02..0.08f64, s in 0.3..0.7f64) {
        let study = Study::new(MarketParams::new(K, r, s).unwrap(), K).unwrap();
        let spec = StrategySpec::new(Position::PutOnly, DEFAULT_BUDGET).unwrap();
        let coarse = study.optimize_q_with_scan(&spec, (0.01, 1.0), 200).unwrap();
        let fine = study.optimize_q_with_scan(&spec, (0.01, 1.0), 400).unwrap();
        prop_assert!((coarse.q_star - fine.q_star).abs() < 1e-4);
    }

    #[test]
    fn put_positional_vega_unimodal(r in 0.02..0.08f64, s in 0.3..0.7f64) {
        let study = Study::new(MarketParams::new(K, r, s).unwrap(), K).unwrap();
        let spec = StrategySpec::new(Position::PutOnly, DEFAULT_BUDGET).unwrap();
        let curve = study.optimize_q(&spec, (0.01, 1.0)).unwrap().curve;
        let values: Vec<f64> = curve.iter().map(|p| p.1).collect();
        prop_assert!(sign_changes(&values) <= 1);
    }
}
