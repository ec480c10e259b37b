use proptest::prelude::*;
use shockcost_core::flux::ClosureEntropy;
use shockcost_core::riemann::{entropic_riemann, split_riemann, tangency_point};
use shockcost_core::tracker::{check_weak_solution, evolve, h_cost};
use shockcost_core::*;

fn profile(center: f64, amp: f64, max_pieces: usize) -> impl Strategy<Value = PiecewiseConstantProfile> {
    (1..=max_pieces)
        .prop_flat_map(move |n| {
            (
                proptest::collection::btree_set(0u32..1000, n),
                proptest::collection::vec(-1.0..1.0f64, n),
            )
        })
        .prop_map(move |(xs, vs)| {
            let bps = xs.into_iter().map(|k| k as f64 / 1000.0).collect();
            let vals = vs.into_iter().map(|v| center + amp * v).collect();
            PiecewiseConstantProfile::new(bps, vals).unwrap()
        })
}

fn model(burgers: bool) -> FluxModel {
    if burgers {
        FluxModel::burgers()
    } else {
        FluxModel::cubic()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rho_is_antisymmetric(v in -1.0..1.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64, burgers: bool) {
        let m = model(burgers);
        prop_assert_eq!(m.rho(v, a, b), -m.rho(v, b, a));
    }

    #[test]
    fn burgers_downward_jumps_are_entropic(a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        let m = FluxModel::burgers();
        for k in 0..=1000 {
            let v = lo + (hi - lo) * k as f64 / 1000.0;
            prop_assert!(m.rho(v, lo, hi) <= 1e-15);
        }
    }

    #[test]
    fn production_rate_cross_identity(a in -0.9..0.9f64, b in -0.9..0.9f64, burgers: bool) {
        let m = model(burgers);
        let h = m.einstein_entropy(0.0).unwrap();
        let closed = m.h_production_rate(&h, a, b).unwrap();
        let quad = m.h_production_quadrature(&h, a, b).unwrap();
        prop_assert!((closed - quad).abs() <= m.quad_tol, "{} vs {}", closed, quad);
    }

    #[test]
    fn shock_cost_is_nonnegative(a in -1.0..1.0f64, b in -1.0..1.0f64, burgers: bool) {
        let m = model(burgers);
        let rate = m.shock_cost_rate(a, b).unwrap();
        prop_assert!(rate >= 0.0);
        if m.classify(a, b) == FrontKind::Entropic {
            prop_assert!(rate <= 1e-12);
        }
    }

    #[test]
    fn jv_rate_below_h_rate(a in -0.9..0.9f64, b in -0.9..0.9f64, m0 in -0.5..0.5f64, burgers: bool) {
        let m = model(burgers);
        let h = m.einstein_entropy(m0).unwrap();
        let jv = m.h_production_rate(&h, a, b).unwrap().max(0.0);
        prop_assert!(jv <= m.shock_cost_rate(a, b).unwrap() + 1e-12);
    }

    #[test]
    fn parity_is_an_involution(p in profile(0.0, 0.9, 6)) {
        let q = p.parity();
        prop_assert_eq!(&q.parity(), &p);
        prop_assert!((q.mean() - p.mean()).abs() <= 1e-15);
    }

    #[test]
    fn w_m_vanishes_only_on_constants(p in profile(0.1, 0.5, 5)) {
        let m = FluxModel::cubic();
        let w = p.w_m(&m, p.mean()).unwrap();
        prop_assert_eq!(w == 0.0, p.is_constant());
        prop_assert!(w >= 0.0);
    }

    #[test]
    fn normalization_is_idempotent(p in profile(0.0, 0.5, 6)) {
        let again = PiecewiseConstantProfile::new(p.breakpoints().to_vec(), p.values().to_vec()).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn l1_matches_sampling(p in profile(0.0, 0.5, 5), q in profile(0.0, 0.5, 5)) {
        let n = 100_000;
        let sampled: f64 = (0..n)
            .map(|k| {
                let x = (k as f64 + 0.5) / n as f64;
                (p.value_at(x) - q.value_at(x)).abs()
            })
            .sum::<f64>()
            / n as f64;
        prop_assert!((sampled - p.l1_distance(&q)).abs() <= 1e-4);
    }

    #[test]
    fn entropic_fans_cost_nothing(a in -0.9..0.9f64, b in -0.9..0.9f64, burgers: bool) {
        let m = model(burgers);
        let fan = entropic_riemann(&m, a, b, 0.05).unwrap();
        let nodes: Vec<f64> = {
            let mut v: Vec<f64> = core::iter::once(fan.left).chain(fan.fronts.iter().map(|f| f.right)).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let lin = m.linearized(&nodes).unwrap();
        for (l, r, s) in fan.jumps() {
            prop_assert!((s - lin.rankine_hugoniot(l, r)).abs() <= 1e-12);
            prop_assert!(lin.shock_cost_rate(l, r).unwrap() <= 10.0 * m.quad_tol);
        }
        prop_assert_eq!(fan.right(), b);
    }

    #[test]
    fn split_fans_follow_the_ladder(a in -0.45..0.45f64, b in -0.45..0.45f64, m_split in 2usize..12) {
        let m = FluxModel::cubic();
        let window = m.convexity_window(0.0, 400, 0.5).unwrap();
        let fan = split_riemann(&m, &window, a, b, m_split).unwrap();
        let u = tangency_point(&m, &window, a, b).unwrap();
        let mut last = f64::NEG_INFINITY;
        for (l, r, s) in fan.jumps() {
            prop_assert_eq!(s, m.rankine_hugoniot(l, r));
            prop_assert!(s > last);
            last = s;
            if m.classify(l, r) != FrontKind::Entropic {
                prop_assert!((r - l).abs() <= (b - u).abs() / m_split as f64 + 1e-15);
            }
        }
        prop_assert_eq!(fan.right(), b);
        for k in 0..=512 {
            let v = a + (u - a) * k as f64 / 512.0;
            prop_assert!(m.rho(v, u, a) <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolutions_conserve_mass(p in profile(0.0, 0.3, 4), burgers: bool, single: bool) {
        let m = model(burgers);
        let policy = if single { Policy::SingleShock } else { Policy::Entropic { mesh: 0.05 } };
        let sol = evolve(&m, &p, 0.5, &policy).unwrap();
        let r = check_weak_solution(&sol, 1e-12);
        prop_assert!(r.passes, "{:?}", r);
        let c = h_cost(&sol).unwrap();
        prop_assert!(c.jv <= c.total + 1e-9);
        if burgers {
            prop_assert!((c.jv - c.total).abs() <= 1e-9);
        }
    }

    #[test]
    fn reversal_is_an_involution(p in profile(0.0, 0.3, 4)) {
        let m = FluxModel::cubic();
        let sol = evolve(&m, &p, 0.5, &Policy::SingleShock).unwrap();
        let back = sol.reversed().reversed();
        prop_assert_eq!(back.slabs(), sol.slabs());
        prop_assert!(check_weak_solution(&sol.reversed(), 1e-12).passes);
    }

    #[test]
    fn signed_production_balances_entropy(p in profile(0.0, 0.3, 4), burgers: bool) {
        let m = model(burgers);
        let sol = evolve(&m, &p, 0.4, &Policy::SingleShock).unwrap();
        let c = h_cost(&sol).unwrap();
        let mean = p.mean();
        let delta = sol.final_profile().w_m(&m, mean).unwrap() - p.w_m(&m, mean).unwrap();
        prop_assert!((c.signed_total - delta).abs() <= 10.0 * m.quad_tol, "{} vs {}", c.signed_total, delta);
    }

    #[test]
    fn costs_add_under_concatenation(p in profile(0.0, 0.3, 3)) {
        let m = FluxModel::burgers();
        let a = evolve(&m, &p, 0.3, &Policy::SingleShock).unwrap();
        let b = evolve(&m, &a.final_profile(), 0.2, &Policy::SingleShock).unwrap();
        let joined = a.concat(&b).unwrap();
        let sum = h_cost(&a).unwrap().total + h_cost(&b).unwrap().total;
        prop_assert!((h_cost(&joined).unwrap().total - sum).abs() <= 1e-10);
    }

    #[test]
    fn split_evolution_counts_on_convex_windows(p in profile(0.35, 0.05, 4), m_split in 2usize..10, burgers: bool) {
        let m = model(burgers);
        let mean = p.mean();
        let s = constructions::split_evolution(&m, mean, &p, 1.0, m_split).unwrap();
        let n = s.discontinuities.max(1);
        prop_assert!(s.max_anti_entropic <= (2 * n - 1) * m_split);
        prop_assert!(check_weak_solution(&s.solution, 1e-12).passes);
    }

    #[test]
    fn split_evolution_does_not_expand(p in profile(0.0, 0.24, 4), m_split in 2usize..10) {
        let m = FluxModel::cubic();
        let shift = p.mean();
        let p = p.map_values(|v| v - shift);
        let s = constructions::split_evolution(&m, 0.0, &p, 1.0, m_split).unwrap();
        let a = p.sup_distance_to(0.0);
        for slab in s.solution.slabs() {
            prop_assert!(slab.end_profile().sup_distance_to(0.0) <= a);
        }
        prop_assert!(check_weak_solution(&s.solution, 1e-12).passes);
    }

    #[test]
    fn custom_entropy_matches_quadrature(a in -0.8..0.8f64, b in -0.8..0.8f64) {
        let m = FluxModel::cubic();
        // eta = v^4, q' = eta' f' = 4 v^3 (3 v^2 - 1)
        let pair = ClosureEntropy {
            h: |v: f64| v.powi(4),
            g: |v: f64| 2.0 * v.powi(6) - v.powi(4),
            h2: |v: f64| 12.0 * v * v,
        };
        let closed = m.h_production_rate(&pair, a, b).unwrap();
        let quad = m.h_production_quadrature(&pair, a, b).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-10);
    }
}

/// Around an inflection point the tangency fan emitted when an entropic
/// shock crosses a small step of another fan is one entropic front plus
/// `M` new steps, so the anti-entropic count can grow past `(2N - 1) M`.
#[test]
fn inflection_fans_can_exceed_the_count_bound() {
    let p = PiecewiseConstantProfile::new(
        vec![0.0, 0.001, 0.416],
        vec![0.2059683729012947, -0.2491394378516928, 0.10864400224197428],
    )
    .unwrap();
    let shift = p.mean();
    let p = p.map_values(|v| v - shift);
    let s = constructions::split_evolution(&FluxModel::cubic(), 0.0, &p, 1.0, 8).unwrap();
    assert_eq!(s.discontinuities, 3);
    assert!(s.max_anti_entropic > 5 * 8, "{}", s.max_anti_entropic);
    assert!(check_weak_solution(&s.solution, 1e-12).passes);
}
