use balancekit::balancer::{raise_at, raising_phase, BalanceState, Discipline, Op, ScheduleKind, ScheduleSpec, StopRule};
use balancekit::diagnostics::{chart, phi, phi_delta, potential_series, raising_limit, AuditReport, SeriesOptions};
use balancekit::instances::random_strongly_connected;
use balancekit::GraphFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn audit_holds_along_random_raising_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = AuditReport::default();
    let mut states = 0;
    while states < 600 {
        let n = rng.gen_range(2..=12);
        let extra = rng.gen_range(0..=n * n / 3);
        let g: GraphFunction<f64> = random_strongly_connected(n, extra, -5.0, 5.0, &mut rng).unwrap();
        let spec = ScheduleSpec { kind: ScheduleKind::UniformRandom { seed: rng.gen() }, discipline: Discipline::TwoPhase };
        let (_, trace) = raising_phase(&g, &StopRule::new(1e-9, 200_000), spec).unwrap();
        let every = (trace.ops / 8).max(1);
        let series = potential_series(&trace, &g, every, &SeriesOptions::default()).unwrap();
        states += series.samples.len();
        total.merge(&series.audit);
    }
    for c in &total.checks {
        eprintln!("{:<36} checked {:>6} violations {:>3} min margin {:?}", c.name, c.checked, c.violations, c.min_margin);
    }
    assert!(total.passed(), "{:?}", total.failing());
}

fn graphs(max_n: usize, max_extra: usize) -> impl Strategy<Value = GraphFunction<f64>> {
    (1..=max_n, 0..=max_extra, any::<u64>()).prop_map(|(n, extra, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_strongly_connected(n, extra, -5.0, 5.0, &mut rng).unwrap()
    })
}

/// A graph after a few random raising steps, so that charts see
/// partially raised states as well as fresh inputs.
fn raised_states() -> impl Strategy<Value = GraphFunction<f64>> {
    (graphs(10, 20), proptest::collection::vec(any::<prop::sample::Index>(), 0..40)).prop_map(|(g, idx)| {
        let n = g.n();
        let mut st = BalanceState::new(g).unwrap();
        for i in idx {
            st.apply(i.index(n), Op::Raise);
        }
        st.into_graph()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn chart_identities(g in raised_states()) {
        let lim = raising_limit(&g, 1e-12).unwrap();
        let c = chart(&g, &lim).unwrap();
        let n = g.n() as f64;
        prop_assert!(c.residual <= 1e-9);
        for (id, (u, v, w)) in g.edges().enumerate() {
            prop_assert!((c.alpha_r.weight(id) - w - (c.y[u] - c.y[v])).abs() <= 1e-9);
        }
        prop_assert!(c.y_max.abs() <= 10.0 * c.oracle_epsilon);
        prop_assert!(c.psi >= c.h && c.h >= c.psi / n);
        let slack = c.slack();
        for (u, v, w) in g.edges() {
            if c.y[u] >= c.y[v] {
                prop_assert!(w - c.x[v] <= slack);
            }
        }
    }

    #[test]
    fn imbalanced_vertices_have_higher_neighbors(g in raised_states()) {
        let c = chart(&g, &raising_limit(&g, 1e-12).unwrap()).unwrap();
        for v in 0..g.n() {
            if c.rho[v] <= 0.0 {
                continue;
            }
            let found = g.in_edges(v).iter().any(|&a| {
                g.out_edges(v).iter().any(|&b| {
                    let (u, w) = (g.endpoints(a).0, g.endpoints(b).1);
                    c.y[v] + c.rho[v] / 2.0 <= (c.y[u] + c.y[w]) / 2.0 + c.slack()
                })
            });
            prop_assert!(found, "vertex {}", v);
        }
    }

    #[test]
    fn phi_drops_on_every_raise(g in graphs(6, 10), idx in proptest::collection::vec(any::<prop::sample::Index>(), 1..60)) {
        prop_assume!(phi(&g).is_some());
        let mut cur = g;
        for i in idx {
            let v = i.index(cur.n());
            let rho = cur.vertex_stats(v).unwrap().rho_raise;
            let before = phi(&cur).unwrap();
            let (next, _) = raise_at(&cur, v).unwrap();
            let d = phi_delta(&cur, &next).unwrap();
            prop_assert!(d <= -rho / 2.0 + 1e-9 * before.abs().max(1.0), "delta {} rho {}", d, rho);
            cur = next;
        }
    }
}
