use octobench_core::generator::{cell_seed, expected_density, generate, pair_count, selected_pair_count, GeneratorParams};
use octobench_core::harness::HarnessConfig;
use octobench_core::Octagon;

#[test]
fn thousand_instances_over_the_default_grid() {
    let cfg = HarnessConfig::default();
    let mut count = 0;
    for rep in 0..38u64 {
        for &n in &cfg.n_set {
            for (di, &d) in cfg.density_set.iter().enumerate() {
                if count == 1000 {
                    break;
                }
                count += 1;
                let seed = cell_seed(cfg.base_seed.wrapping_add(rep), n, di);
                let g = generate::<Octagon>(&GeneratorParams::new(n, d, seed)).unwrap();
                let closed = g.state.close_full();
                assert!(!closed.is_bottom(), "n={n} D={d} seed={seed}");
                assert!(g.state.contains_point(&g.witness));
                assert!(closed.contains_point(&g.witness));
                let want = selected_pair_count(n, d) as f64 / pair_count(n) as f64;
                assert_eq!(g.state.achieved_density(), want);
                assert_eq!(want, expected_density(n, d));
            }
        }
    }
    assert_eq!(count, 1000);
}

#[test]
fn density_arithmetic_by_hand() {
    assert_eq!(pair_count(10), 45);
    assert_eq!(selected_pair_count(10, 0.5), 22);
    assert_eq!(selected_pair_count(25, 0.3), 90);
    assert_eq!(selected_pair_count(100, 0.7), 3465);
    assert_eq!(selected_pair_count(100, 0.1), 495);
}
