use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sync_geom::io::{format_potential, parse_potential};
use sync_geom::netgen::{error_ratio, random_edge_potential, random_vertex_potential, random_weighted_graph};
use sync_geom::numeric::orthogonality_defect;
use sync_geom::potentials::{edge_frustrations, gauge_act, project_to_orthogonal, Mat, VertexField};
use sync_geom::holonomy::is_synchronizable;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frustration_is_gauge_invariant(seed in any::<u64>(), n in 3usize..12, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_weighted_graph(n, n / 2, &mut rng);
        let rho = random_edge_potential(&g, d, &mut rng);
        let f = random_vertex_potential(n, d, &mut rng);
        let h = random_vertex_potential(n, d, &mut rng);
        // (f·h, gauge_h ρ) has the same per-edge frustration as (f, ρ) after relabelling frames
        let moved = gauge_act(&g, &h, &rho).unwrap();
        let fh = h.inverse().compose(&f).unwrap();
        let a = edge_frustrations(&g, &f, &rho).unwrap();
        let b = edge_frustrations(&g, &fh, &moved).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn synchronizability_is_gauge_invariant(seed in any::<u64>(), n in 3usize..10, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_weighted_graph(n, 3, &mut rng);
        let rho = random_edge_potential(&g, d, &mut rng);
        let h = random_vertex_potential(n, d, &mut rng);
        let a = is_synchronizable(&g, &rho, 1e-8).unwrap();
        let b = is_synchronizable(&g, &gauge_act(&g, &h, &rho).unwrap(), 1e-8).unwrap();
        prop_assert_eq!(a.0, b.0);
    }

    #[test]
    fn projection_lands_on_orthogonal_group(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_vertex_potential(1, d, &mut rng).block(0).into_owned();
        let noise = Mat::from_fn(d, d, |i, j| ((i * 7 + j * 3) as f64).sin() * 1e-3);
        let p = project_to_orthogonal(&(&q + noise)).unwrap();
        prop_assert!(orthogonality_defect(&p) <= 1e-12);
        prop_assert!((&p - &q).norm() <= 1e-2);
    }

    #[test]
    fn error_ratio_ignores_label_names(labels in proptest::collection::vec(0usize..3, 1..40), shift in 0usize..3) {
        let truth: Vec<usize> = (0..labels.len()).map(|i| i % 3).collect();
        let renamed: Vec<usize> = labels.iter().map(|&l| (l + shift) % 3).collect();
        let a = error_ratio(&labels, &truth, 3).unwrap();
        let b = error_ratio(&renamed, &truth, 3).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!((0.0..=1.0 - 1.0 / 3.0 + 1e-12).contains(&a));
    }

    #[test]
    fn potential_files_round_trip(seed in any::<u64>(), n in 2usize..15, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_weighted_graph(n, n, &mut rng);
        let rho = random_edge_potential(&g, d, &mut rng);
        let back = parse_potential(&format_potential(&g, &rho), "p", &g).unwrap();
        prop_assert_eq!(back, rho);
    }
}
