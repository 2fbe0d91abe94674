mod common;

use lapbc_core::completeness::{heat_mass, heat_mass_radial};
use lapbc_core::formal::SampledFunction;
use lapbc_core::graph::{build_family, combinatorial_ball, radial_reduce, Exhaustion, GraphGenerator, VertexId, WeightedGraph};
use lapbc_core::harmonic::{bvp_solve, orthogonality_check, radial_solve, resolvent_gap};
use proptest::prelude::*;
use rand::Rng;

use common::{fixed, random_graph, seeded};

proptest! {
    #![proptest_config(fixed(48))]

    #[test]
    fn bvp_respects_maximum_principle(seed in any::<u64>(), n in 3usize..40, radius in 1usize..4) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.12, true, true);
        let x = VertexId::Int(r.random_range(0..n as i64));
        let region = combinatorial_ball(&g, &x, radius);
        let data = SampledFunction::from_real(region.halo.iter().map(|y| (y.clone(), r.random_range(0.0..2.0))));
        let gmax = data.entries().map(|(_, v)| v.re).fold(0.0, f64::max);
        let sol = bvp_solve(&g, &region, &data).unwrap();
        prop_assert!(sol.residual <= 1e-10);
        prop_assert!(sol.values.iter().all(|&v| v >= 0.0 && v <= gmax * (1.0 + 1e-12)));

        // any interior test function is orthogonal to the solution
        let interior: Vec<VertexId> = region
            .vertices
            .iter()
            .filter(|y| g.neighbors(y).iter().all(|(z, _)| region.contains(z)))
            .cloned()
            .collect();
        if !interior.is_empty() {
            let v = SampledFunction::from_real(interior.iter().map(|y| (y.clone(), r.random_range(-1.0..1.0))));
            let rep = orthogonality_check(&g, &sol.extended(&data), &v).unwrap();
            prop_assert!(rep.holds, "pairing {}", rep.pairing);
        }
    }

    #[test]
    fn resolvent_gap_is_non_negative(seed in any::<u64>(), n in 3usize..30, beta in 0.2f64..3.0) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.12, true, true);
        let x = g.root();
        let ex = Exhaustion::radii(&g, &x, 3);
        let rep = resolvent_gap(&g, &ex, &x, beta, 1e-6).unwrap();
        prop_assert!(rep.levels.iter().all(|l| l.min >= -1e-12));
    }

    #[test]
    fn heat_mass_bounded_and_nondecreasing(seed in any::<u64>(), n in 3usize..40, t in 0.1f64..3.0) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.1, true, true);
        let x = g.root();
        let ex = Exhaustion::radii(&g, &x, 4);
        let rep = heat_mass(&g, &ex, t, &x).unwrap();
        for l in &rep.levels {
            prop_assert!(l.value >= 0.0 && l.value <= 1.0 + 1e-10);
        }
        for w in rep.levels.windows(2) {
            prop_assert!(w[1].value >= w[0].value - 1e-10);
        }
    }

    #[test]
    fn finite_graph_without_killing_keeps_mass(seed in any::<u64>(), n in 1usize..30, t in 0.1f64..5.0) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.15, true, false);
        let x = g.root();
        let ex = Exhaustion::radii(&g, &x, n);
        let rep = heat_mass(&g, &ex, t, &x).unwrap();
        prop_assert!((rep.levels.last().unwrap().value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn single_vertex_mass_is_one(m in 0.01f64..10.0, c in 0.0f64..10.0, t in 0.01f64..10.0) {
        let g = WeightedGraph::new(vec![(VertexId::Int(0), m, c)], vec![]).unwrap();
        let ex = Exhaustion::radii(&g, &VertexId::Int(0), 1);
        let rep = heat_mass(&g, &ex, t, &VertexId::Int(0)).unwrap();
        prop_assert!((rep.levels[0].value - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn radial_solutions_solve_the_reduced_equation() {
    for family in ["regular-tree:k=3", "radial-tree:d=3", "radial-tree:d=n+2", "radial-tree:d=2^(n+2)", "fm-tree:k=3,q=0.5"] {
        let g = build_family(family).unwrap();
        let p = radial_reduce(&g, &g.root(), 40).unwrap();
        let sol = radial_solve(&p).unwrap();
        assert!(sol.relative_residual <= 1e-10, "{family}: {}", sol.relative_residual);
        assert!(sol.log_values.windows(2).all(|w| w[1] > w[0]), "{family}");
    }
}

#[test]
fn radial_heat_mass_levels_are_monotone() {
    for family in ["radial-tree:d=3", "radial-tree:d=n+2", "regular-tree:k=3"] {
        let g = build_family(family).unwrap();
        let rep = heat_mass_radial(&g, &[2, 4, 6, 8, 10, 12], 1.0).unwrap();
        assert!(rep.monotone && rep.bounded, "{family}");
    }
}
