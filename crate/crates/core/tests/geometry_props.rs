mod common;

use lapbc_core::formal::SampledFunction;
use lapbc_core::geometry::{boundary_value, cheeger_bruteforce, lipschitz_check, path_metric, Ray};
use lapbc_core::graph::{build_family, Exhaustion, GraphGenerator, VertexId, WeightedGraph};
use proptest::prelude::*;
use rand::Rng;

use common::{fixed, random_graph, random_unit_graph, seeded, whole};

proptest! {
    #![proptest_config(fixed(64))]

    #[test]
    fn metric_axioms(seed in any::<u64>(), n in 2usize..30) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.15, true, false);
        let mut pick = || VertexId::Int(r.random_range(0..n as i64));
        let (x, y, z) = (pick(), pick(), pick());
        let d = |a: &VertexId, b: &VertexId| path_metric(&g, a, b, 10_000).unwrap();
        let (xy, yz, xz) = (d(&x, &y), d(&y, &z), d(&x, &z));
        prop_assert!(xy.exact && yz.exact && xz.exact);
        prop_assert!(xz.distance <= xy.distance + yz.distance + 1e-12);
        prop_assert_eq!(xy.distance == 0.0, x == y);
        prop_assert!((xy.distance - d(&y, &x).distance).abs() <= 1e-12 * xy.distance);
    }

    #[test]
    fn finitely_supported_functions_vanish_at_the_boundary(seed in any::<u64>(), support in 1usize..10) {
        // a path whose conductances grow like 4^n has finite length 2
        let v = (0..=40).map(|i| (VertexId::Int(i), 1.0, 0.0)).collect();
        let e = (0..40).map(|i| (VertexId::Int(i), VertexId::Int(i + 1), 4f64.powi(i as i32))).collect();
        let path = WeightedGraph::new(v, e).unwrap();
        let ray = Ray::new(&path, path.ids().to_vec()).unwrap();
        let mut r = seeded(seed);
        let u = SampledFunction::from_real(ray.vertices[..support].iter().map(|x| (x.clone(), r.random_range(-1.0..1.0))))
            .finitely_supported();
        let bv = boundary_value(&u, &ray).unwrap();
        prop_assert_eq!(bv.value, 0.0);
        prop_assert!(bv.certificate_holds);
    }

    #[test]
    fn lipschitz_bound_for_finite_energy(seed in any::<u64>(), n in 3usize..25) {
        let mut r = seeded(seed);
        let g = random_graph(&mut r, n, 0.15, true, false);
        let u = SampledFunction::from_real(g.ids().iter().map(|x| (x.clone(), r.random_range(-1.0..1.0))));
        let pairs: Vec<(VertexId, VertexId)> = (0..10)
            .map(|_| (VertexId::Int(r.random_range(0..n as i64)), VertexId::Int(r.random_range(0..n as i64))))
            .filter(|(a, b)| a != b)
            .collect();
        let ex = Exhaustion::radii(&g, &g.root(), n);
        let rep = lipschitz_check(&g, &u, &pairs, &ex, 10_000).unwrap();
        prop_assert!(rep.energy_stabilized);
        prop_assert!(rep.max_ratio <= 1.0 + 1e-9);
        prop_assert_eq!(rep.violations, 0);
    }

    #[test]
    fn cheeger_connected_restriction_is_exact(seed in any::<u64>(), n in 2usize..13) {
        let mut r = seeded(seed);
        let g = random_unit_graph(&mut r, n, 0.3);
        let a = cheeger_bruteforce(&g, &whole(&g), true).unwrap();
        let b = cheeger_bruteforce(&g, &whole(&g), false).unwrap();
        prop_assert_eq!(a.alpha, b.alpha);
    }
}

#[test]
fn line_distances_are_unit_steps() {
    let z = build_family("line-Z").unwrap();
    let d = path_metric(&z, &VertexId::Int(-3), &VertexId::Int(4), 1000).unwrap();
    assert!(d.exact);
    assert_eq!(d.distance, 7.0);
    assert_eq!(z.root(), VertexId::Int(0));
}
