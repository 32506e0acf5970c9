use fujiwara::linalg::{dot, norm2, DEFAULT_TOL};
use fujiwara::optimize::GradientResult;
use fujiwara::spectral::{first_eigen, laplacian_spectrum, zero_mode};
use fujiwara::surgery::{cut_monotonicity_check, extension_quotients};
use fujiwara::{
    assemble_laplacian, fujiwara_weights, lambda1, lambda1_gradient, lambda1_normalized, rayleigh_quotient, Edge,
    Error, Graph, LengthFunction,
};
use proptest::prelude::*;

/// Connected graph: a random spanning tree plus extra edges, with lengths.
fn instance(max_n: usize) -> impl Strategy<Value = (Graph, LengthFunction)> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (2..=n).map(|v| 1..v).collect();
            let extra = proptest::collection::vec(any::<bool>(), n * (n - 1) / 2);
            let lengths = proptest::collection::vec(0.1f64..10.0, n * (n - 1) / 2);
            (Just(n), parents, extra, lengths)
        })
        .prop_map(|(n, parents, extra, lengths)| {
            let mut pairs: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 2)).collect();
            let mut k = 0;
            for u in 1..=n {
                for v in u + 1..=n {
                    if extra[k] && !pairs.contains(&(u, v)) {
                        pairs.push((u, v));
                    }
                    k += 1;
                }
            }
            let g = Graph::new(n, &pairs).unwrap();
            let l = LengthFunction::from_values(&g, &lengths[..g.edge_count()]).unwrap();
            (g, l)
        })
}

fn cyclic_instance(max_n: usize) -> impl Strategy<Value = (Graph, LengthFunction)> {
    instance(max_n).prop_filter("needs a cycle", |(g, _)| !g.is_tree())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn handshake((g, l) in instance(9)) {
        let w = fujiwara_weights(&g, &l).unwrap();
        prop_assert!((w.total_m0 - 2.0 * l.total()).abs() <= 1e-12 * w.total_m0);
    }

    #[test]
    fn zero_mode_is_annihilated((g, l) in instance(12)) {
        let lap = assemble_laplacian(&g, &l).unwrap();
        let x0 = zero_mode(&fujiwara_weights(&g, &l).unwrap().m0);
        prop_assert!(norm2(&lap.mul_vec(&x0)) <= 1e-10 * lap.frobenius_norm());
    }

    #[test]
    fn spectrum_is_nonnegative_with_simple_zero((g, l) in instance(9)) {
        let spec = laplacian_spectrum(&g, &l, DEFAULT_TOL).unwrap();
        let top = spec.largest();
        prop_assert!(spec.eigenvalues[0].abs() <= 1e-10 * top);
        prop_assert!(spec.eigenvalues[1] > 1e-10 * top);
    }

    #[test]
    fn lambda1_scales_inverse_square((g, l) in instance(9), c in 0.1f64..10.0) {
        let a = lambda1(&g, &l).unwrap();
        let b = lambda1(&g, &l.scaled(c)).unwrap();
        prop_assert!((b * c * c - a).abs() <= 1e-9 * a);
        let fa = lambda1_normalized(&g, &l).unwrap();
        let fb = lambda1_normalized(&g, &l.scaled(c)).unwrap();
        prop_assert!((fa - fb).abs() <= 1e-9 * fa);
    }

    #[test]
    fn relabeling_preserves_spectrum((g, l) in instance(8), rot in 0usize..8) {
        let n = g.n();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n + 1).collect();
        let h = g.relabel(&perm).unwrap();
        let lh: LengthFunction = l.iter().map(|(e, x)| (Edge::new(perm[e.u - 1], perm[e.v - 1]), x)).collect();
        let a = laplacian_spectrum(&g, &l, DEFAULT_TOL).unwrap().eigenvalues;
        let b = laplacian_spectrum(&h, &lh, DEFAULT_TOL).unwrap().eigenvalues;
        let scale = a.last().copied().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn rayleigh_bounded_below_by_lambda1((g, l) in instance(8), raw in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let w = fujiwara_weights(&g, &l).unwrap();
        let mut phi = raw[..g.n()].to_vec();
        // project onto the m0-orthogonal complement of constants
        let mean = dot(&w.m0, &phi) / w.total_m0;
        phi.iter_mut().for_each(|x| *x -= mean);
        match rayleigh_quotient(&g, &l, &phi) {
            Ok(r) => prop_assert!(r.value >= lambda1(&g, &l).unwrap() * (1.0 - 1e-10)),
            Err(e) => prop_assert_eq!(e, Error::ZeroFunction),
        }
    }

    #[test]
    fn cut_never_raises_lambda1((g, l) in cyclic_instance(8), pick in any::<prop::sample::Index>()) {
        let options: Vec<(usize, Edge)> = (1..=g.n())
            .filter(|&v| g.degree(v) >= 2)
            .flat_map(|v| g.incident_edges(v).into_iter().map(move |e| (v, e)))
            .collect();
        let (at, keep) = options[pick.index(options.len())];
        match cut_monotonicity_check(&g, &l, at, keep) {
            Ok(c) => prop_assert!(c.after <= c.before + 1e-10 * c.before, "{:?}", c),
            Err(e) => {
                let invalid = matches!(e, Error::InvalidCut { .. });
                prop_assert!(invalid);
            }
        }
    }

    #[test]
    fn extension_identity((g, l) in cyclic_instance(8), raw in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let w = fujiwara_weights(&g, &l).unwrap();
        let mut phi = raw[..g.n()].to_vec();
        let mean = dot(&w.m0, &phi) / w.total_m0;
        phi.iter_mut().for_each(|x| *x -= mean);
        prop_assume!(norm2(&phi) > 1e-6);
        let at = (1..=g.n()).find(|&v| g.degree(v) >= 2).unwrap();
        for keep in g.incident_edges(at) {
            if let Ok((a, b)) = extension_quotients(&g, &l, at, keep, &phi) {
                prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value.max(1.0));
                prop_assert!((a.weighted_sum - b.weighted_sum).abs() <= 1e-12 * a.weighted_abs_sum);
            }
        }
    }

    #[test]
    fn gradient_scale_identity((g, l) in instance(8)) {
        if let GradientResult::Simple(gr) = lambda1_gradient(&g, &l).unwrap() {
            let lens = l.values_for(&g).unwrap();
            prop_assert!((dot(&lens, &gr.derivatives) + 2.0 * gr.lambda1).abs() <= 1e-6 * gr.lambda1);
        }
    }

    #[test]
    fn eigenfunction_normalization((g, l) in instance(8)) {
        let fe = first_eigen(&g, &l).unwrap();
        let w = fujiwara_weights(&g, &l).unwrap();
        let mass: f64 = w.m0.iter().zip(&fe.eigenfunction).map(|(m, p)| m * p * p).sum();
        prop_assert!((mass - 1.0).abs() <= 1e-12);
        prop_assert!(dot(&w.m0, &fe.eigenfunction).abs() <= 1e-10);
    }
}
