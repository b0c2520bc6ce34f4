use graphonkit_core::cutnorm::{self, cut_matrix_exact, cut_norm_exact, cut_norm_heuristic};
use graphonkit_core::exact::{ExactStepGraphon, Q};
use graphonkit_core::metrics::{self, Metric, Mode, Options};
use graphonkit_core::ops;
use graphonkit_core::sampler::{self, GraphMode};
use graphonkit_core::{Coupling, Mass, StepGraphon};
use proptest::prelude::*;

fn symmetric(k: usize, flat: Vec<f64>) -> Vec<f64> {
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            v[i * k + j] = flat[i * k + j];
            v[j * k + i] = flat[i * k + j];
        }
    }
    v
}

fn graphon(lo: f64, hi: f64, max_k: usize) -> impl Strategy<Value = StepGraphon> {
    (1..=max_k).prop_flat_map(move |k| {
        (prop::collection::vec(0.05f64..2.0, k), prop::collection::vec(lo..hi, k * k), prop::bool::ANY).prop_map(
            move |(w, v, inf)| {
                let ambient = if inf { Mass::Infinite } else { Mass::Finite(w.iter().sum::<f64>() + 0.5) };
                StepGraphon::from_flat(w, symmetric(k, v), ambient).unwrap()
            },
        )
    })
}

fn integer_graphon(max_k: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (1..=max_k).prop_flat_map(|k| {
        (prop::collection::vec(1i64..5, k), prop::collection::vec(-4i64..5, k * k)).prop_map(move |(w, v)| {
            let mut s = vec![0; k * k];
            for i in 0..k {
                for j in i..k {
                    s[i * k + j] = v[i * k + j];
                    s[j * k + i] = v[i * k + j];
                }
            }
            (w, s)
        })
    })
}

/// Maximum of `|Σ_{i∈S, j∈T} a_ij|` over all subset pairs, in rationals.
fn naive_rational(a: &[Q], k: usize) -> Q {
    let mut best = Q::from_integer(0);
    for s in 0u32..(1 << k) {
        for t in 0u32..(1 << k) {
            let mut acc = Q::from_integer(0);
            for i in (0..k).filter(|i| s >> i & 1 == 1) {
                for j in (0..k).filter(|j| t >> j & 1 == 1) {
                    acc += a[i * k + j];
                }
            }
            let abs = if acc < Q::from_integer(0) { -acc } else { acc };
            if abs > best {
                best = abs;
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gray_walk_matches_naive_enumeration((w, v) in integer_graphon(5)) {
        let k = w.len();
        let a: Vec<Q> = (0..k * k).map(|ij| Q::from_integer((w[ij / k] * w[ij % k] * v[ij]) as i128)).collect();
        prop_assert_eq!(cutnorm::cut_norm_rational(&a, k), naive_rational(&a, k));
        let ints: Vec<i128> = a.iter().map(|x| *x.numer()).collect();
        prop_assert_eq!(Q::from_integer(cut_matrix_exact(&ints, k).value), naive_rational(&a, k));
    }

    #[test]
    fn cut_norm_below_l1(w in graphon(-3.0, 3.0, 7)) {
        let c = cut_norm_exact(&w).unwrap().value;
        prop_assert!(c <= w.l1_norm() + 1e-12);
        prop_assert!(c >= w.integral().abs() - 1e-12);
    }

    #[test]
    fn nonnegative_cut_norm_is_l1(w in graphon(0.0, 3.0, 7)) {
        let c = cut_norm_exact(&w).unwrap().value;
        prop_assert!((c - w.l1_norm()).abs() <= 1e-12 * w.l1_norm().max(1.0));
        prop_assert_eq!(cutnorm::cut_norm_nonneg(&w).unwrap(), w.l1_norm());
    }

    #[test]
    fn cut_norm_is_homogeneous(w in graphon(-2.0, 2.0, 6), c in -4.0f64..4.0) {
        let a = cut_norm_exact(&w.scale_values(c)).unwrap().value;
        let b = c.abs() * cut_norm_exact(&w).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn witness_reproduces_value(w in graphon(-2.0, 2.0, 8)) {
        let r = cut_norm_exact(&w).unwrap();
        prop_assert_eq!(cutnorm::bilinear(&w, &r.witness_x, &r.witness_y).abs(), r.value);
    }

    #[test]
    fn heuristic_is_a_lower_bound(w in graphon(-2.0, 2.0, 8), seed in 0u64..1000) {
        let h = cut_norm_heuristic(&w, 4, seed).unwrap();
        prop_assert!(h.value <= cut_norm_exact(&w).unwrap().value + 1e-12);
        prop_assert_eq!(cutnorm::bilinear(&w, &h.witness_x, &h.witness_y).abs(), h.value);
    }

    #[test]
    fn trivial_extension_is_neutral(w in graphon(-2.0, 2.0, 6), extra in 0.1f64..5.0) {
        let e = w.trivial_extension(Mass::Finite(extra));
        prop_assert_eq!(cut_norm_exact(&e).unwrap().value, cut_norm_exact(&w).unwrap().value);
        prop_assert_eq!(e.l1_norm(), w.l1_norm());
        prop_assert_eq!(e.integral(), w.integral());
        let (a, b) = (e.lp_norm(2.5).unwrap(), w.lp_norm(2.5).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn splitting_a_block_is_neutral(w in graphon(0.0, 1.0, 5), alpha in 0.05f64..0.95) {
        let s = w.split_block(0, alpha).unwrap();
        let (a, b) = (cut_norm_exact(&s).unwrap().value, cut_norm_exact(&w).unwrap().value);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        let (a, b) = (ops::entropy(&s).unwrap(), ops::entropy(&w).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        let (a, b) = (s.lp_norm(3.0).unwrap(), w.lp_norm(3.0).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn stretch_scales_norms(w in graphon(-2.0, 2.0, 6), u in 0.01f64..100.0) {
        let s = ops::stretch(&w, u).unwrap();
        prop_assert!((s.l1_norm() - u * w.l1_norm()).abs() <= 1e-12 * (u * w.l1_norm()).max(1.0));
        let (a, b) = (cut_norm_exact(&s).unwrap().value, u * cut_norm_exact(&w).unwrap().value);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn stretches_compose(w in graphon(-2.0, 2.0, 5), u in 0.1f64..10.0, v in 0.1f64..10.0) {
        let a = ops::stretch(&ops::stretch(&w, u).unwrap(), v).unwrap();
        let b = ops::stretch(&w, u * v).unwrap();
        for (x, y) in a.weights().iter().zip(b.weights()) {
            prop_assert!((x - y).abs() <= 1e-12 * y);
        }
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn normalized_graphons_have_unit_l1(w in graphon(-2.0, 2.0, 6)) {
        let n = ops::normalize(&w);
        if w.l1_norm() > 0.0 {
            prop_assert!((n.l1_norm() - 1.0).abs() <= 1e-12);
        }
        let again = ops::normalize(&n);
        prop_assert_eq!(again, n);
    }

    #[test]
    fn delta_1_dominates_cut_distance(a in graphon(-1.0, 1.0, 3), b in graphon(-1.0, 1.0, 3), seed in 0u64..100) {
        let opts = Options::with_mode(Mode::AlternatingLp, seed);
        let c = metrics::cut_distance(&a, &b, &opts).unwrap();
        let d = metrics::delta_1(&a, &b, &opts).unwrap();
        // The δ₁ coupling is admissible for the cut objective.
        let on_d = metrics::coupling_objective(
            &metrics::equalize_masses(&a, &b).w1,
            &metrics::equalize_masses(&a, &b).w2,
            &d.coupling,
            Metric::Cut,
            cutnorm::K_EXACT,
        ).unwrap().0;
        prop_assert!(on_d <= d.value + 1e-9);
        prop_assert!(c.lower <= c.value + 1e-12);
        prop_assert!(c.value >= (a.integral() - b.integral()).abs() - 1e-12);
    }

    #[test]
    fn self_distance_is_zero(w in graphon(-2.0, 2.0, 5), seed in 0u64..100) {
        let opts = Options::with_mode(Mode::AlternatingLp, seed);
        prop_assert_eq!(metrics::cut_distance(&w, &w, &opts).unwrap().value, 0.0);
        prop_assert_eq!(metrics::stretched_distance(&w, &w, Metric::Cut, &opts).unwrap().value, 0.0);
    }

    #[test]
    fn sampling_is_deterministic(w in graphon(0.0, 1.0, 4), t in 0.5f64..5.0, seed in any::<u64>()) {
        let a = sampler::sample_tilde_graph(&w, t, seed).unwrap();
        let b = sampler::sample_tilde_graph(&w, t, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let h = sampler::drop_isolated(&a);
        prop_assert_eq!(h.edges.len(), a.edges.len());
        prop_assert_eq!(sampler::drop_isolated(&h), h);
    }

    #[test]
    fn exact_and_float_integrals_agree((w, v) in integer_graphon(6)) {
        let k = w.len();
        let e = ExactStepGraphon::from_integers(w.clone(), 7, v.clone(), 3, None).unwrap();
        let f = e.to_step_graphon();
        let exact = e.integral().unwrap();
        let approx = *exact.numer() as f64 / *exact.denom() as f64;
        prop_assert!((f.integral() - approx).abs() <= 1e-12 * approx.abs().max(1.0));
        prop_assert_eq!(f.block_count(), k);
    }
}

#[test]
fn graph_graphons_are_stretches_of_each_other() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.random_range(1..=8usize);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.random::<f64>() < 0.5).collect();
        let p = sampler::graph_to_graphon(n, &edges, GraphMode::Probability).unwrap();
        let c = sampler::graph_to_graphon(n, &edges, GraphMode::Counting).unwrap();
        let d = metrics::stretched_distance(&p, &c, Metric::Cut, &Options::with_mode(Mode::AlternatingLp, 0)).unwrap();
        assert_eq!(d.value, 0.0);
    }
}

#[test]
fn identity_coupling_is_canonical() {
    let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]], Mass::Finite(1.0)).unwrap();
    let c = Coupling::northwest_corner(w.weights(), w.weights());
    let (v, exact) = metrics::coupling_objective(&w, &w, &c, Metric::Cut, cutnorm::K_EXACT).unwrap();
    assert_eq!(v, 0.0);
    assert!(exact);
}
