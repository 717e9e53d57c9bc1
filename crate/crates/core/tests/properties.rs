use gasket_core::edge::delta_at_vertex;
use gasket_core::energy::{cell_energy, cell_ratio, corner_limit, kusuoka_cell, scan_levels};
use gasket_core::{Dim, ExactContext, FloatContext, Rational, Scalar, Vector, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vectors(seed: u64, size: usize, count: usize) -> Vec<Vector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Vector::new((0..size).map(|_| rng.gen_range(-5.0..5.0)).collect())).collect()
}

fn level_extremes(n: usize, depth: usize, seed: u64) {
    let ctx = FloatContext::build(n).unwrap();
    let vectors = random_vectors(seed, n + 1, 4);
    let scan = scan_levels(&ctx, &Word::empty(ctx.dim()), &vectors, depth).unwrap();
    for (v, (mins, maxs)) in scan.min_level.iter().zip(&scan.max_level).enumerate() {
        for w in mins.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "N={n}, vector {v}: min rose {} -> {}", w[0], w[1]);
        }
        for w in maxs.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-12), "N={n}, vector {v}: max fell {} -> {}", w[0], w[1]);
        }
        assert!(mins[depth] < 0.01, "N={n}, vector {v}: min over W_{depth} is {}", mins[depth]);
        assert!(maxs[depth] >= maxs[0] && maxs[0] > 0.0);
    }
}

#[test]
fn level_minimum_drops_below_threshold_n2() {
    level_extremes(2, 14, 21);
}

#[test]
fn level_minimum_drops_below_threshold_n3() {
    level_extremes(3, 11, 22);
}

#[test]
fn level_maximum_over_deep_words_n2() {
    let ctx = FloatContext::build(2).unwrap();
    let vectors = random_vectors(23, 3, 3);
    let scan = scan_levels(&ctx, &Word::empty(ctx.dim()), &vectors, 12).unwrap();
    for (maxs, u) in scan.max_level.iter().zip(&vectors) {
        println!("max ratio by level: {:?}", maxs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>());
        assert!(maxs[12] <= u.norm_sq());
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=n + 1, 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_and_float_agree(
        n in 2usize..=4,
        raw in prop::collection::vec(-20i64..=20, 5),
        symbols in word_strategy(4, 25),
        i in 1usize..=3,
        j in 1usize..=3,
    ) {
        let exact = ExactContext::build(n).unwrap();
        let float = FloatContext::build(n).unwrap();
        let dim = Dim::new(n).unwrap();
        let symbols: Vec<usize> = symbols.into_iter().map(|k| 1 + (k - 1) % (n + 1)).collect();
        let w = Word::new(dim, symbols).unwrap();
        let ue: Vector<Rational> = Vector::new(raw[..=n].iter().map(|&x| Rational::from_i64(x)).collect());
        let uf = ue.to_f64();
        prop_assume!(ue.iter().any(|x| *x != ue[0]));

        prop_assert!(close(cell_ratio(&exact, &ue, &w).unwrap().to_f64(), cell_ratio(&float, &uf, &w).unwrap()));
        prop_assert!(close(cell_energy(&exact, &ue, &w).unwrap().to_f64(), cell_energy(&float, &uf, &w).unwrap()));
        prop_assert!(close(kusuoka_cell(&exact, &w).unwrap().to_f64(), kusuoka_cell(&float, &w).unwrap()));
        prop_assert!(close(
            delta_at_vertex(&exact, &ue, &w, i, j).unwrap().to_f64(),
            delta_at_vertex(&float, &uf, &w, i, j).unwrap()
        ));
        let le = corner_limit(&exact, &ue, &w, i).unwrap();
        let lf = corner_limit(&float, &uf, &w, i).unwrap();
        prop_assert!(close(le.value.to_f64(), lf.value));
    }
}
