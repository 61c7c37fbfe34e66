//! Cross-checks against the independent reference implementations in
//! `common`: graph reachability, scalar truth-table evaluation, tree-walk
//! regression evaluation, and exact rank-test enumeration.

mod common;

use cgp::bitword::BitWord;
use cgp::function_set::{BoolFn, FunctionSet};
use cgp::genotype::random_genotype;
use cgp::geometry::Geometry;
use cgp::problems::{
    make_boolean_problem, make_regression_problem, BooleanProblemName, Payload,
    RegressionProblemName,
};
use cgp::program::{decode, execute_boolean, execute_real};
use cgp::stats::mann_whitney_u;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn bool_fs() -> FunctionSet {
    FunctionSet::boolean(&[
        BoolFn::And,
        BoolFn::Or,
        BoolFn::Xor,
        BoolFn::Nor,
        BoolFn::AndNot,
    ])
}

#[test]
fn decode_matches_bfs_reachability() {
    let fs = bool_fs();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..2000 {
        let geo = Geometry::new(
            rng.gen_range(1..=4),
            rng.gen_range(1..=3),
            rng.gen_range(1..=32),
            2,
        );
        let g = random_genotype(&geo, &fs, &mut rng);
        let program = decode(&g, &fs).unwrap();
        let expected = common::bfs_active_set(&g, &fs);
        let actual: BTreeSet<usize> = program.active_set().into_iter().collect();
        assert_eq!(actual, expected);
    }
}

#[test]
fn bit_parallel_execution_matches_scalar_rows() {
    let fs = bool_fs();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let geo = Geometry::new(3, 2, 12, 2);
    let rows = 1usize << geo.num_inputs;
    let input_words: Vec<BitWord> = (0..geo.num_inputs)
        .map(|i| BitWord::from_fn(rows, |r| (r >> i) & 1 == 1))
        .collect();
    for _ in 0..500 {
        let g = random_genotype(&geo, &fs, &mut rng);
        let program = decode(&g, &fs).unwrap();
        let words = execute_boolean(&program, &fs, &input_words).unwrap();
        for r in 0..rows {
            let input_row: Vec<bool> = (0..geo.num_inputs).map(|i| (r >> i) & 1 == 1).collect();
            let scalar = common::scalar_eval_bool(&g, &fs, &input_row);
            for (o, word) in words.iter().enumerate() {
                assert_eq!(word.get(r), scalar[o], "row {r} output {o}");
            }
        }
    }
}

#[test]
fn boolean_fitness_matches_scalar_bit_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for (name, row_fn) in [
        (
            BooleanProblemName::Adder2,
            (|r: usize| (r & 1) + ((r >> 1) & 1) + ((r >> 2) & 1)) as fn(usize) -> usize,
        ),
        (BooleanProblemName::Mul2, |r: usize| {
            (r & 0b11) * ((r >> 2) & 0b11)
        }),
        (BooleanProblemName::Sub2, |r: usize| {
            let (a, b) = (r & 0b11, (r >> 2) & 0b11);
            ((4 + a - b) % 4) | (usize::from(a < b) << 2)
        }),
    ] {
        let problem = make_boolean_problem(name);
        for _ in 0..200 {
            let g = random_genotype(problem.geometry(), problem.function_set(), &mut rng);
            let fitness = problem.evaluate(&g).unwrap();
            let expected = common::scalar_bool_fitness(&g, problem.function_set(), row_fn);
            assert_eq!(fitness, expected as f64);
        }
    }
}

#[test]
fn real_execution_matches_tree_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let fs = cgp::problems::regression_function_set();
    let geo = Geometry::new(2, 1, 10, 2);
    for _ in 0..200 {
        let g = random_genotype(&geo, &fs, &mut rng);
        let program = decode(&g, &fs).unwrap();
        for _ in 0..100 {
            let point = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let ours = execute_real(&program, &fs, &point).unwrap()[0];
            let theirs = common::tree_walk_real(&g, &fs, &point)[0];
            if ours.is_finite() && theirs.is_finite() {
                let scale = ours.abs().max(theirs.abs()).max(1.0);
                assert!(
                    (ours - theirs).abs() / scale < 1e-12,
                    "ours {ours} oracle {theirs}"
                );
            } else {
                assert_eq!(ours.is_nan(), theirs.is_nan());
                if !ours.is_nan() {
                    assert_eq!(ours, theirs);
                }
            }
        }
    }
}

#[test]
fn regression_fitness_matches_tree_walk_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let problem = make_regression_problem(RegressionProblemName::Koza2, &mut rng);
    let points = match problem.payload() {
        Payload::Data(d) => d.points.clone(),
        _ => unreachable!(),
    };
    for _ in 0..300 {
        let g = random_genotype(problem.geometry(), problem.function_set(), &mut rng);
        let fitness = problem.evaluate(&g).unwrap();
        let mut expected = 0.0f64;
        let mut saw_nonfinite = false;
        for (xs, t) in &points {
            let v = common::tree_walk_real(&g, problem.function_set(), xs)[0];
            if !v.is_finite() {
                saw_nonfinite = true;
                break;
            }
            expected += (v - t).abs();
        }
        if saw_nonfinite {
            assert_eq!(fitness, f64::INFINITY);
        } else {
            let scale = expected.max(1.0);
            assert!(
                (fitness - expected).abs() / scale < 1e-9,
                "fitness {fitness} oracle {expected}"
            );
        }
    }
}

#[test]
fn normal_approximation_close_to_exact_at_ten_vs_ten() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..30 {
        let a: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..1.3)).collect();
        // min sample size 10 > 8, so the implementation takes the normal path
        let (_, approx) = mann_whitney_u(&a, &b);
        let exact = common::exact_mann_whitney_p(&a, &b);
        assert!(
            (approx - exact).abs() < 0.02,
            "approx {approx} exact {exact}"
        );
    }
}

#[test]
fn exact_path_matches_independent_enumeration_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..100 {
        let na = rng.gen_range(2..=8);
        let nb = rng.gen_range(2..=10);
        // coarse integer values force ties
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..5) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..5) as f64).collect();
        let (_, p) = mann_whitney_u(&a, &b);
        let exact = common::exact_mann_whitney_p(&a, &b);
        assert!((p - exact).abs() < 1e-9, "p {p} exact {exact} a={a:?} b={b:?}");
    }
}
