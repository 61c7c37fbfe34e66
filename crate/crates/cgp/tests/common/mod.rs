//! Independent reference implementations used to cross-check the library.
//! Everything here works directly on raw genes with its own traversal and
//! evaluation logic, deliberately avoiding the library's decode/execute path.
//! Shared by several test targets; not every target uses every oracle.
#![allow(dead_code)]

use cgp::function_set::{FunctionSet, Primitive};
use cgp::genotype::Genotype;
use std::collections::{BTreeSet, VecDeque};

/// Breadth-first reachability from the output genes.
pub fn bfs_active_set(genotype: &Genotype, function_set: &FunctionSet) -> BTreeSet<usize> {
    let geo = genotype.geometry();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for o in 0..geo.num_outputs {
        let addr = genotype.output_address(o);
        if addr >= geo.num_inputs {
            queue.push_back(addr - geo.num_inputs);
        }
    }
    while let Some(node) = queue.pop_front() {
        if !seen.insert(node) {
            continue;
        }
        let arity = function_set.arity(genotype.function_of(node));
        for slot in 0..arity {
            let addr = genotype.connection_of(node, slot);
            if addr >= geo.num_inputs {
                queue.push_back(addr - geo.num_inputs);
            }
        }
    }
    seen
}

/// Scalar (one truth-table row at a time) evaluation by recursive descent
/// over the raw genes.
pub fn scalar_eval_bool(
    genotype: &Genotype,
    function_set: &FunctionSet,
    input_row: &[bool],
) -> Vec<bool> {
    fn eval(
        genotype: &Genotype,
        function_set: &FunctionSet,
        input_row: &[bool],
        addr: usize,
    ) -> bool {
        let geo = genotype.geometry();
        if addr < geo.num_inputs {
            return input_row[addr];
        }
        let node = addr - geo.num_inputs;
        let f = genotype.function_of(node);
        let a = eval(genotype, function_set, input_row, genotype.connection_of(node, 0));
        let b = eval(genotype, function_set, input_row, genotype.connection_of(node, 1));
        match function_set.primitive(f) {
            Primitive::Bool(op) => op.apply(u64::from(a), u64::from(b)) & 1 == 1,
            Primitive::Real(_) => panic!("boolean oracle on real set"),
        }
    }
    let geo = genotype.geometry();
    (0..geo.num_outputs)
        .map(|o| eval(genotype, function_set, input_row, genotype.output_address(o)))
        .collect()
}

/// Scalar bit-difference fitness: evaluates every truth-table row and counts
/// mismatched output bits against a target row function.
pub fn scalar_bool_fitness(
    genotype: &Genotype,
    function_set: &FunctionSet,
    target_row_fn: impl Fn(usize) -> usize,
) -> u64 {
    let geo = genotype.geometry();
    let rows = 1usize << geo.num_inputs;
    let mut diff = 0u64;
    for r in 0..rows {
        let input_row: Vec<bool> = (0..geo.num_inputs).map(|i| (r >> i) & 1 == 1).collect();
        let outs = scalar_eval_bool(genotype, function_set, &input_row);
        let target = target_row_fn(r);
        for (o, &bit) in outs.iter().enumerate() {
            if bit != ((target >> o) & 1 == 1) {
                diff += 1;
            }
        }
    }
    diff
}

/// Recursive tree-walk evaluation of a real-valued genotype, with its own
/// copy of the protected-arithmetic conventions.
pub fn tree_walk_real(genotype: &Genotype, function_set: &FunctionSet, inputs: &[f64]) -> Vec<f64> {
    fn eval(
        genotype: &Genotype,
        function_set: &FunctionSet,
        inputs: &[f64],
        addr: usize,
    ) -> f64 {
        let geo = genotype.geometry();
        if addr < geo.num_inputs {
            return inputs[addr];
        }
        let node = addr - geo.num_inputs;
        let f = genotype.function_of(node);
        let name = match function_set.primitive(f) {
            Primitive::Real(op) => op.name(),
            Primitive::Bool(_) => panic!("real oracle on boolean set"),
        };
        let a = eval(genotype, function_set, inputs, genotype.connection_of(node, 0));
        match name {
            "+" => a + eval(genotype, function_set, inputs, genotype.connection_of(node, 1)),
            "-" => a - eval(genotype, function_set, inputs, genotype.connection_of(node, 1)),
            "*" => a * eval(genotype, function_set, inputs, genotype.connection_of(node, 1)),
            "/" => {
                let b = eval(genotype, function_set, inputs, genotype.connection_of(node, 1));
                if b == 0.0 {
                    1.0
                } else {
                    a / b
                }
            }
            "sin" => a.sin(),
            "cos" => a.cos(),
            "ln" => {
                if a == 0.0 {
                    0.0
                } else {
                    a.abs().ln()
                }
            }
            "exp" => a.exp(),
            other => panic!("unknown primitive {other}"),
        }
    }
    let geo = genotype.geometry();
    (0..geo.num_outputs)
        .map(|o| eval(genotype, function_set, inputs, genotype.output_address(o)))
        .collect()
}

/// Exact two-tailed Mann-Whitney p-value by direct enumeration of every
/// assignment of the pooled observations to the first sample.
pub fn exact_mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let na = a.len();
    let nb = b.len();
    let n = na + nb;
    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pooled.sort_by(f64::total_cmp);
    // midranks (1-based)
    let mut ranks = vec![0.0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && pooled[j] == pooled[i] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j).skip(i) {
            *r = rank;
        }
        i = j;
    }
    let rank_of = |v: f64| -> f64 {
        let idx = pooled.partition_point(|&x| x < v);
        ranks[idx]
    };
    let u_of_sum = |rank_sum: f64, m: usize| rank_sum - (m * (m + 1)) as f64 / 2.0;
    let observed_u_a = u_of_sum(a.iter().map(|&v| rank_of(v)).sum(), na);
    let max_u = (na * nb) as f64;
    let lo = observed_u_a.min(max_u - observed_u_a);
    let hi = observed_u_a.max(max_u - observed_u_a);

    // enumerate subsets of size na out of n positions
    let mut extreme = 0u64;
    let mut total = 0u64;
    let mut picks: Vec<usize> = (0..na).collect();
    loop {
        let rank_sum: f64 = picks.iter().map(|&i| ranks[i]).sum();
        let u = u_of_sum(rank_sum, na);
        total += 1;
        if u <= lo + 1e-9 || u >= hi - 1e-9 {
            extreme += 1;
        }
        // next combination
        let mut k = na;
        loop {
            if k == 0 {
                return (extreme as f64 / total as f64).min(1.0);
            }
            k -= 1;
            if picks[k] != k + n - na {
                break;
            }
        }
        picks[k] += 1;
        for j in k + 1..na {
            picks[j] = picks[j - 1] + 1;
        }
    }
}
