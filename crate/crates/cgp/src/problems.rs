use crate::bitword::BitWord;
use crate::error::{CgpError, Result};
use crate::evolution::EvolutionParams;
use crate::function_set::{BoolFn, FunctionKind, FunctionSet, RealFn};
use crate::genotype::Genotype;
use crate::geometry::Geometry;
use crate::program::{decode, execute_boolean, execute_real};
use rand::Rng;
use std::io::{BufRead, Write};

/// Compressed truth table: one packed word per input and per target output.
/// Row `r`, bit `i` of the input enumeration is `(r >> i) & 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub input_words: Vec<BitWord>,
    pub target_words: Vec<BitWord>,
}

impl TruthTable {
    /// Builds the table for `num_inputs` inputs from a row function mapping
    /// the input row index to the output bits (LSB = output 0).
    pub fn from_row_fn(num_inputs: usize, num_outputs: usize, f: impl Fn(usize) -> usize) -> Self {
        let rows = 1usize << num_inputs;
        let input_words = (0..num_inputs)
            .map(|i| BitWord::from_fn(rows, |r| (r >> i) & 1 == 1))
            .collect();
        let target_words = (0..num_outputs)
            .map(|o| BitWord::from_fn(rows, |r| (f(r) >> o) & 1 == 1))
            .collect();
        TruthTable {
            input_words,
            target_words,
        }
    }

    pub fn rows(&self) -> usize {
        self.input_words[0].rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DatasetSpec {
    /// `U[a,b,c]`: c uniform random samples per variable from [a, b].
    Uniform { a: f64, b: f64, count: usize },
    /// `E[a,b,c]`: full grid over [a, b] with spacing c per variable.
    Grid { a: f64, b: f64, step: f64 },
    /// Loaded from a CSV file; no generating descriptor.
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: DatasetSpec,
    /// (input vector, target value) pairs.
    pub points: Vec<(Vec<f64>, f64)>,
}

impl Dataset {
    pub fn uniform(
        a: f64,
        b: f64,
        count: usize,
        num_vars: usize,
        target: impl Fn(&[f64]) -> f64,
        rng: &mut impl Rng,
    ) -> Self {
        let points = (0..count)
            .map(|_| {
                let xs: Vec<f64> = (0..num_vars).map(|_| rng.gen_range(a..=b)).collect();
                let t = target(&xs);
                (xs, t)
            })
            .collect();
        Dataset {
            spec: DatasetSpec::Uniform { a, b, count },
            points,
        }
    }

    pub fn grid(
        a: f64,
        b: f64,
        step: f64,
        num_vars: usize,
        target: impl Fn(&[f64]) -> f64,
    ) -> Self {
        let per_axis = ((b - a) / step).round() as usize + 1;
        let total = per_axis.pow(num_vars as u32);
        let points = (0..total)
            .map(|mut idx| {
                let xs: Vec<f64> = (0..num_vars)
                    .map(|_| {
                        let i = idx % per_axis;
                        idx /= per_axis;
                        a + i as f64 * step
                    })
                    .collect();
                let t = target(&xs);
                (xs, t)
            })
            .collect();
        Dataset {
            spec: DatasetSpec::Grid { a, b, step },
            points,
        }
    }

    /// One CSV row per point: `x0,...,xk,target`. No header.
    pub fn to_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (xs, t) in &self.points {
            for x in xs {
                write!(w, "{x},")?;
            }
            writeln!(w, "{t}")?;
        }
        Ok(())
    }

    pub fn from_csv(r: &mut impl BufRead) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| CgpError::Parse(format!("line {}: {e}", lineno + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| CgpError::Parse(format!("line {}: {e}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            if vals.len() < 2 {
                return Err(CgpError::Parse(format!(
                    "line {}: need at least one input and a target",
                    lineno + 1
                )));
            }
            let (inputs, target) = vals.split_at(vals.len() - 1);
            points.push((inputs.to_vec(), target[0]));
        }
        Ok(Dataset {
            spec: DatasetSpec::Imported,
            points,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Truth(TruthTable),
    Data(Dataset),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: String,
    geometry: Geometry,
    function_set: FunctionSet,
    payload: Payload,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        geometry: Geometry,
        function_set: FunctionSet,
        payload: Payload,
    ) -> Result<Self> {
        geometry.validate()?;
        let kind_ok = matches!(
            (&payload, function_set.kind()),
            (Payload::Truth(_), FunctionKind::Boolean) | (Payload::Data(_), FunctionKind::Real)
        );
        if !kind_ok {
            return Err(CgpError::Config(
                "payload kind must match function set kind".into(),
            ));
        }
        Ok(Problem {
            name: name.into(),
            geometry,
            function_set,
            payload,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn function_set(&self) -> &FunctionSet {
        &self.function_set
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn kind(&self) -> FunctionKind {
        self.function_set.kind()
    }

    pub fn check_compatible(&self, params: &EvolutionParams) -> Result<()> {
        if params.mutation.min_active > self.geometry.num_nodes {
            return Err(CgpError::Config(format!(
                "min_active {} exceeds node count {}",
                params.mutation.min_active, self.geometry.num_nodes
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, genotype: &Genotype) -> Result<f64> {
        match &self.payload {
            Payload::Truth(_) => boolean_fitness(genotype, self),
            Payload::Data(_) => regression_fitness(genotype, self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanProblemName {
    Adder2,
    Mul2,
    Sub2,
}

impl std::str::FromStr for BooleanProblemName {
    type Err = CgpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adder2" => Ok(BooleanProblemName::Adder2),
            "mul2" => Ok(BooleanProblemName::Mul2),
            "sub2" => Ok(BooleanProblemName::Sub2),
            other => Err(CgpError::Config(format!("unknown boolean problem {other}"))),
        }
    }
}

/// Benchmark circuits:
/// - `adder2`: full adder over 3 input bits; outputs sum and carry.
/// - `mul2`: 2-bit x 2-bit multiplier; inputs a0 a1 b0 b1, outputs p0..p3.
/// - `sub2`: 2-bit subtraction a - b; outputs d0 d1 and borrow-out.
pub fn make_boolean_problem(name: BooleanProblemName) -> Problem {
    let standard = [BoolFn::And, BoolFn::Or, BoolFn::Xor, BoolFn::AndNot];
    let with_nor = [
        BoolFn::And,
        BoolFn::Or,
        BoolFn::Xor,
        BoolFn::Nor,
        BoolFn::AndNot,
    ];
    let (label, ni, no, fs, row_fn): (_, usize, usize, _, fn(usize) -> usize) = match name {
        BooleanProblemName::Adder2 => (
            "adder2",
            3,
            2,
            FunctionSet::boolean(&standard),
            |r| {
                let s = (r & 1) + ((r >> 1) & 1) + ((r >> 2) & 1);
                s // bit 0 = sum, bit 1 = carry
            },
        ),
        BooleanProblemName::Mul2 => (
            "mul2",
            4,
            4,
            FunctionSet::boolean(&standard),
            |r| {
                let a = r & 0b11;
                let b = (r >> 2) & 0b11;
                a * b
            },
        ),
        BooleanProblemName::Sub2 => (
            "sub2",
            4,
            3,
            FunctionSet::boolean(&with_nor),
            |r| {
                let a = r & 0b11;
                let b = (r >> 2) & 0b11;
                let diff = (4 + a - b) % 4;
                let borrow = usize::from(a < b);
                diff | (borrow << 2)
            },
        ),
    };
    let geometry = Geometry::new(ni, no, 30, 2);
    let table = TruthTable::from_row_fn(ni, no, row_fn);
    Problem::new(label, geometry, fs, Payload::Truth(table)).expect("static configuration")
}

/// Hamming distance between the evaluated outputs and the target table.
pub fn boolean_fitness(genotype: &Genotype, problem: &Problem) -> Result<f64> {
    let table = match &problem.payload {
        Payload::Truth(t) => t,
        Payload::Data(_) => {
            return Err(CgpError::KindMismatch {
                expected: "boolean",
                actual: "real",
            })
        }
    };
    let program = decode(genotype, &problem.function_set)?;
    let outputs = execute_boolean(&program, &problem.function_set, &table.input_words)?;
    let diff: u32 = outputs
        .iter()
        .zip(&table.target_words)
        .map(|(o, t)| o.xor(t).count_ones())
        .sum();
    Ok(f64::from(diff))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionProblemName {
    Koza2,
    Koza3,
    Pagie1,
}

impl std::str::FromStr for RegressionProblemName {
    type Err = CgpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "koza2" => Ok(RegressionProblemName::Koza2),
            "koza3" => Ok(RegressionProblemName::Koza3),
            "pagie1" => Ok(RegressionProblemName::Pagie1),
            other => Err(CgpError::Config(format!(
                "unknown regression problem {other}"
            ))),
        }
    }
}

pub fn koza2_target(x: f64) -> f64 {
    x.powi(5) - 2.0 * x.powi(3) + x
}

pub fn koza3_target(x: f64) -> f64 {
    x.powi(6) - 2.0 * x.powi(4) + x.powi(2)
}

pub fn pagie1_target(x: f64, y: f64) -> f64 {
    1.0 / (1.0 + x.powi(-4)) + 1.0 / (1.0 + y.powi(-4))
}

pub fn regression_function_set() -> FunctionSet {
    FunctionSet::real(&[
        RealFn::Add,
        RealFn::Sub,
        RealFn::Mul,
        RealFn::Div,
        RealFn::Sin,
        RealFn::Cos,
        RealFn::Ln,
        RealFn::Exp,
    ])
}

/// Regression benchmarks, 10 nodes each:
/// - `koza2`: x^5 - 2x^3 + x on U[-1,1,20]
/// - `koza3`: x^6 - 2x^4 + x^2 on U[-1,1,20]
/// - `pagie1`: 1/(1+x^-4) + 1/(1+y^-4) on the E[-5,5,0.4] grid (676 points)
///
/// U-datasets are drawn from `dataset_rng`.
pub fn make_regression_problem(
    name: RegressionProblemName,
    dataset_rng: &mut impl Rng,
) -> Problem {
    let fs = regression_function_set();
    let (label, ni, dataset) = match name {
        RegressionProblemName::Koza2 => (
            "koza2",
            1,
            Dataset::uniform(-1.0, 1.0, 20, 1, |xs| koza2_target(xs[0]), dataset_rng),
        ),
        RegressionProblemName::Koza3 => (
            "koza3",
            1,
            Dataset::uniform(-1.0, 1.0, 20, 1, |xs| koza3_target(xs[0]), dataset_rng),
        ),
        RegressionProblemName::Pagie1 => (
            "pagie1",
            2,
            Dataset::grid(-5.0, 5.0, 0.4, 2, |xs| pagie1_target(xs[0], xs[1])),
        ),
    };
    let geometry = Geometry::new(ni, 1, 10, 2);
    Problem::new(label, geometry, fs, Payload::Data(dataset)).expect("static configuration")
}

/// Loads a pinned dataset in place of the generated one.
pub fn with_dataset(problem: &Problem, dataset: Dataset) -> Result<Problem> {
    Problem::new(
        problem.name.clone(),
        problem.geometry,
        problem.function_set.clone(),
        Payload::Data(dataset),
    )
}

/// Sum of absolute errors over the dataset. Any non-finite program output
/// makes the whole fitness +inf.
pub fn regression_fitness(genotype: &Genotype, problem: &Problem) -> Result<f64> {
    let dataset = match &problem.payload {
        Payload::Data(d) => d,
        Payload::Truth(_) => {
            return Err(CgpError::KindMismatch {
                expected: "real",
                actual: "boolean",
            })
        }
    };
    let program = decode(genotype, &problem.function_set)?;
    let mut total = 0.0;
    for (xs, target) in &dataset.points {
        let out = execute_real(&program, &problem.function_set, xs)?[0];
        if !out.is_finite() {
            return Ok(f64::INFINITY);
        }
        total += (out - target).abs();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::random_genotype;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adder2_configuration() {
        let p = make_boolean_problem(BooleanProblemName::Adder2);
        assert_eq!(p.geometry().genotype_length(), 92);
        assert_eq!(p.function_set().len(), 4);
    }

    #[test]
    fn adder2_targets_are_parity_and_majority() {
        let p = make_boolean_problem(BooleanProblemName::Adder2);
        let table = match p.payload() {
            Payload::Truth(t) => t,
            _ => unreachable!(),
        };
        for r in 0..8usize {
            let bits = [(r & 1), (r >> 1) & 1, (r >> 2) & 1];
            let sum = bits[0] ^ bits[1] ^ bits[2];
            let carry = usize::from(bits.iter().sum::<usize>() >= 2);
            assert_eq!(table.target_words[0].get(r), sum == 1, "sum row {r}");
            assert_eq!(table.target_words[1].get(r), carry == 1, "carry row {r}");
        }
    }

    #[test]
    fn mul2_targets_enumerate_products() {
        let p = make_boolean_problem(BooleanProblemName::Mul2);
        let table = match p.payload() {
            Payload::Truth(t) => t,
            _ => unreachable!(),
        };
        for a in 0..4usize {
            for b in 0..4usize {
                let r = a | (b << 2);
                let prod = a * b;
                for o in 0..4 {
                    assert_eq!(
                        table.target_words[o].get(r),
                        (prod >> o) & 1 == 1,
                        "a={a} b={b} bit {o}"
                    );
                }
            }
        }
        // row (a=3, b=3) -> 9 = 1001
        let r = 3 | (3 << 2);
        assert!(table.target_words[0].get(r));
        assert!(!table.target_words[1].get(r));
        assert!(!table.target_words[2].get(r));
        assert!(table.target_words[3].get(r));
    }

    #[test]
    fn sub2_targets_enumerate_differences() {
        let p = make_boolean_problem(BooleanProblemName::Sub2);
        let table = match p.payload() {
            Payload::Truth(t) => t,
            _ => unreachable!(),
        };
        for a in 0..4usize {
            for b in 0..4usize {
                let r = a | (b << 2);
                let diff = (4 + a - b) % 4;
                assert_eq!(table.target_words[0].get(r), diff & 1 == 1);
                assert_eq!(table.target_words[1].get(r), diff >> 1 == 1);
                assert_eq!(table.target_words[2].get(r), a < b, "borrow a={a} b={b}");
            }
        }
    }

    #[test]
    fn perfect_adder_circuit_scores_zero() {
        // sum = (a XOR b) XOR cin; carry = (a AND b) OR (cin AND (a XOR b))
        let p = make_boolean_problem(BooleanProblemName::Adder2);
        let geo = *p.geometry();
        let mut genes = vec![0usize; geo.genotype_length()];
        let set = |genes: &mut Vec<usize>, node: usize, f: usize, a: usize, b: usize| {
            genes[geo.function_gene(node)] = f;
            genes[geo.connection_gene(node, 0)] = a;
            genes[geo.connection_gene(node, 1)] = b;
        };
        // addresses: inputs a=0 b=1 cin=2; nodes start at 3
        set(&mut genes, 0, 2, 0, 1); // t = a XOR b          (addr 3)
        set(&mut genes, 1, 2, 3, 2); // sum = t XOR cin      (addr 4)
        set(&mut genes, 2, 0, 0, 1); // a AND b              (addr 5)
        set(&mut genes, 3, 0, 2, 3); // cin AND t            (addr 6)
        set(&mut genes, 4, 1, 5, 6); // carry                (addr 7)
        genes[geo.output_gene(0)] = 4;
        genes[geo.output_gene(1)] = 7;
        let g = Genotype::from_genes(geo, genes).unwrap();
        assert_eq!(p.evaluate(&g).unwrap(), 0.0);
    }

    #[test]
    fn complemented_output_flips_all_rows() {
        // Complementing the exact sum output contributes all 2^3 rows to the
        // bit-difference count while the exact carry contributes none.
        let p = make_boolean_problem(BooleanProblemName::Adder2);
        let geo = *p.geometry();
        let mut genes = vec![0usize; geo.genotype_length()];
        let set = |genes: &mut Vec<usize>, node: usize, f: usize, a: usize, b: usize| {
            genes[geo.function_gene(node)] = f;
            genes[geo.connection_gene(node, 0)] = a;
            genes[geo.connection_gene(node, 1)] = b;
        };
        set(&mut genes, 0, 2, 0, 1);
        set(&mut genes, 1, 2, 3, 2); // sum (addr 4)
        set(&mut genes, 2, 0, 0, 1);
        set(&mut genes, 3, 0, 2, 3);
        set(&mut genes, 4, 1, 5, 6); // carry (addr 7)
        genes[geo.output_gene(0)] = 4;
        genes[geo.output_gene(1)] = 7;
        let g = Genotype::from_genes(geo, genes).unwrap();
        let table = match p.payload() {
            Payload::Truth(t) => t,
            _ => unreachable!(),
        };
        let program = decode(&g, p.function_set()).unwrap();
        let outs = execute_boolean(&program, p.function_set(), &table.input_words).unwrap();
        // complement of the sum word differs from the target in all 8 rows
        let complement = BitWord::from_fn(8, |r| !outs[0].get(r));
        let diff = complement.xor(&table.target_words[0]).count_ones();
        assert_eq!(diff, 8);
    }

    #[test]
    fn regression_targets() {
        assert_eq!(koza2_target(1.0), 0.0);
        assert_eq!(pagie1_target(1.0, 1.0), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = make_regression_problem(RegressionProblemName::Pagie1, &mut rng);
        match p.payload() {
            Payload::Data(d) => assert_eq!(d.points.len(), 676),
            _ => unreachable!(),
        }
        let k = make_regression_problem(RegressionProblemName::Koza2, &mut rng);
        match k.payload() {
            Payload::Data(d) => {
                assert_eq!(d.points.len(), 20);
                for (xs, t) in &d.points {
                    assert!((-1.0..=1.0).contains(&xs[0]));
                    assert_eq!(*t, koza2_target(xs[0]));
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn exact_koza2_program_scores_zero() {
        // x^5 - 2x^3 + x = x * (x^2 - 1)^2; build it with 5 nodes.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = make_regression_problem(RegressionProblemName::Koza2, &mut rng);
        let geo = *p.geometry();
        let mut genes = vec![0usize; geo.genotype_length()];
        let set = |genes: &mut Vec<usize>, node: usize, f: usize, a: usize, b: usize| {
            genes[geo.function_gene(node)] = f;
            genes[geo.connection_gene(node, 0)] = a;
            genes[geo.connection_gene(node, 1)] = b;
        };
        // addresses: x = 0; nodes start at 1
        set(&mut genes, 0, 2, 0, 0); // x^2              (addr 1)
        set(&mut genes, 1, 3, 0, 0); // x/x = 1 (x != 0) (addr 2)
        set(&mut genes, 2, 1, 1, 2); // x^2 - 1          (addr 3)
        set(&mut genes, 3, 2, 3, 3); // (x^2-1)^2        (addr 4)
        set(&mut genes, 4, 2, 0, 4); // x * (x^2-1)^2    (addr 5)
        genes[geo.output_gene(0)] = 5;
        let g = Genotype::from_genes(geo, genes).unwrap();
        let fit = p.evaluate(&g).unwrap();
        assert!(fit < 1e-12, "fitness {fit}");
    }

    #[test]
    fn constant_zero_program_on_pagie1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = make_regression_problem(RegressionProblemName::Pagie1, &mut rng);
        let geo = *p.geometry();
        let mut genes = vec![0usize; geo.genotype_length()];
        // node 0: x - x = 0
        genes[geo.function_gene(0)] = 1;
        genes[geo.output_gene(0)] = geo.node_address(0);
        let g = Genotype::from_genes(geo, genes).unwrap();
        let expected: f64 = match p.payload() {
            Payload::Data(d) => d.points.iter().map(|(_, t)| t.abs()).sum(),
            _ => unreachable!(),
        };
        assert!((p.evaluate(&g).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn nonfinite_output_maps_to_worst_fitness() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = make_regression_problem(RegressionProblemName::Pagie1, &mut rng);
        let geo = *p.geometry();
        let mut genes = vec![0usize; geo.genotype_length()];
        let set = |genes: &mut Vec<usize>, node: usize, f: usize, a: usize, b: usize| {
            genes[geo.function_gene(node)] = f;
            genes[geo.connection_gene(node, 0)] = a;
            genes[geo.connection_gene(node, 1)] = b;
        };
        // exp(exp(exp(exp(x)))) overflows somewhere on the grid
        set(&mut genes, 0, 7, 0, 0);
        set(&mut genes, 1, 7, 2, 0);
        set(&mut genes, 2, 7, 3, 0);
        set(&mut genes, 3, 7, 4, 0);
        genes[geo.output_gene(0)] = 5;
        let g = Genotype::from_genes(geo, genes).unwrap();
        assert_eq!(p.evaluate(&g).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = Dataset::uniform(-1.0, 1.0, 10, 2, |xs| xs[0] + xs[1], &mut rng);
        let mut buf = Vec::new();
        d.to_csv(&mut buf).unwrap();
        let back = Dataset::from_csv(&mut buf.as_slice()).unwrap();
        assert_eq!(back.points, d.points);
    }

    #[test]
    fn unknown_problem_names() {
        assert!("adder3".parse::<BooleanProblemName>().is_err());
        assert!("koza1".parse::<RegressionProblemName>().is_err());
        assert!("mul2".parse::<BooleanProblemName>().is_ok());
    }

    #[test]
    fn fitness_bounds() {
        let p = make_boolean_problem(BooleanProblemName::Mul2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g = random_genotype(p.geometry(), p.function_set(), &mut rng);
            let f = p.evaluate(&g).unwrap();
            assert!(f >= 0.0 && f <= (4 * 16) as f64);
        }
    }
}
