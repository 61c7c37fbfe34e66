use crate::bitword::BitWord;
use crate::error::Result;
use crate::function_set::{FunctionKind, FunctionSet, Primitive};
use crate::genotype::Genotype;
use crate::geometry::Geometry;

/// One active function node with its inputs resolved to addresses.
/// Only the first `arity` connection genes are resolved; surplus connection
/// genes of nodes with lower-arity functions are never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveNode {
    pub node: usize,
    pub function: usize,
    pub inputs: Vec<usize>,
}

/// The phenotype: the subgraph reachable backward from the outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedProgram {
    geometry: Geometry,
    /// Active nodes in ascending node order.
    pub active_nodes: Vec<ActiveNode>,
    pub output_addresses: Vec<usize>,
}

impl DecodedProgram {
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn active_count(&self) -> usize {
        self.active_nodes.len()
    }

    pub fn active_set(&self) -> Vec<usize> {
        self.active_nodes.iter().map(|n| n.node).collect()
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.active_nodes.binary_search_by_key(&node, |n| n.node).is_ok()
    }
}

/// Backward search from the output genes, following only the connection
/// genes each node's function actually reads.
pub fn decode(genotype: &Genotype, function_set: &FunctionSet) -> Result<DecodedProgram> {
    genotype.validate(function_set)?;
    let geo = *genotype.geometry();

    let mut active = vec![false; geo.num_nodes];
    let mut stack: Vec<usize> = Vec::new();
    let mut output_addresses = Vec::with_capacity(geo.num_outputs);
    for o in 0..geo.num_outputs {
        let addr = genotype.output_address(o);
        output_addresses.push(addr);
        if let Some(node) = geo.address_to_node(addr) {
            stack.push(node);
        }
    }
    while let Some(node) = stack.pop() {
        if active[node] {
            continue;
        }
        active[node] = true;
        let arity = function_set.arity(genotype.function_of(node));
        for slot in 0..arity {
            let addr = genotype.connection_of(node, slot);
            if let Some(n) = geo.address_to_node(addr) {
                if !active[n] {
                    stack.push(n);
                }
            }
        }
    }

    let active_nodes = (0..geo.num_nodes)
        .filter(|&n| active[n])
        .map(|n| {
            let function = genotype.function_of(n);
            let arity = function_set.arity(function);
            ActiveNode {
                node: n,
                function,
                inputs: (0..arity).map(|s| genotype.connection_of(n, s)).collect(),
            }
        })
        .collect();

    Ok(DecodedProgram {
        geometry: geo,
        active_nodes,
        output_addresses,
    })
}

/// Evaluates a boolean program over packed truth-table words, one word per
/// program input. Returns one word per output.
pub fn execute_boolean(
    program: &DecodedProgram,
    function_set: &FunctionSet,
    input_words: &[BitWord],
) -> Result<Vec<BitWord>> {
    function_set.expect_kind(FunctionKind::Boolean)?;
    let geo = program.geometry();
    assert_eq!(input_words.len(), geo.num_inputs, "one word per input");
    let rows = input_words[0].rows();

    let mut values: Vec<Option<BitWord>> = vec![None; geo.num_inputs + geo.num_nodes];
    for (i, w) in input_words.iter().enumerate() {
        values[i] = Some(w.clone());
    }
    for node in &program.active_nodes {
        let op = match function_set.primitive(node.function) {
            Primitive::Bool(op) => op,
            Primitive::Real(_) => unreachable!("kind checked above"),
        };
        let a = values[node.inputs[0]].as_ref().expect("feed-forward order");
        let b = values[node.inputs[1]].as_ref().expect("feed-forward order");
        let out = BitWord::apply(op, a, b);
        values[geo.node_address(node.node)] = Some(out);
    }
    Ok(program
        .output_addresses
        .iter()
        .map(|&addr| {
            values[addr]
                .clone()
                .unwrap_or_else(|| BitWord::zeros(rows))
        })
        .collect())
}

/// Evaluates a real-valued program at one input point. Unary functions read
/// only their first resolved input. Non-finite values propagate.
pub fn execute_real(
    program: &DecodedProgram,
    function_set: &FunctionSet,
    inputs: &[f64],
) -> Result<Vec<f64>> {
    function_set.expect_kind(FunctionKind::Real)?;
    let geo = program.geometry();
    assert_eq!(inputs.len(), geo.num_inputs, "one value per input");

    let mut values = vec![0.0_f64; geo.num_inputs + geo.num_nodes];
    values[..inputs.len()].copy_from_slice(inputs);
    for node in &program.active_nodes {
        let op = match function_set.primitive(node.function) {
            Primitive::Real(op) => op,
            Primitive::Bool(_) => unreachable!("kind checked above"),
        };
        let a = values[node.inputs[0]];
        let b = if node.inputs.len() > 1 {
            values[node.inputs[1]]
        } else {
            0.0
        };
        values[geo.node_address(node.node)] = op.apply(a, b);
    }
    Ok(program
        .output_addresses
        .iter()
        .map(|&addr| values[addr])
        .collect())
}
