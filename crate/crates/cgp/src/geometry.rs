use crate::error::{CgpError, Result};

/// Grid shape of a genotype. The grid is a single row of `num_nodes`
/// function nodes with full feed-forward connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub num_nodes: usize,
    pub max_arity: usize,
    /// When set, output genes may address program inputs directly.
    pub allow_output_to_input: bool,
}

impl Geometry {
    pub fn new(num_inputs: usize, num_outputs: usize, num_nodes: usize, max_arity: usize) -> Self {
        Geometry {
            num_inputs,
            num_outputs,
            num_nodes,
            max_arity,
            allow_output_to_input: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_inputs < 1 || self.num_outputs < 1 || self.num_nodes < 1 || self.max_arity < 1
        {
            return Err(CgpError::InvalidGeometry(format!(
                "all counts must be >= 1, got inputs={} outputs={} nodes={} arity={}",
                self.num_inputs, self.num_outputs, self.num_nodes, self.max_arity
            )));
        }
        Ok(())
    }

    /// Total number of genes: one function gene plus `max_arity` connection
    /// genes per node, then one gene per output.
    pub fn genotype_length(&self) -> usize {
        self.num_nodes * (self.max_arity + 1) + self.num_outputs
    }

    /// Address of function node `node` in the shared input/node address space.
    /// Program inputs occupy addresses `0..num_inputs`.
    pub fn node_address(&self, node: usize) -> usize {
        self.num_inputs + node
    }

    /// Inverse of `node_address` for addresses that refer to nodes.
    pub fn address_to_node(&self, address: usize) -> Option<usize> {
        address.checked_sub(self.num_inputs)
    }

    pub fn genes_per_node(&self) -> usize {
        self.max_arity + 1
    }

    /// Index of node `node`'s function gene.
    pub fn function_gene(&self, node: usize) -> usize {
        node * self.genes_per_node()
    }

    /// Index of node `node`'s connection gene in `slot` (0-based, < max_arity).
    pub fn connection_gene(&self, node: usize, slot: usize) -> usize {
        node * self.genes_per_node() + 1 + slot
    }

    /// Index of output gene `output`.
    pub fn output_gene(&self, output: usize) -> usize {
        self.num_nodes * self.genes_per_node() + output
    }

    /// Classifies a flat gene index.
    pub fn gene_role(&self, gene_index: usize) -> GeneRole {
        let node_section = self.num_nodes * self.genes_per_node();
        if gene_index < node_section {
            let node = gene_index / self.genes_per_node();
            let offset = gene_index % self.genes_per_node();
            if offset == 0 {
                GeneRole::Function { node }
            } else {
                GeneRole::Connection {
                    node,
                    slot: offset - 1,
                }
            }
        } else {
            GeneRole::Output {
                output: gene_index - node_section,
            }
        }
    }

    /// Permissible half-open value range `[lo, hi)` for a gene.
    /// `num_functions` is the size of the function set.
    pub fn gene_range(&self, gene_index: usize, num_functions: usize) -> (usize, usize) {
        match self.gene_role(gene_index) {
            GeneRole::Function { .. } => (0, num_functions),
            // Feed-forward with full levels-back: any input or earlier node.
            GeneRole::Connection { node, .. } => (0, self.num_inputs + node),
            GeneRole::Output { .. } => {
                let lo = if self.allow_output_to_input {
                    0
                } else {
                    self.num_inputs
                };
                (lo, self.num_inputs + self.num_nodes)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneRole {
    Function { node: usize },
    Connection { node: usize, slot: usize },
    Output { output: usize },
}

/// Gene count for a geometry, as a free function for callers that have not
/// built a `Geometry` yet.
pub fn genotype_length(geometry: &Geometry) -> usize {
    geometry.genotype_length()
}
