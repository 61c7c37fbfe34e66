use crate::error::{CgpError, Result};
use crate::function_set::FunctionSet;
use crate::geometry::Geometry;
use rand::Rng;

/// Fixed-length integer genotype. Node `i` owns one function gene followed
/// by `max_arity` connection genes; the trailing genes address the outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genotype {
    geometry: Geometry,
    genes: Vec<usize>,
}

impl Genotype {
    pub fn from_genes(geometry: Geometry, genes: Vec<usize>) -> Result<Self> {
        geometry.validate()?;
        let expected = geometry.genotype_length();
        if genes.len() != expected {
            return Err(CgpError::LengthMismatch {
                expected,
                actual: genes.len(),
            });
        }
        Ok(Genotype { geometry, genes })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }

    pub fn gene(&self, index: usize) -> usize {
        self.genes[index]
    }

    pub(crate) fn set_gene(&mut self, index: usize, value: usize) {
        self.genes[index] = value;
    }

    pub fn function_of(&self, node: usize) -> usize {
        self.genes[self.geometry.function_gene(node)]
    }

    pub fn connection_of(&self, node: usize, slot: usize) -> usize {
        self.genes[self.geometry.connection_gene(node, slot)]
    }

    pub fn output_address(&self, output: usize) -> usize {
        self.genes[self.geometry.output_gene(output)]
    }

    /// Checks every gene against its permissible range, reporting the first
    /// violation.
    pub fn validate(&self, function_set: &FunctionSet) -> Result<()> {
        for (i, &value) in self.genes.iter().enumerate() {
            let (lo, hi) = self.geometry.gene_range(i, function_set.len());
            if value < lo || value >= hi {
                return Err(CgpError::GeneOutOfRange {
                    gene_index: i,
                    value,
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Serializes to one line: `Ni No Nc Na |F|` header followed by the genes.
    pub fn to_line(&self, num_functions: usize) -> String {
        let g = &self.geometry;
        let mut parts = vec![
            g.num_inputs.to_string(),
            g.num_outputs.to_string(),
            g.num_nodes.to_string(),
            g.max_arity.to_string(),
            num_functions.to_string(),
        ];
        parts.extend(self.genes.iter().map(|x| x.to_string()));
        parts.join(" ")
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let mut it = line.split_whitespace();
        let mut next = |name: &str| -> Result<usize> {
            it.next()
                .ok_or_else(|| CgpError::Parse(format!("missing field {name}")))?
                .parse::<usize>()
                .map_err(|e| CgpError::Parse(format!("bad field {name}: {e}")))
        };
        let geometry = Geometry::new(
            next("Ni")?,
            next("No")?,
            next("Nc")?,
            next("Na")?,
        );
        let num_functions = next("|F|")?;
        let genes = (0..geometry.genotype_length())
            .map(|i| next(&format!("gene {i}")))
            .collect::<Result<Vec<_>>>()?;
        if it.next().is_some() {
            return Err(CgpError::Parse("trailing fields".into()));
        }
        let g = Genotype::from_genes(geometry, genes)?;
        for (i, &value) in g.genes.iter().enumerate() {
            let (lo, hi) = g.geometry.gene_range(i, num_functions);
            if value < lo || value >= hi {
                return Err(CgpError::GeneOutOfRange {
                    gene_index: i,
                    value,
                    lo,
                    hi,
                });
            }
        }
        Ok(g)
    }
}

/// Samples every gene uniformly from its permissible range.
pub fn random_genotype(
    geometry: &Geometry,
    function_set: &FunctionSet,
    rng: &mut impl Rng,
) -> Genotype {
    let len = geometry.genotype_length();
    let genes = (0..len)
        .map(|i| {
            let (lo, hi) = geometry.gene_range(i, function_set.len());
            rng.gen_range(lo..hi)
        })
        .collect();
    Genotype {
        geometry: *geometry,
        genes,
    }
}
