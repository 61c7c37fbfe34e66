use crate::function_set::FunctionSet;
use crate::genotype::Genotype;
use crate::program::decode;
use rand::Rng;

/// Per-offspring mutation configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    /// Per-gene probability for the standard point mutation.
    pub point_rate: f64,
    /// Per-offspring probability of applying one insertion.
    pub insertion_rate: f64,
    /// Per-offspring probability of applying one deletion.
    pub deletion_rate: f64,
    /// Deletion never reduces the phenotype below this many active nodes.
    pub min_active: usize,
    /// Replace point mutation with the single-active-gene strategy.
    pub use_sagms: bool,
}

impl MutationParams {
    pub fn validate(&self) -> crate::error::Result<()> {
        for (name, r) in [
            ("point_rate", self.point_rate),
            ("insertion_rate", self.insertion_rate),
            ("deletion_rate", self.deletion_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(crate::error::CgpError::Config(format!(
                    "{name} must be in [0, 1], got {r}"
                )));
            }
        }
        if self.min_active < 1 {
            return Err(crate::error::CgpError::Config(
                "min_active must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for MutationParams {
    fn default() -> Self {
        MutationParams {
            point_rate: 0.05,
            insertion_rate: 0.0,
            deletion_rate: 0.0,
            min_active: 4,
            use_sagms: false,
        }
    }
}

/// Resamples uniformly from `[lo, hi)` excluding `current`.
/// Caller guarantees `hi - lo >= 2`.
fn resample_different(lo: usize, hi: usize, current: usize, rng: &mut impl Rng) -> usize {
    let v = rng.gen_range(lo..hi - 1);
    if v >= current {
        v + 1
    } else {
        v
    }
}

/// Standard point mutation: each gene independently changes to a different
/// permissible value with probability `rate`. Genes whose range has a single
/// value are skipped.
pub fn point_mutation(
    genotype: &Genotype,
    function_set: &FunctionSet,
    rate: f64,
    rng: &mut impl Rng,
) -> Genotype {
    let mut child = genotype.clone();
    let geo = *genotype.geometry();
    for i in 0..geo.genotype_length() {
        let (lo, hi) = geo.gene_range(i, function_set.len());
        if hi - lo < 2 {
            continue;
        }
        if rng.gen_bool(rate) {
            let v = resample_different(lo, hi, child.gene(i), rng);
            child.set_gene(i, v);
        }
    }
    child
}

/// Single active-gene mutation: changes exactly one gene that belongs to an
/// active node (function or connection gene) or one output gene. Returns the
/// offspring and whether a gene was changed; the flag is false only when no
/// active gene has a range of size >= 2.
pub fn single_active_gene_mutation(
    genotype: &Genotype,
    function_set: &FunctionSet,
    rng: &mut impl Rng,
) -> (Genotype, bool) {
    let geo = *genotype.geometry();
    let program = decode(genotype, function_set).expect("valid genotype");

    let mut candidates: Vec<usize> = Vec::new();
    for node in &program.active_nodes {
        let f = geo.function_gene(node.node);
        for i in f..f + geo.genes_per_node() {
            let (lo, hi) = geo.gene_range(i, function_set.len());
            if hi - lo >= 2 {
                candidates.push(i);
            }
        }
    }
    for o in 0..geo.num_outputs {
        let i = geo.output_gene(o);
        let (lo, hi) = geo.gene_range(i, function_set.len());
        if hi - lo >= 2 {
            candidates.push(i);
        }
    }
    if candidates.is_empty() {
        return (genotype.clone(), false);
    }
    let target = candidates[rng.gen_range(0..candidates.len())];
    let (lo, hi) = geo.gene_range(target, function_set.len());
    let mut child = genotype.clone();
    let v = resample_different(lo, hi, child.gene(target), rng);
    child.set_gene(target, v);
    (child, true)
}

/// Insertion mutation: activates exactly one inactive node by splicing it
/// between an active consumer gene and that gene's current target.
///
/// A legal pair is an inactive node M together with a site gene s, where s
/// is one of the read connection genes of an active node with index > M, or
/// an output gene, and s currently targets an address B < address(M). The
/// site is rewired to M, M's first connection gene takes over B, and M's
/// remaining connection genes are resampled among already-active targets
/// below M so that no other node can change state.
///
/// Returns the offspring and whether a node was activated. All-active
/// genotypes and genotypes without a legal pair are returned unchanged.
pub fn insertion(
    genotype: &Genotype,
    function_set: &FunctionSet,
    rng: &mut impl Rng,
) -> (Genotype, bool) {
    let geo = *genotype.geometry();
    let program = decode(genotype, function_set).expect("valid genotype");
    if program.active_count() == geo.num_nodes {
        return (genotype.clone(), false);
    }

    // (inactive node M, site gene index) pairs
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for m in 0..geo.num_nodes {
        if program.is_active(m) {
            continue;
        }
        let m_addr = geo.node_address(m);
        for node in &program.active_nodes {
            if node.node <= m {
                continue;
            }
            for slot in 0..node.inputs.len() {
                if node.inputs[slot] < m_addr {
                    pairs.push((m, geo.connection_gene(node.node, slot)));
                }
            }
        }
        for o in 0..geo.num_outputs {
            if genotype.output_address(o) < m_addr {
                pairs.push((m, geo.output_gene(o)));
            }
        }
    }
    if pairs.is_empty() {
        return (genotype.clone(), false);
    }

    let (m, site) = pairs[rng.gen_range(0..pairs.len())];
    let m_addr = geo.node_address(m);
    let former_target = genotype.gene(site);

    let mut child = genotype.clone();
    child.set_gene(site, m_addr);
    child.set_gene(geo.connection_gene(m, 0), former_target);
    // Remaining connections may only reach inputs or nodes that are already
    // active below M; otherwise activating M could activate others too.
    let allowed: Vec<usize> = (0..geo.num_inputs)
        .chain(
            program
                .active_nodes
                .iter()
                .filter(|n| n.node < m)
                .map(|n| geo.node_address(n.node)),
        )
        .collect();
    for slot in 1..geo.max_arity {
        let v = allowed[rng.gen_range(0..allowed.len())];
        child.set_gene(geo.connection_gene(m, slot), v);
    }
    (child, true)
}

/// Splices node `m` out of `genotype`: every connection and output gene
/// targeting `m` is redirected to `m`'s first connection target. Output
/// genes that would be redirected to a program input while that is not
/// permitted are redirected to a random active node other than `m` instead.
fn splice_out(
    genotype: &Genotype,
    function_set: &FunctionSet,
    active_addresses: &[usize],
    m: usize,
    rng: &mut impl Rng,
) -> Genotype {
    let geo = *genotype.geometry();
    let m_addr = geo.node_address(m);
    let bypass = genotype.connection_of(m, 0);

    let mut child = genotype.clone();
    for node in 0..geo.num_nodes {
        for slot in 0..geo.max_arity {
            let i = geo.connection_gene(node, slot);
            if child.gene(i) == m_addr {
                child.set_gene(i, bypass);
            }
        }
    }
    let output_fallback_needed = bypass < geo.num_inputs && !geo.allow_output_to_input;
    for o in 0..geo.num_outputs {
        let i = geo.output_gene(o);
        if child.gene(i) == m_addr {
            if output_fallback_needed {
                let others: Vec<usize> = active_addresses
                    .iter()
                    .copied()
                    .filter(|&a| a != m_addr)
                    .collect();
                child.set_gene(i, others[rng.gen_range(0..others.len())]);
            } else {
                child.set_gene(i, bypass);
            }
        }
    }
    let _ = function_set;
    child
}

/// Deletion mutation: deactivates one active node by splicing it out,
/// preferring candidates whose removal deactivates exactly that node. Falls
/// back to the candidate with the least collateral deactivation; no-ops when
/// the phenotype is already at `min_active` or the fallback would go below
/// it. Returns the offspring and whether a node was deactivated.
pub fn deletion(
    genotype: &Genotype,
    function_set: &FunctionSet,
    min_active: usize,
    rng: &mut impl Rng,
) -> (Genotype, bool) {
    let geo = *genotype.geometry();
    let program = decode(genotype, function_set).expect("valid genotype");
    let before = program.active_count();
    if before <= min_active {
        return (genotype.clone(), false);
    }
    let active_addresses: Vec<usize> = program
        .active_nodes
        .iter()
        .map(|n| geo.node_address(n.node))
        .collect();

    let mut unit: Vec<Genotype> = Vec::new();
    let mut best_other: Vec<Genotype> = Vec::new();
    let mut best_after = 0usize;
    for node in &program.active_nodes {
        let m = node.node;
        let child = splice_out(genotype, function_set, &active_addresses, m, rng);
        let trial = decode(&child, function_set).expect("splice preserves validity");
        debug_assert!(!trial.is_active(m));
        let after = trial.active_count();
        if after == before - 1 {
            unit.push(child);
        } else if after > best_after {
            best_after = after;
            best_other = vec![child];
        } else if after == best_after {
            best_other.push(child);
        }
    }

    if !unit.is_empty() {
        let child = unit[rng.gen_range(0..unit.len())].clone();
        return (child, true);
    }
    if !best_other.is_empty() && best_after >= min_active {
        let child = best_other[rng.gen_range(0..best_other.len())].clone();
        return (child, true);
    }
    (genotype.clone(), false)
}

/// Breeds one offspring: point mutation (or SAGMS), then insertion with
/// probability `insertion_rate`, then deletion with probability
/// `deletion_rate`.
pub fn breed_offspring(
    parent: &Genotype,
    function_set: &FunctionSet,
    params: &MutationParams,
    rng: &mut impl Rng,
) -> Genotype {
    let mut child = if params.use_sagms {
        single_active_gene_mutation(parent, function_set, rng).0
    } else {
        point_mutation(parent, function_set, params.point_rate, rng)
    };
    if params.insertion_rate > 0.0 && rng.gen_bool(params.insertion_rate) {
        child = insertion(&child, function_set, rng).0;
    }
    if params.deletion_rate > 0.0 && rng.gen_bool(params.deletion_rate) {
        child = deletion(&child, function_set, params.min_active, rng).0;
    }
    child
}
