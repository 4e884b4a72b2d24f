use serde::{Deserialize, Serialize};

use super::dwt::{analysis_step, check_levels, synthesis_step};
use super::WaveletBasis;
use crate::error::Result;

/// A node `(level, band)` of the packet tree. Bands are in natural (Paley)
/// order: the children of `(l, b)` are `(l+1, 2b)` (low-pass) and `(l+1, 2b+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PacketNode {
    pub level: usize,
    pub band: usize,
}

impl PacketNode {
    /// Position of this band along the frequency axis (Gray-code inverse of
    /// the natural index; high-pass filtering reverses the spectrum).
    pub fn frequency_rank(&self) -> usize {
        let mut n = self.band;
        let mut shift = 1;
        while shift < usize::BITS as usize {
            n ^= n >> shift;
            shift <<= 1;
        }
        n
    }

    /// Half-open interval of `[0, 1)` (in units of the Nyquist frequency) this band covers.
    pub fn frequency_interval(&self) -> (f64, f64) {
        let width = (-(self.level as f64)).exp2();
        let r = self.frequency_rank() as f64;
        (r * width, (r + 1.0) * width)
    }
}

/// An orthonormal wavelet-packet basis chosen from the full tree.
#[derive(Clone, Debug)]
pub struct WaveletPacketTree {
    pub basis: WaveletBasis,
    pub depth: usize,
    /// Selected nodes in depth-first order; they tile the frequency axis once.
    pub selected: Vec<PacketNode>,
    pub coefficients: Vec<Vec<f64>>,
    /// Shannon entropy cost of the selected basis.
    pub cost: f64,
}

impl WaveletPacketTree {
    pub fn reconstruct(&self) -> Vec<f64> {
        reconstruct_nodes(&self.basis, &self.selected, &self.coefficients)
    }
}

/// All packet coefficients up to `depth`: `table[l][b]`.
pub fn packet_table(signal: &[f64], basis: &WaveletBasis, depth: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    check_levels(signal.len(), depth)?;
    let mut table = vec![vec![signal.to_vec()]];
    for l in 0..depth {
        let mut next = Vec::with_capacity(2 << l);
        for node in &table[l] {
            let half = node.len() / 2;
            let mut a = vec![0.0; half];
            let mut d = vec![0.0; half];
            analysis_step(node, basis, &mut a, &mut d);
            next.push(a);
            next.push(d);
        }
        table.push(next);
    }
    Ok(table)
}

/// Additive Shannon cost `−Σ (x²/E) ln(x²/E)` relative to the total energy `E`.
pub fn entropy_cost(coeffs: &[f64], total_energy: f64) -> f64 {
    if total_energy <= 0.0 {
        return 0.0;
    }
    coeffs
        .iter()
        .map(|x| x * x / total_energy)
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.ln())
        .sum()
}

/// Coifman–Wickerhauser best basis: prune the packet tree bottom-up, keeping a
/// parent whenever its cost does not exceed the best cost of its children.
pub fn wavelet_packet_best_basis(signal: &[f64], basis: &WaveletBasis, depth: usize) -> Result<WaveletPacketTree> {
    let table = packet_table(signal, basis, depth)?;
    let energy: f64 = signal.iter().map(|x| x * x).sum();

    // best[l][b] = (cost, selected nodes below and including (l, b))
    let mut best: Vec<(f64, Vec<PacketNode>)> = table[depth]
        .iter()
        .enumerate()
        .map(|(b, c)| (entropy_cost(c, energy), vec![PacketNode { level: depth, band: b }]))
        .collect();
    for l in (0..depth).rev() {
        best = table[l]
            .iter()
            .enumerate()
            .map(|(b, c)| {
                let own = entropy_cost(c, energy);
                let (lc, ln) = &best[2 * b];
                let (hc, hn) = &best[2 * b + 1];
                if own <= lc + hc {
                    (own, vec![PacketNode { level: l, band: b }])
                } else {
                    (lc + hc, ln.iter().chain(hn).copied().collect())
                }
            })
            .collect();
    }
    let (cost, selected) = best.pop().expect("root node");
    let coefficients = selected.iter().map(|n| table[n.level][n.band].clone()).collect();
    Ok(WaveletPacketTree {
        basis: basis.clone(),
        depth,
        selected,
        coefficients,
        cost,
    })
}

/// Inverts a packet expansion given by any disjoint cover.
pub fn reconstruct_nodes(basis: &WaveletBasis, nodes: &[PacketNode], coefficients: &[Vec<f64>]) -> Vec<f64> {
    fn build(
        basis: &WaveletBasis,
        node: PacketNode,
        nodes: &[PacketNode],
        coefficients: &[Vec<f64>],
        len: usize,
    ) -> Vec<f64> {
        if let Some(k) = nodes.iter().position(|n| *n == node) {
            return coefficients[k].clone();
        }
        let low = PacketNode { level: node.level + 1, band: 2 * node.band };
        let high = PacketNode { level: node.level + 1, band: 2 * node.band + 1 };
        let a = build(basis, low, nodes, coefficients, len / 2);
        let d = build(basis, high, nodes, coefficients, len / 2);
        let mut out = vec![0.0; len];
        synthesis_step(&a, &d, basis, &mut out);
        out
    }
    let len = nodes
        .iter()
        .zip(coefficients)
        .map(|(n, c)| c.len() << n.level)
        .next()
        .unwrap_or(0);
    build(basis, PacketNode { level: 0, band: 0 }, nodes, coefficients, len)
}
