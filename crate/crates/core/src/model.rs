//! 3-XORSAT instances on hypergraphs.
//!
//! An instance is a set of three-spin parity constraints with ±1 couplings.
//! This module owns construction and validation, the two structured instance
//! families (a tree of triangles and its boundary closure), leaf removal,
//! coupling gauge normalization, and an exhaustive classical ground-state
//! search for small sizes.

use crate::gf2::{self, BitMatrix, BitVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("edge {0:?} must have three distinct vertices")]
    BadArity([usize; 3]),
    #[error("vertex {vertex} out of range 1..={n_spins}")]
    OutOfRange { vertex: usize, n_spins: usize },
    #[error("duplicate edge {0:?}")]
    DuplicateEdge([usize; 3]),
    #[error("coupling {0} is not +1 or -1")]
    BadCoupling(i8),
    #[error("edge and coupling counts differ ({edges} vs {couplings})")]
    CountMismatch { edges: usize, couplings: usize },
    #[error("instance must have at least one edge")]
    NoEdges,
    #[error("generation count must be at least 1")]
    InvalidG,
    #[error("{n_spins} spins exceed the enumeration bound of {limit}")]
    TooLarge { n_spins: usize, limit: usize },
    #[error("cannot parse instance: {0}")]
    BadText(String),
}

/// A 3-XORSAT problem: `n_spins` spins, hyperedges joining three spins each,
/// and a ±1 coupling per edge. Vertices are 1-based; each triple is stored
/// sorted ascending and triples are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    n_spins: usize,
    edges: Vec<[usize; 3]>,
    couplings: Vec<i8>,
}

impl Instance {
    pub fn new(
        n_spins: usize,
        edges: Vec<[usize; 3]>,
        couplings: Vec<i8>,
    ) -> Result<Self, ModelError> {
        if edges.is_empty() {
            return Err(ModelError::NoEdges);
        }
        if edges.len() != couplings.len() {
            return Err(ModelError::CountMismatch {
                edges: edges.len(),
                couplings: couplings.len(),
            });
        }
        let mut sorted_edges = Vec::with_capacity(edges.len());
        let mut seen = HashSet::new();
        for mut e in edges {
            e.sort_unstable();
            if e[0] == e[1] || e[1] == e[2] {
                return Err(ModelError::BadArity(e));
            }
            for &v in &e {
                if v == 0 || v > n_spins {
                    return Err(ModelError::OutOfRange { vertex: v, n_spins });
                }
            }
            if !seen.insert(e) {
                return Err(ModelError::DuplicateEdge(e));
            }
            sorted_edges.push(e);
        }
        for &j in &couplings {
            if j != 1 && j != -1 {
                return Err(ModelError::BadCoupling(j));
            }
        }
        Ok(Self {
            n_spins,
            edges: sorted_edges,
            couplings,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 3]] {
        &self.edges
    }

    pub fn couplings(&self) -> &[i8] {
        &self.couplings
    }

    /// Returns a copy with the given couplings.
    pub fn with_couplings(&self, couplings: Vec<i8>) -> Result<Self, ModelError> {
        Self::new(self.n_spins, self.edges.clone(), couplings)
    }

    /// Number of edges containing each spin (1-based query).
    pub fn degree(&self, vertex: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&vertex)).count()
    }

    /// Incidence matrix: one row per edge with ones at the (0-based) member
    /// spin columns.
    pub fn incidence_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.edges.len(), self.n_spins);
        for (a, e) in self.edges.iter().enumerate() {
            for &v in e {
                m.set(a, v - 1, true);
            }
        }
        m
    }

    /// Right-hand side of the parity system implied by the couplings:
    /// bit `a` is set iff coupling `a` is negative.
    pub fn rhs(&self) -> BitVector {
        let mut y = BitVector::zeros(self.edges.len());
        for (a, &j) in self.couplings.iter().enumerate() {
            if j == -1 {
                y.set(a, true);
            }
        }
        y
    }

    /// Text form: header `p xor3 N M`, then `e i j k J` per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("p xor3 {} {}\n", self.n_spins, self.edges.len());
        for (e, &j) in self.edges.iter().zip(&self.couplings) {
            let sign = if j > 0 { "+1" } else { "-1" };
            writeln!(out, "e {} {} {} {}", e[0], e[1], e[2], sign).unwrap();
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format.
    pub fn parse_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('c'));
        let header = lines
            .next()
            .ok_or_else(|| ModelError::BadText("empty input".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 4 || toks[0] != "p" || toks[1] != "xor3" {
            return Err(ModelError::BadText(format!("bad header {header:?}")));
        }
        let n_spins: usize = toks[2]
            .parse()
            .map_err(|_| ModelError::BadText("bad spin count".into()))?;
        let m: usize = toks[3]
            .parse()
            .map_err(|_| ModelError::BadText("bad edge count".into()))?;
        let mut edges = Vec::with_capacity(m);
        let mut couplings = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| ModelError::BadText("missing edge line".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 || toks[0] != "e" {
                return Err(ModelError::BadText(format!("bad edge line {line:?}")));
            }
            let mut e = [0usize; 3];
            for (slot, tok) in e.iter_mut().zip(&toks[1..4]) {
                *slot = tok
                    .parse()
                    .map_err(|_| ModelError::BadText(format!("bad vertex {tok:?}")))?;
            }
            let j = match toks[4] {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(ModelError::BadText(format!("bad coupling {other:?}"))),
            };
            edges.push(e);
            couplings.push(j);
        }
        Self::new(n_spins, edges, couplings)
    }
}

/// Tree of triangles with `g` generations and all couplings +1.
///
/// Generation 1 is a root edge on spins {1,2,3}; afterwards every vertex
/// introduced in the previous generation spawns one edge containing it plus
/// two fresh spins. The result has `3(2^g - 1)` spins, `3·2^(g-1) - 2` edges,
/// and maximum degree 2, with labels assigned breadth-first.
pub fn generate_tree(g: usize) -> Result<Instance, ModelError> {
    if g == 0 {
        return Err(ModelError::InvalidG);
    }
    let mut edges = vec![[1, 2, 3]];
    let mut previous = vec![1usize, 2, 3];
    let mut next_spin = 4usize;
    for _ in 2..=g {
        let mut fresh = Vec::with_capacity(previous.len() * 2);
        for &v in &previous {
            let (a, b) = (next_spin, next_spin + 1);
            next_spin += 2;
            edges.push([v, a, b]);
            fresh.push(a);
            fresh.push(b);
        }
        previous = fresh;
    }
    let n_spins = next_spin - 1;
    let couplings = vec![1; edges.len()];
    Instance::new(n_spins, edges, couplings)
}

/// Closure of the tree: the degree-1 boundary spins of `generate_tree(g)` are
/// placed on a cycle in ascending label order, one fresh spin is inserted
/// between each consecutive pair, and every boundary spin gains one edge with
/// its two flanking fresh spins. Every spin then has degree exactly 2.
pub fn generate_closure(g: usize) -> Result<Instance, ModelError> {
    let tree = generate_tree(g)?;
    let boundary: Vec<usize> = (1..=tree.n_spins())
        .filter(|&v| tree.degree(v) == 1)
        .collect();
    let b = boundary.len();
    let mut edges = tree.edges().to_vec();
    let first_fresh = tree.n_spins() + 1;
    // Fresh spin k sits between boundary[k] and boundary[(k+1) % b].
    for (k, &v) in boundary.iter().enumerate() {
        let left = first_fresh + (k + b - 1) % b;
        let right = first_fresh + k;
        edges.push([v, left, right]);
    }
    let n_spins = tree.n_spins() + b;
    let couplings = vec![1; edges.len()];
    Instance::new(n_spins, edges, couplings)
}

/// Record of one leaf-removal run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafRemovalReport {
    /// Ordered steps: the removed edge index and the spins that left the
    /// hypergraph with it.
    pub steps: Vec<(usize, Vec<usize>)>,
    /// Steps that removed two or more spins of one edge at once.
    pub pair_events: usize,
    /// Edge indices still alive when no leaf remained.
    pub residual_core: Vec<usize>,
    pub fully_decimated: bool,
}

/// Iteratively removes edges containing a degree-1 spin, together with all of
/// their degree-1 spins. Ties are broken by lowest edge index.
pub fn leaf_removal(inst: &Instance) -> LeafRemovalReport {
    let m = inst.n_edges();
    let mut degree = vec![0usize; inst.n_spins() + 1];
    for e in inst.edges() {
        for &v in e {
            degree[v] += 1;
        }
    }
    let mut alive = vec![true; m];
    let mut steps = Vec::new();
    loop {
        let next = (0..m).find(|&a| {
            alive[a] && inst.edges()[a].iter().any(|&v| degree[v] == 1)
        });
        let Some(a) = next else { break };
        alive[a] = false;
        let removed: Vec<usize> = inst.edges()[a]
            .iter()
            .copied()
            .filter(|&v| degree[v] == 1)
            .collect();
        for &v in &inst.edges()[a] {
            degree[v] -= 1;
        }
        steps.push((a, removed));
    }
    let residual_core: Vec<usize> = (0..m).filter(|&a| alive[a]).collect();
    let pair_events = steps.iter().filter(|(_, s)| s.len() >= 2).count();
    LeafRemovalReport {
        fully_decimated: residual_core.is_empty(),
        pair_events,
        residual_core,
        steps,
    }
}

/// Which normalization the coupling gauge reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeCase {
    /// All couplings flipped to +1.
    AllPlus,
    /// A single irremovable -1 coupling, placed on the designated redundant
    /// edge (index given).
    SingleNegative(usize),
    /// Unsatisfiable with residual negative couplings at the given edges.
    Residual(Vec<usize>),
}

/// Result of normalizing couplings by spin-flip relabelings.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeResult {
    pub satisfiable: bool,
    /// Spins whose sign was flipped (1-based).
    pub flipped_spins: Vec<usize>,
    pub normalized: Vec<i8>,
    pub case: GaugeCase,
}

/// Normalizes couplings by flipping spin signs.
///
/// Solves the parity system for the coupling signs. When satisfiable, all
/// normalized couplings are +1. When not, and flipping the right-hand side on
/// the designated redundant edge (the single dependent row of the incidence
/// matrix) restores consistency, exactly one -1 survives there. Otherwise the
/// flips from the echelon-consistent subsystem are applied and the residual
/// negative couplings are reported.
pub fn gauge_reduce(inst: &Instance) -> GaugeResult {
    let h = inst.incidence_matrix();
    let y = inst.rhs();
    let sol = gf2::solve2(&h, &y);
    if sol.satisfiable {
        let f = sol.particular.unwrap();
        let normalized = apply_flips(inst, &f);
        debug_assert!(normalized.iter().all(|&j| j == 1));
        return GaugeResult {
            satisfiable: true,
            flipped_spins: f.ones().map(|i| i + 1).collect(),
            normalized,
            case: GaugeCase::AllPlus,
        };
    }
    // One dependent row: try to push the whole inconsistency onto it.
    let rb = gf2::row_basis(&h, None).expect("greedy row basis cannot fail");
    if let [d] = rb.dependent[..] {
        let mut y2 = y.clone();
        y2.set(d, !y2.get(d));
        let retry = gf2::solve2(&h, &y2);
        if retry.satisfiable {
            let f = retry.particular.unwrap();
            let normalized = apply_flips(inst, &f);
            debug_assert!(normalized
                .iter()
                .enumerate()
                .all(|(a, &j)| if a == d { j == -1 } else { j == 1 }));
            return GaugeResult {
                satisfiable: false,
                flipped_spins: f.ones().map(|i| i + 1).collect(),
                normalized,
                case: GaugeCase::SingleNegative(d),
            };
        }
    }
    // General unsatisfiable case: solve the consistent subsystem (independent
    // rows only) and report whatever negatives remain.
    let sub = h.submatrix_rows(&rb.independent);
    let mut ysub = BitVector::zeros(rb.independent.len());
    for (k, &i) in rb.independent.iter().enumerate() {
        ysub.set(k, y.get(i));
    }
    let f = gf2::solve2(&sub, &ysub)
        .particular
        .expect("independent rows are always consistent");
    let normalized = apply_flips(inst, &f);
    let residual: Vec<usize> = normalized
        .iter()
        .enumerate()
        .filter_map(|(a, &j)| (j == -1).then_some(a))
        .collect();
    GaugeResult {
        satisfiable: false,
        flipped_spins: f.ones().map(|i| i + 1).collect(),
        normalized,
        case: GaugeCase::Residual(residual),
    }
}

fn apply_flips(inst: &Instance, flips: &BitVector) -> Vec<i8> {
    inst.edges()
        .iter()
        .zip(inst.couplings())
        .map(|(e, &j)| {
            let parity = e.iter().filter(|&&v| flips.get(v - 1)).count() % 2;
            if parity == 1 {
                -j
            } else {
                j
            }
        })
        .collect()
}

pub const BRUTE_FORCE_DEFAULT_LIMIT: usize = 26;

/// Exhaustive classical ground state: minimum of `Σ_a (1 - J_a s_i s_j s_k)`
/// over all spin assignments, together with its multiplicity.
pub fn brute_force_classical(
    inst: &Instance,
    limit: usize,
) -> Result<(i64, u64), ModelError> {
    let n = inst.n_spins();
    if n > limit {
        return Err(ModelError::TooLarge {
            n_spins: n,
            limit,
        });
    }
    // Edge masks over assignment bits; bit i set means spin i+1 points down.
    let masks: Vec<(u64, i8)> = inst
        .edges()
        .iter()
        .zip(inst.couplings())
        .map(|(e, &j)| {
            let mask = e.iter().fold(0u64, |m, &v| m | 1 << (v - 1));
            (mask, j)
        })
        .collect();
    let total = 1u64 << n;
    let chunk = 1u64 << n.min(16);
    let (best, count) = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(total);
            let mut best = i64::MAX;
            let mut count = 0u64;
            for assign in lo..hi {
                let mut energy = 0i64;
                for &(mask, j) in &masks {
                    let sign = if (assign & mask).count_ones() & 1 == 1 {
                        -1
                    } else {
                        1
                    };
                    energy += i64::from(1 - j * sign);
                }
                if energy < best {
                    best = energy;
                    count = 1;
                } else if energy == best {
                    count += 1;
                }
            }
            (best, count)
        })
        .reduce(
            || (i64::MAX, 0),
            |(ea, ca), (eb, cb)| {
                if ea < eb {
                    (ea, ca)
                } else if eb < ea {
                    (eb, cb)
                } else {
                    (ea, ca + cb)
                }
            },
        );
    Ok((best, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle_is_valid() {
        let inst = Instance::new(3, vec![[1, 2, 3]], vec![1]).unwrap();
        assert_eq!(inst.n_spins(), 3);
        assert_eq!(inst.n_edges(), 1);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Instance::new(4, vec![[1, 1, 2]], vec![1]).unwrap_err(),
            ModelError::BadArity([1, 1, 2])
        );
        assert!(matches!(
            Instance::new(3, vec![[1, 2, 4]], vec![1]).unwrap_err(),
            ModelError::OutOfRange { vertex: 4, .. }
        ));
        assert_eq!(
            Instance::new(4, vec![[1, 2, 3], [3, 2, 1]], vec![1, 1]).unwrap_err(),
            ModelError::DuplicateEdge([1, 2, 3])
        );
        assert!(matches!(
            Instance::new(3, vec![[1, 2, 3]], vec![2]).unwrap_err(),
            ModelError::BadCoupling(2)
        ));
    }

    #[test]
    fn tree_counts_match_closed_forms() {
        for g in 1..=8 {
            let t = generate_tree(g).unwrap();
            assert_eq!(t.n_spins(), 3 * ((1 << g) - 1), "g={g}");
            assert_eq!(t.n_edges(), 3 * (1 << (g - 1)) - 2, "g={g}");
            let maxdeg = (1..=t.n_spins()).map(|v| t.degree(v)).max().unwrap();
            assert!(maxdeg <= 2);
        }
        assert!(matches!(generate_tree(0), Err(ModelError::InvalidG)));
    }

    #[test]
    fn tree_g2_shape() {
        let t = generate_tree(2).unwrap();
        assert_eq!(t.n_spins(), 9);
        assert_eq!(t.n_edges(), 4);
        assert_eq!(
            t.edges(),
            &[[1, 2, 3], [1, 4, 5], [2, 6, 7], [3, 8, 9]]
        );
    }

    #[test]
    fn tree_kernel_dimension() {
        // q = 3·2^(g-1) - 1 independent parity symmetries.
        for g in 1..=6 {
            let t = generate_tree(g).unwrap();
            let h = t.incidence_matrix();
            let q = t.n_spins() - h.rank2();
            assert_eq!(q, 3 * (1 << (g - 1)) - 1, "g={g}");
        }
    }

    #[test]
    fn closure_g1_matches_reference_instance() {
        let c = generate_closure(1).unwrap();
        assert_eq!(c.n_spins(), 6);
        assert_eq!(
            c.edges(),
            &[[1, 2, 3], [1, 4, 6], [2, 4, 5], [3, 5, 6]]
        );
        let h = c.incidence_matrix();
        let expected =
            BitMatrix::parse_rows(&["111000", "100101", "010110", "001011"]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn closure_counts_and_degrees() {
        for g in 1..=6 {
            let c = generate_closure(g).unwrap();
            let n = 3 * (3 * (1 << (g - 1)) - 1);
            assert_eq!(c.n_spins(), n, "g={g}");
            assert_eq!(c.n_edges(), 2 * n / 3, "g={g}");
            for v in 1..=c.n_spins() {
                assert_eq!(c.degree(v), 2, "g={g} v={v}");
            }
            if g <= 4 {
                let q = c.n_spins() - c.incidence_matrix().rank2();
                assert_eq!(q, 3 * (1 << (g - 1)), "g={g}");
            }
        }
    }

    #[test]
    fn closure_rows_sum_to_zero() {
        let c = generate_closure(2).unwrap();
        let h = c.incidence_matrix();
        let mut acc = BitVector::zeros(h.cols());
        for row in h.row_iter() {
            acc.xor_with(row);
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn leaf_removal_tree_g2() {
        let report = leaf_removal(&generate_tree(2).unwrap());
        assert!(report.fully_decimated);
        assert_eq!(report.steps.len(), 4);
        assert_eq!(report.pair_events, 3);
        // No spin appears twice across steps.
        let mut seen = HashSet::new();
        for (_, spins) in &report.steps {
            for &v in spins {
                assert!(seen.insert(v));
            }
        }
    }

    #[test]
    fn leaf_removal_closure_removes_nothing() {
        for g in 1..=3 {
            let report = leaf_removal(&generate_closure(g).unwrap());
            assert!(report.steps.is_empty());
            assert!(!report.fully_decimated);
            assert_eq!(
                report.residual_core.len(),
                generate_closure(g).unwrap().n_edges()
            );
        }
    }

    #[test]
    fn leaf_removal_single_triangle() {
        let inst = Instance::new(3, vec![[1, 2, 3]], vec![1]).unwrap();
        let report = leaf_removal(&inst);
        assert!(report.fully_decimated);
        assert_eq!(report.steps, vec![(0, vec![1, 2, 3])]);
        assert_eq!(report.pair_events, 1);
    }

    /// Decimation success is independent of removal order.
    #[test]
    fn leaf_removal_order_independent_on_shuffled_trees() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let t = generate_tree(3).unwrap();
        for _ in 0..10 {
            let mut order: Vec<usize> = (0..t.n_edges()).collect();
            order.shuffle(&mut rng);
            let edges: Vec<[usize; 3]> = order.iter().map(|&a| t.edges()[a]).collect();
            let shuffled = Instance::new(t.n_spins(), edges, vec![1; t.n_edges()]).unwrap();
            assert!(leaf_removal(&shuffled).fully_decimated);
        }
    }

    #[test]
    fn gauge_already_normalized() {
        let c = generate_closure(1).unwrap();
        let g = gauge_reduce(&c);
        assert!(g.satisfiable);
        assert!(g.flipped_spins.is_empty());
        assert_eq!(g.case, GaugeCase::AllPlus);
    }

    #[test]
    fn gauge_even_parity_negatives_removable() {
        let c = generate_closure(1)
            .unwrap()
            .with_couplings(vec![-1, -1, 1, 1])
            .unwrap();
        let g = gauge_reduce(&c);
        assert!(g.satisfiable);
        assert!(g.normalized.iter().all(|&j| j == 1));
    }

    #[test]
    fn gauge_odd_parity_leaves_single_negative() {
        let c = generate_closure(1)
            .unwrap()
            .with_couplings(vec![-1, 1, 1, 1])
            .unwrap();
        let g = gauge_reduce(&c);
        assert!(!g.satisfiable);
        assert_eq!(g.normalized.iter().filter(|&&j| j == -1).count(), 1);
        // The designated redundant edge for the greedy basis is the last row.
        assert_eq!(g.case, GaugeCase::SingleNegative(3));
        assert_eq!(g.normalized, vec![1, 1, 1, -1]);
    }

    #[test]
    fn gauge_flip_consistency() {
        // The reported flips reproduce the normalized couplings exactly.
        use rand::RngExt;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for g in 1..=2 {
            let c = generate_closure(g).unwrap();
            for _ in 0..8 {
                let js: Vec<i8> = (0..c.n_edges())
                    .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                    .collect();
                let inst = c.with_couplings(js).unwrap();
                let res = gauge_reduce(&inst);
                let mut flips = BitVector::zeros(inst.n_spins());
                for &v in &res.flipped_spins {
                    flips.set(v - 1, true);
                }
                assert_eq!(apply_flips(&inst, &flips), res.normalized);
                let parity: i8 = inst.couplings().iter().product();
                assert_eq!(res.satisfiable, parity == 1);
            }
        }
    }

    #[test]
    fn brute_force_tree_g2() {
        let t = generate_tree(2).unwrap();
        let (e0, deg) = brute_force_classical(&t, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
        assert_eq!(e0, 0);
        assert_eq!(deg, 32); // 2^(N - rank) = 2^5
    }

    #[test]
    fn brute_force_closure_g1() {
        let c = generate_closure(1).unwrap();
        let (e0, deg) = brute_force_classical(&c, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
        assert_eq!(e0, 0);
        assert_eq!(deg, 8);
    }

    #[test]
    fn brute_force_unsat_closure() {
        let c = generate_closure(1)
            .unwrap()
            .with_couplings(vec![-1, 1, 1, 1])
            .unwrap();
        let (e0, deg) = brute_force_classical(&c, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
        assert_eq!(e0, 2);
        assert_eq!(deg, 32); // extra M-fold degeneracy: 4 * 8
    }

    #[test]
    fn brute_force_respects_limit() {
        let t = generate_tree(3).unwrap();
        assert!(matches!(
            brute_force_classical(&t, 12),
            Err(ModelError::TooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_degeneracy_matches_kernel_dimension() {
        for inst in [generate_tree(1).unwrap(), generate_tree(2).unwrap(), generate_closure(1).unwrap()] {
            let (e0, deg) = brute_force_classical(&inst, BRUTE_FORCE_DEFAULT_LIMIT).unwrap();
            assert_eq!(e0, 0);
            let r = inst.incidence_matrix().rank2();
            assert_eq!(deg, 1 << (inst.n_spins() - r));
        }
    }

    #[test]
    fn text_round_trip() {
        let c = generate_closure(1)
            .unwrap()
            .with_couplings(vec![-1, 1, 1, -1])
            .unwrap();
        let text = c.to_text();
        assert!(text.starts_with("p xor3 6 4\n"));
        assert_eq!(Instance::parse_text(&text).unwrap(), c);
    }

    #[test]
    fn json_round_trip() {
        let t = generate_tree(2).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"n_spins\":9"));
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
