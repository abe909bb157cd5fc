//! Higher-block presentation of a shift space and its adjacency matrix.
//!
//! States are the allowed `(L-1)`-blocks, `L` being the longest forbidden
//! block (at least 2). An edge `u -> v` labelled `s` exists when the
//! `L`-block `u s` is allowed and `v` is `u s` with its first symbol dropped,
//! so paths of length `n - L + 1` are in bijection with allowed `n`-blocks.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::enumerate::{count_blocks, enumerate_blocks_capped};
use crate::error::{Error, Result};
use crate::shift::{Block, ShiftSpaceSpec, Symbol};
use crate::spectral::{EntropyReport, LogBase, Method};

/// Default bound on `k^(L-1)`, the number of candidate states.
pub const DEFAULT_STATE_CAP: u64 = 1 << 20;

/// Iteration cap for [`dominant_eigenvalue`].
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferAutomaton {
    spec: ShiftSpaceSpec,
    order: usize,
    states: Vec<Block>,
    edges: Vec<Edge>,
    trimmed: bool,
}

impl TransferAutomaton {
    pub fn spec(&self) -> &ShiftSpaceSpec {
        &self.spec
    }

    /// Length of the blocks labelling states.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn states(&self) -> &[Block] {
        &self.states
    }

    /// Edges sorted by `(from, to, label)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_trimmed(&self) -> bool {
        self.trimmed
    }

    pub fn adjacency(&self) -> AdjacencyMatrix {
        AdjacencyMatrix::from_edges(self.states.len(), self.edges.iter().map(|e| (e.from, e.to)))
    }

    /// One `u v label` line per edge, states written as block text.
    pub fn edge_list(&self) -> String {
        let k = self.spec.alphabet_size();
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{} {} {}",
                self.states[e.from].to_text(k),
                self.states[e.to].to_text(k),
                e.label
            );
        }
        out
    }
}

/// Sparse square matrix with nonnegative integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    size: usize,
    // per row: (column, multiplicity), sorted by column
    rows: Vec<Vec<(usize, u32)>>,
}

impl AdjacencyMatrix {
    pub fn from_edges<I>(size: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut rows: Vec<Vec<(usize, u32)>> = vec![Vec::new(); size];
        for (u, v) in edges {
            assert!(
                u < size && v < size,
                "edge ({u}, {v}) outside a {size}x{size} matrix"
            );
            match rows[u].iter_mut().find(|(c, _)| *c == v) {
                Some((_, n)) => *n += 1,
                None => rows[u].push((v, 1)),
            }
        }
        for row in &mut rows {
            row.sort_unstable();
        }
        AdjacencyMatrix { size, rows }
    }

    /// Panics when `dense` is not square.
    pub fn from_dense(dense: &[Vec<u32>]) -> Self {
        let size = dense.len();
        let rows = dense
            .iter()
            .map(|row| {
                assert_eq!(row.len(), size, "matrix must be square");
                row.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(j, &x)| (j, x))
                    .collect()
            })
            .collect();
        AdjacencyMatrix { size, rows }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.rows[u]
            .binary_search_by_key(&v, |(c, _)| *c)
            .map(|i| self.rows[u][i].1)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        (0..self.size)
            .map(|u| (0..self.size).map(|v| self.get(u, v)).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Sum of all entries of `A^p`, in exact arithmetic.
    pub fn total_of_power(&self, p: usize) -> BigUint {
        let mut v = vec![BigUint::one(); self.size];
        for _ in 0..p {
            v = self
                .rows
                .iter()
                .map(|row| {
                    row.iter().fold(BigUint::zero(), |mut acc, &(c, n)| {
                        acc += &v[c] * n;
                        acc
                    })
                })
                .collect();
        }
        v.into_iter().sum()
    }

    fn shifted_product(&self, x: &[f64], y: &mut [f64]) {
        for (u, row) in self.rows.iter().enumerate() {
            y[u] = x[u] + row.iter().map(|&(c, n)| n as f64 * x[c]).sum::<f64>();
        }
    }

    /// Strongly connected components, in no particular order.
    fn components(&self) -> Vec<Vec<usize>> {
        // Iterative Tarjan.
        let n = self.size;
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut next = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&(u, pos)) = call.last() {
                if let Some(&(w, _)) = self.rows[u].get(pos) {
                    if let Some(top) = call.last_mut() {
                        top.1 += 1;
                    }
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[u] = low[u].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[u]);
                    }
                    if low[u] == index[u] {
                        let mut comp = Vec::new();
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp.push(w);
                            if w == u {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    fn restrict(&self, states: &[usize]) -> AdjacencyMatrix {
        let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let rows = states
            .iter()
            .map(|&s| {
                self.rows[s]
                    .iter()
                    .filter_map(|&(c, n)| pos.get(&c).map(|&j| (j, n)))
                    .collect()
            })
            .collect();
        AdjacencyMatrix {
            size: states.len(),
            rows,
        }
    }
}

/// Builds the untrimmed automaton, refusing when `k^(L-1)` exceeds
/// [`DEFAULT_STATE_CAP`].
pub fn build_automaton(spec: &ShiftSpaceSpec) -> Result<TransferAutomaton> {
    build_automaton_capped(spec, DEFAULT_STATE_CAP)
}

pub fn build_automaton_capped(spec: &ShiftSpaceSpec, cap: u64) -> Result<TransferAutomaton> {
    let k = spec.alphabet_size();
    let order = spec.forbidden().max_len().max(2) - 1;
    if (k as f64).powi(order as i32) > cap as f64 {
        return Err(Error::ResourceLimit(format!(
            "automaton would have up to {k}^{order} states, above the cap of {cap}"
        )));
    }
    let states = enumerate_blocks_capped(spec, order, u64::MAX)?;
    let lookup: HashMap<&[Symbol], usize> = states
        .iter()
        .enumerate()
        .map(|(i, b)| (b.symbols(), i))
        .collect();

    let mut edges = Vec::new();
    let mut word = Vec::with_capacity(order + 1);
    for (from, state) in states.iter().enumerate() {
        for s in 0..k {
            word.clear();
            word.extend_from_slice(state.symbols());
            word.push(s);
            if spec.forbidden().ends_in(&word) {
                continue;
            }
            let to = lookup[&word[1..]];
            edges.push(Edge { from, to, label: s });
        }
    }
    edges.sort_unstable();
    Ok(TransferAutomaton {
        spec: spec.clone(),
        order,
        states,
        edges,
        trimmed: false,
    })
}

/// Repeatedly drops states with no incoming or no outgoing edge. What
/// remains presents exactly the bi-infinitely extendable blocks.
pub fn trim(automaton: &TransferAutomaton) -> Result<TransferAutomaton> {
    let n = automaton.states.len();
    let mut alive = vec![true; n];
    loop {
        let mut in_deg = vec![0usize; n];
        let mut out_deg = vec![0usize; n];
        for e in automaton
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
        {
            out_deg[e.from] += 1;
            in_deg[e.to] += 1;
        }
        let mut changed = false;
        for i in 0..n {
            if alive[i] && (in_deg[i] == 0 || out_deg[i] == 0) {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut remap = vec![usize::MAX; n];
    let mut states = Vec::new();
    for (i, state) in automaton.states.iter().enumerate() {
        if alive[i] {
            remap[i] = states.len();
            states.push(state.clone());
        }
    }
    if states.is_empty() {
        return Err(Error::EmptyShift);
    }
    let edges = automaton
        .edges
        .iter()
        .filter(|e| alive[e.from] && alive[e.to])
        .map(|e| Edge {
            from: remap[e.from],
            to: remap[e.to],
            label: e.label,
        })
        .collect();
    Ok(TransferAutomaton {
        spec: automaton.spec.clone(),
        order: automaton.order,
        states,
        edges,
        trimmed: true,
    })
}

/// Number of allowed `n`-blocks as `1ᵀ A^(n-L+1) 1`. Shorter lengths are
/// delegated to [`count_blocks`].
pub fn count_via_matrix(automaton: &TransferAutomaton, n: usize) -> BigUint {
    if n < automaton.order {
        return count_blocks(&automaton.spec, n);
    }
    automaton.adjacency().total_of_power(n - automaton.order)
}

/// Outcome of power iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerronEstimate {
    pub eigenvalue: f64,
    /// Width of the final Collatz–Wielandt bracket around the eigenvalue.
    pub residual: f64,
    /// Total over all components.
    pub iterations: usize,
}

/// Perron root of a nonnegative matrix by power iteration on `A + I` from the
/// all-ones vector, run on each strongly connected component.
///
/// For a positive vector `x`, `min (Bx)_i / x_i <= ρ(B) <= max (Bx)_i / x_i`;
/// iteration stops once that bracket is narrower than `tol`, and the midpoint
/// minus one is returned.
pub fn dominant_eigenvalue(matrix: &AdjacencyMatrix, tol: f64) -> Result<PerronEstimate> {
    if !(tol > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if matrix.is_zero() {
        return Err(Error::EmptyShift);
    }
    let mut best = PerronEstimate {
        eigenvalue: 0.0,
        residual: 0.0,
        iterations: 0,
    };
    for comp in matrix.components() {
        let sub = matrix.restrict(&comp);
        if sub.is_zero() {
            // a single state without a self-loop has spectral radius zero
            continue;
        }
        let est = power_iterate(&sub, tol)?;
        let iterations = best.iterations + est.iterations;
        if est.eigenvalue > best.eigenvalue {
            best = est;
        }
        best.iterations = iterations;
    }
    Ok(best)
}

fn power_iterate(matrix: &AdjacencyMatrix, tol: f64) -> Result<PerronEstimate> {
    let n = matrix.size();
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    for iter in 1..=MAX_POWER_ITERATIONS {
        matrix.shifted_product(&x, &mut y);
        lo = f64::INFINITY;
        hi = 0.0f64;
        let mut norm = 0.0f64;
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
            norm = norm.max(*yi);
        }
        if hi - lo < tol {
            return Ok(PerronEstimate {
                eigenvalue: 0.5 * (lo + hi) - 1.0,
                residual: hi - lo,
                iterations: iter,
            });
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_POWER_ITERATIONS,
        last: 0.5 * (lo + hi) - 1.0,
        residual: hi - lo,
    })
}

/// Entropy from the Perron root of the trimmed automaton.
pub fn entropy_numeric(spec: &ShiftSpaceSpec, base: LogBase, tol: f64) -> Result<EntropyReport> {
    let automaton = trim(&build_automaton(spec)?)?;
    let est = dominant_eigenvalue(&automaton.adjacency(), tol)?;
    Ok(EntropyReport {
        lambda0: est.eigenvalue,
        entropy: base.log(est.eigenvalue),
        log_base: base,
        method: Method::TransferMatrix,
        residual: est.residual,
    })
}
