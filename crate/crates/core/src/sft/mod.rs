//! Subshifts of finite type over a 0-1 transition matrix.
//!
//! The alphabet is `0..n` and a word `w` is admissible when every
//! consecutive pair `(w[i], w[i+1])` is an allowed transition. Everything
//! downstream (maximal-entropy measures, cylinder masses, the return-block
//! correspondence) is built on the small kernel in this module.

mod correspondence;
mod parry;
mod perron;

pub use correspondence::{measure_correspondence, LiftedMeasure, MeasureCorrespondence, RestrictedMeasure};
pub use parry::{CylinderMeasure, GibbsConstants, ParryMeasure};
pub use perron::{matrix_power_dense, perron, perron_dense, PerronData};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SftError {
    #[error("matrix is not irreducible ({components} strongly connected components with cycles)")]
    NotIrreducible { components: usize },
    #[error("eigenvalue iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("matrix has cyclic period {expected}, caller supplied {got}")]
    PeriodMismatch { expected: usize, got: usize },
    #[error("empty word has no cylinder")]
    EmptyWord,
    #[error("row {row} of the transition matrix has no allowed successor")]
    DeadRow { row: usize },
}

/// Square 0-1 transition matrix; entry (i, j) allows the word `ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl TransitionMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Self {
        let n = rows.len();
        let mut bits = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "transition matrix must be square");
            bits.extend(row.iter().map(|&e| e != 0));
        }
        TransitionMatrix { n, bits }
    }

    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Self {
        let n = rows.len();
        let mut bits = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "transition matrix must be square");
            bits.extend_from_slice(row);
        }
        TransitionMatrix { n, bits }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.get(i, j))
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i, j))
    }

    /// Every row and every column carries at least one 1.
    pub fn is_essential(&self) -> bool {
        (0..self.n).all(|i| self.successors(i).next().is_some())
            && (0..self.n).all(|j| self.predecessors(j).next().is_some())
    }

    pub fn is_admissible(&self, word: &[usize]) -> Result<bool, SftError> {
        for &s in word {
            if s >= self.n {
                return Err(SftError::SymbolOutOfRange { symbol: s, alphabet: self.n });
            }
        }
        Ok(word.windows(2).all(|p| self.get(p[0], p[1])))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.get(i, j) { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    /// Restriction to a subset of symbols, in the order given.
    pub fn restrict(&self, symbols: &[usize]) -> TransitionMatrix {
        let k = symbols.len();
        let mut bits = Vec::with_capacity(k * k);
        for &i in symbols {
            for &j in symbols {
                bits.push(self.get(i, j));
            }
        }
        TransitionMatrix { n: k, bits }
    }

    /// True when the whole matrix is one strongly connected component
    /// containing a cycle.
    pub fn is_irreducible(&self) -> bool {
        let scc = scc_order(self);
        scc.components.len() == 1 && scc.cyclic[0]
    }
}

/// Strongly connected components plus the reachability order between them.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    /// Components sorted by their smallest symbol; each sorted internally.
    pub components: Vec<Vec<usize>>,
    /// Component index of each symbol.
    pub component_of: Vec<usize>,
    /// `reaches[c][d]`: some path of length >= 1 leads from c into d.
    pub reaches: Vec<Vec<bool>>,
    /// Component contains a cycle (a self-loop or more than one symbol).
    pub cyclic: Vec<bool>,
}

/// Tarjan decomposition of the transition graph with the induced partial
/// order on components.
pub fn scc_order(matrix: &TransitionMatrix) -> SccDecomposition {
    let n = matrix.size();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut raw_components: Vec<Vec<usize>> = Vec::new();

    // Iterative Tarjan: each frame holds (vertex, successor cursor).
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut cursor)) = call.last_mut() {
            let mut advanced = false;
            while *cursor < n {
                let w = *cursor;
                *cursor += 1;
                if !matrix.get(v, w) {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                raw_components.push(comp);
            }
        }
    }

    raw_components.sort_by_key(|c| c[0]);
    let mut component_of = vec![0usize; n];
    for (ci, comp) in raw_components.iter().enumerate() {
        for &v in comp {
            component_of[v] = ci;
        }
    }
    let k = raw_components.len();
    let mut cyclic = vec![false; k];
    for (ci, comp) in raw_components.iter().enumerate() {
        cyclic[ci] = comp.len() > 1 || matrix.get(comp[0], comp[0]);
    }
    // One-step edges between components, then transitive closure.
    let mut reaches = vec![vec![false; k]; k];
    for i in 0..n {
        for j in matrix.successors(i) {
            reaches[component_of[i]][component_of[j]] = true;
        }
    }
    for mid in 0..k {
        for a in 0..k {
            if reaches[a][mid] {
                for b in 0..k {
                    if reaches[mid][b] {
                        reaches[a][b] = true;
                    }
                }
            }
        }
    }
    SccDecomposition { components: raw_components, component_of, reaches, cyclic }
}

/// Cyclic class structure of an irreducible matrix: the period d and the
/// classes C_0, ..., C_{d-1} with every transition going C_i -> C_{i+1 mod d}.
#[derive(Debug, Clone)]
pub struct CyclicStructure {
    pub period: usize,
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

pub fn cyclic_structure(matrix: &TransitionMatrix) -> Result<CyclicStructure, SftError> {
    let n = matrix.size();
    let scc = scc_order(matrix);
    if !(scc.components.len() == 1 && scc.cyclic[0]) {
        return Err(SftError::NotIrreducible { components: scc.components.len() });
    }
    // BFS levels from symbol 0; the period is the gcd of (level(u)+1-level(v))
    // over all edges u -> v.
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for v in matrix.successors(u) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: i64 = 0;
    for u in 0..n {
        for v in matrix.successors(u) {
            let diff = level[u] as i64 + 1 - level[v] as i64;
            g = gcd(g, diff.abs());
        }
    }
    let d = g.max(1) as usize;
    let mut classes = vec![Vec::new(); d];
    let mut class_of = vec![0usize; n];
    for v in 0..n {
        let c = level[v] % d;
        class_of[v] = c;
        classes[c].push(v);
    }
    Ok(CyclicStructure { period: d, classes, class_of })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All admissible words of exactly the given length.
pub fn admissible_words(matrix: &TransitionMatrix, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    let mut word = Vec::with_capacity(len);
    fn extend(m: &TransitionMatrix, word: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if word.len() == len {
            out.push(word.clone());
            return;
        }
        if let Some(&last) = word.last() {
            for j in m.successors(last) {
                word.push(j);
                extend(m, word, len, out);
                word.pop();
            }
        } else {
            for s in 0..m.size() {
                word.push(s);
                extend(m, word, len, out);
                word.pop();
            }
        }
    }
    extend(matrix, &mut word, len, &mut out);
    out
}
