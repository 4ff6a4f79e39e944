//! Graphs, dyad-indexed contingency tables, and sufficient statistics.
//!
//! A network on `n` nodes is stored as a table of dyad states rather than an
//! adjacency matrix: every unordered pair `{i, j}` with `i < j` owns a block
//! of cells, one per possible configuration of the dyad. Directed dyads have
//! four states, ordered `(00, 10, 01, 11)`, where `10` means the edge from
//! the smaller-labelled node to the larger one is present and `01` the
//! reverse. Undirected dyads have two states `(00, 11)`. Log-linear models
//! act on these tables through an integer design matrix, and the sufficient
//! statistic of a table is simply that matrix applied to the cell vector.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::error::{Error, Result};

/// Number of dyads (unordered node pairs) on `n` nodes.
pub fn dyad_count(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// Index of the dyad `{i, j}` (zero-based, `i < j`) in lexicographic order.
pub fn dyad_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`dyad_index`]: the node pair `(i, j)` with `i < j`.
pub fn dyad_nodes(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    panic!("dyad index out of range");
}

/// Whether multiple edges (and hence unbounded cell counts) are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// At most one edge per direction per dyad; each dyad block sums to one.
    Simple,
    /// Nonnegative edge multiplicities; dyad blocks are unconstrained.
    Multigraph,
}

/// Cell layout of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableShape {
    /// Dyad blocks for a network on `n` nodes.
    Dyadic { n: usize, directed: bool },
    /// A plain vector of cells (e.g. a flattened two-way table).
    Flat { len: usize },
}

impl TableShape {
    /// Total number of cells.
    pub fn len(&self) -> usize {
        match *self {
            TableShape::Dyadic { n, directed } => {
                dyad_count(n) * if directed { 4 } else { 2 }
            }
            TableShape::Flat { len } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells per dyad block (4 directed, 2 undirected); `None` for flat shapes.
    pub fn states_per_dyad(&self) -> Option<usize> {
        match *self {
            TableShape::Dyadic { directed, .. } => Some(if directed { 4 } else { 2 }),
            TableShape::Flat { .. } => None,
        }
    }
}

/// A nonnegative integer contingency table with a fixed shape and mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadTable {
    shape: TableShape,
    mode: Mode,
    cells: Vec<i64>,
}

impl DyadTable {
    /// Wraps a plain cell vector (multigraph mode, no dyad structure).
    pub fn plain(cells: Vec<i64>) -> Result<Self> {
        let shape = TableShape::Flat { len: cells.len() };
        Self::new(shape, Mode::Multigraph, cells)
    }

    /// Builds a table after validating cells against the shape and mode.
    pub fn new(shape: TableShape, mode: Mode, cells: Vec<i64>) -> Result<Self> {
        if cells.len() != shape.len() {
            return Err(Error::DimensionMismatch {
                expected: shape.len(),
                got: cells.len(),
            });
        }
        if mode == Mode::Simple && matches!(shape, TableShape::Flat { .. }) {
            return Err(Error::InvalidTable(
                "simple mode requires a dyadic shape".into(),
            ));
        }
        let t = DyadTable { shape, mode, cells };
        t.validate()?;
        Ok(t)
    }

    /// The table of the empty graph: every dyad in state `00`.
    pub fn empty_graph(n: usize, directed: bool, mode: Mode) -> Self {
        let shape = TableShape::Dyadic { n, directed };
        let s = shape.states_per_dyad().unwrap();
        let mut cells = vec![0; shape.len()];
        if mode == Mode::Simple {
            for d in 0..dyad_count(n) {
                cells[d * s] = 1;
            }
        }
        DyadTable { shape, mode, cells }
    }

    pub fn shape(&self) -> TableShape {
        self.shape
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Replaces the cells, keeping shape and mode, after validation.
    pub fn with_cells(&self, cells: Vec<i64>) -> Result<Self> {
        Self::new(self.shape, self.mode, cells)
    }

    /// Sum of all cells.
    pub fn total(&self) -> i64 {
        self.cells.iter().sum()
    }

    /// Checks nonnegativity and, in simple mode, that every dyad block sums to one.
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.cells.iter().find(|&&c| c < 0) {
            return Err(Error::InvalidTable(format!("negative cell count {c}")));
        }
        if self.mode == Mode::Simple {
            let s = self.shape.states_per_dyad().expect("checked in new");
            for (d, block) in self.cells.chunks_exact(s).enumerate() {
                let sum: i64 = block.iter().sum();
                if sum != 1 {
                    return Err(Error::InvalidTable(format!(
                        "dyad {d} has cell sum {sum}, expected 1 in simple mode"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Fast validity check for a candidate cell vector of the same shape/mode.
    pub fn cells_valid(&self, cells: &[i64]) -> bool {
        if cells.len() != self.cells.len() || cells.iter().any(|&c| c < 0) {
            return false;
        }
        if self.mode == Mode::Simple {
            let s = self.shape.states_per_dyad().expect("simple is dyadic");
            return cells.chunks_exact(s).all(|b| b.iter().sum::<i64>() == 1);
        }
        true
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [i64] {
        &mut self.cells
    }
}

/// A labelled graph or multigraph without self-loops.
///
/// Edges are stored with multiplicities; for undirected graphs the key is the
/// sorted node pair. Node identifiers are zero-based internally, with
/// `labels` carrying the original names in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphData {
    n: usize,
    directed: bool,
    labels: Vec<String>,
    edges: BTreeMap<(usize, usize), i64>,
}

impl GraphData {
    /// An edgeless graph on `n` nodes labelled `1..=n`.
    pub fn new(n: usize, directed: bool) -> Self {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        GraphData {
            n,
            directed,
            labels,
            edges: BTreeMap::new(),
        }
    }

    /// An edgeless graph with explicit node labels.
    pub fn with_labels(labels: Vec<String>, directed: bool) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidGraph(format!("duplicate node label {l:?}")));
            }
        }
        Ok(GraphData {
            n: labels.len(),
            directed,
            labels,
            edges: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Adds `mult` parallel edges from `a` to `b` (zero-based node ids).
    pub fn add_edge(&mut self, a: usize, b: usize, mult: i64) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({a}, {b}) out of range for {} nodes",
                self.n
            )));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!(
                "self-loop on node {:?}",
                self.labels[a]
            )));
        }
        if mult < 0 {
            return Err(Error::InvalidGraph(format!("negative multiplicity {mult}")));
        }
        if mult > 0 {
            let key = if self.directed || a < b { (a, b) } else { (b, a) };
            *self.edges.entry(key).or_insert(0) += mult;
        }
        Ok(())
    }

    /// Edge multiplicity from `a` to `b` (for undirected graphs, of `{a, b}`).
    pub fn multiplicity(&self, a: usize, b: usize) -> i64 {
        let key = if self.directed || a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied().unwrap_or(0)
    }

    /// Edges with positive multiplicity, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.edges
            .iter()
            .filter(|&(_, &m)| m > 0)
            .map(|(&(a, b), &m)| (a, b, m))
    }

    /// Total edge count, with multiplicity.
    pub fn edge_total(&self) -> i64 {
        self.edges.values().sum()
    }
}

/// Converts a graph to its dyad table.
///
/// In simple mode every dyad must hold at most one edge per direction; the
/// resulting table is one-hot per dyad. In multigraph mode directed
/// multiplicities land in the `10`/`01` cells (undirected ones in `11`) and
/// the `00` and `11` cells stay zero for directed dyads.
pub fn encode_graph(g: &GraphData, mode: Mode) -> Result<DyadTable> {
    let n = g.n();
    let shape = TableShape::Dyadic {
        n,
        directed: g.directed(),
    };
    let s = shape.states_per_dyad().unwrap();
    let mut cells = vec![0i64; shape.len()];
    for d in 0..dyad_count(n) {
        let (i, j) = dyad_nodes(n, d);
        let block = &mut cells[d * s..(d + 1) * s];
        if g.directed() {
            let fwd = g.multiplicity(i, j);
            let rev = g.multiplicity(j, i);
            match mode {
                Mode::Simple => {
                    if fwd > 1 || rev > 1 {
                        return Err(Error::InvalidGraph(format!(
                            "dyad ({:?}, {:?}) has parallel edges; not a simple graph",
                            g.labels()[i],
                            g.labels()[j]
                        )));
                    }
                    let state = match (fwd > 0, rev > 0) {
                        (false, false) => 0,
                        (true, false) => 1,
                        (false, true) => 2,
                        (true, true) => 3,
                    };
                    block[state] = 1;
                }
                Mode::Multigraph => {
                    block[1] = fwd;
                    block[2] = rev;
                }
            }
        } else {
            let m = g.multiplicity(i, j);
            match mode {
                Mode::Simple => {
                    if m > 1 {
                        return Err(Error::InvalidGraph(format!(
                            "dyad ({:?}, {:?}) has multiplicity {m}; not a simple graph",
                            g.labels()[i],
                            g.labels()[j]
                        )));
                    }
                    block[m as usize] = 1;
                }
                Mode::Multigraph => block[1] = m,
            }
        }
    }
    DyadTable::new(shape, mode, cells)
}

/// Converts a dyad table back to a graph. Inverse of [`encode_graph`] on its
/// range: multigraph tables must be in canonical form (directed dyads with
/// `00` and `11` cells zero; undirected with `00` zero).
pub fn decode_table(t: &DyadTable, labels: Option<Vec<String>>) -> Result<GraphData> {
    let TableShape::Dyadic { n, directed } = t.shape() else {
        return Err(Error::InvalidTable("cannot decode a flat table".into()));
    };
    let mut g = match labels {
        Some(l) => {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.len(),
                });
            }
            GraphData::with_labels(l, directed)?
        }
        None => GraphData::new(n, directed),
    };
    let s = t.shape().states_per_dyad().unwrap();
    for (d, block) in t.cells().chunks_exact(s).enumerate() {
        let (i, j) = dyad_nodes(n, d);
        match (t.mode(), directed) {
            (Mode::Simple, true) => {
                let state = block
                    .iter()
                    .position(|&c| c == 1)
                    .ok_or_else(|| Error::InvalidTable(format!("dyad {d} is not one-hot")))?;
                if state == 1 || state == 3 {
                    g.add_edge(i, j, 1)?;
                }
                if state == 2 || state == 3 {
                    g.add_edge(j, i, 1)?;
                }
            }
            (Mode::Simple, false) => {
                if block[1] == 1 {
                    g.add_edge(i, j, 1)?;
                }
            }
            (Mode::Multigraph, true) => {
                if block[0] != 0 || block[3] != 0 {
                    return Err(Error::InvalidTable(format!(
                        "dyad {d} is not in canonical multigraph form (00/11 cells must be zero)"
                    )));
                }
                g.add_edge(i, j, block[1])?;
                g.add_edge(j, i, block[2])?;
            }
            (Mode::Multigraph, false) => {
                if block[0] != 0 {
                    return Err(Error::InvalidTable(format!(
                        "dyad {d} is not in canonical multigraph form (00 cell must be zero)"
                    )));
                }
                g.add_edge(i, j, block[1])?;
            }
        }
    }
    Ok(g)
}

/// A named integer statistic vector, one entry per design-matrix row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatVector {
    pub labels: Vec<String>,
    pub values: Vec<i64>,
}

/// Applies the design matrix to the cell vector with checked arithmetic.
pub fn sufficient_statistics(a: &DesignMatrix, t: &DyadTable) -> Result<StatVector> {
    let values = a.mul_cells(t.cells())?;
    Ok(StatVector {
        labels: a.row_labels().to_vec(),
        values,
    })
}
