//! Log-linear model families and their integer design matrices.
//!
//! Each supported family is determined by a 0/1/2 integer matrix `A` whose
//! rows are the model's sufficient statistics: a table `v` lies in the same
//! fiber as the data `u` exactly when `Av = Au`. Columns are table cells. For
//! dyadic families the columns follow the layout of [`crate::table`]: dyads
//! in lexicographic order, states `(00, 10, 01, 11)` directed or `(00, 11)`
//! undirected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{dyad_count, dyad_nodes, Mode, TableShape};

/// An integer design matrix with named rows and columns.
///
/// Entries are small nonnegative integers stored row-major. Every column must
/// be covered by at least one row, otherwise the cell would be unconstrained
/// and the fiber unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        entries: Vec<i64>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if row_labels.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: row_labels.len(),
            });
        }
        if col_labels.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: col_labels.len(),
            });
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidModel("design matrix must be nonempty".into()));
        }
        if let Some(e) = entries.iter().find(|&&e| e < 0) {
            return Err(Error::InvalidModel(format!(
                "design matrix entries must be nonnegative, found {e}"
            )));
        }
        for c in 0..cols {
            if (0..rows).all(|r| entries[r * cols + c] == 0) {
                return Err(Error::InvalidModel(format!(
                    "column {:?} is not covered by any constraint row",
                    col_labels[c]
                )));
            }
        }
        Ok(DesignMatrix {
            rows,
            cols,
            entries,
            row_labels,
            col_labels,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Matrix-vector product `A v` with overflow checking.
    pub fn mul_cells(&self, cells: &[i64]) -> Result<Vec<i64>> {
        if cells.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: cells.len(),
            });
        }
        (0..self.rows)
            .map(|r| {
                let acc: i128 = self
                    .row(r)
                    .iter()
                    .zip(cells)
                    .map(|(&a, &v)| a as i128 * v as i128)
                    .sum();
                i64::try_from(acc).map_err(|_| Error::Overflow)
            })
            .collect()
    }

    /// Product `A d` for a sparse vector given as `(column, value)` pairs.
    pub fn mul_sparse(&self, entries: &[(usize, i64)]) -> Result<Vec<i64>> {
        let mut acc = vec![0i128; self.rows];
        for &(c, v) in entries {
            if c >= self.cols {
                return Err(Error::DimensionMismatch {
                    expected: self.cols,
                    got: c + 1,
                });
            }
            for (r, a) in acc.iter_mut().enumerate() {
                *a += self.get(r, c) as i128 * v as i128;
            }
        }
        acc.into_iter()
            .map(|a| i64::try_from(a).map_err(|_| Error::Overflow))
            .collect()
    }
}

fn dyad_label(n: usize, d: usize) -> (usize, usize) {
    let (i, j) = dyad_nodes(n, d);
    (i + 1, j + 1)
}

fn dyadic_col_labels(n: usize, directed: bool) -> Vec<String> {
    let states: &[&str] = if directed {
        &["00", "10", "01", "11"]
    } else {
        &["00", "11"]
    };
    let mut labels = Vec::with_capacity(dyad_count(n) * states.len());
    for d in 0..dyad_count(n) {
        let (i, j) = dyad_label(n, d);
        for s in states {
            labels.push(format!("({i},{j}):{s}"));
        }
    }
    labels
}

/// Independence model for a two-way `d1 x d2` table: row and column sums.
///
/// Columns enumerate cells row-major, so the first `d1` rows of the matrix
/// pick out table rows and the last `d2` rows pick out table columns.
pub fn independence_design(d1: usize, d2: usize) -> Result<DesignMatrix> {
    if d1 < 1 || d2 < 1 {
        return Err(Error::InvalidModel(format!(
            "independence model needs positive dimensions, got {d1} x {d2}"
        )));
    }
    let cols = d1 * d2;
    let rows = d1 + d2;
    let mut entries = vec![0i64; rows * cols];
    for r in 0..d1 {
        for c in 0..d2 {
            entries[r * cols + r * d2 + c] = 1;
        }
    }
    for c in 0..d2 {
        for r in 0..d1 {
            entries[(d1 + c) * cols + r * d2 + c] = 1;
        }
    }
    let mut row_labels: Vec<String> = (1..=d1).map(|i| format!("row_{i}")).collect();
    row_labels.extend((1..=d2).map(|j| format!("col_{j}")));
    let col_labels = (1..=d1)
        .flat_map(|i| (1..=d2).map(move |j| format!("({i},{j})")))
        .collect();
    DesignMatrix::new(rows, cols, entries, row_labels, col_labels)
}

/// Undirected degree model (beta model): dyad normalizers plus one degree
/// row per node, over 2-state dyad columns.
pub fn beta_design(n: usize) -> Result<DesignMatrix> {
    if n < 2 {
        return Err(Error::InvalidModel(format!(
            "degree model needs at least 2 nodes, got {n}"
        )));
    }
    let nd = dyad_count(n);
    let cols = nd * 2;
    let rows = nd + n;
    let mut entries = vec![0i64; rows * cols];
    let mut row_labels = Vec::with_capacity(rows);
    for d in 0..nd {
        entries[d * cols + d * 2] = 1;
        entries[d * cols + d * 2 + 1] = 1;
        let (i, j) = dyad_label(n, d);
        row_labels.push(format!("dyad({i},{j})"));
    }
    for v in 0..n {
        let r = nd + v;
        for d in 0..nd {
            let (i, j) = dyad_nodes(n, d);
            if i == v || j == v {
                entries[r * cols + d * 2 + 1] = 1;
            }
        }
        row_labels.push(format!("deg_{}", v + 1));
    }
    DesignMatrix::new(rows, cols, entries, row_labels, dyadic_col_labels(n, false))
}

/// Reciprocity structure of the directed dyadic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reciprocity {
    /// No reciprocation effect.
    Zero,
    /// One shared reciprocation parameter: total count of mutual dyads.
    Constant,
    /// One reciprocation parameter per dyad.
    Differential,
}

/// Directed dyadic model (p1): dyad normalizers, total edge count, in- and
/// out-degree rows, and the chosen reciprocity rows.
///
/// The edge row has entry 2 on mutual (`11`) cells since both edges of the
/// dyad are present there; in- and out-degree rows likewise count each
/// direction of a mutual dyad.
pub fn p1_design(n: usize, recip: Reciprocity) -> Result<DesignMatrix> {
    if n < 2 {
        return Err(Error::InvalidModel(format!(
            "directed dyadic model needs at least 2 nodes, got {n}"
        )));
    }
    let nd = dyad_count(n);
    let cols = nd * 4;
    let recip_rows = match recip {
        Reciprocity::Zero => 0,
        Reciprocity::Constant => 1,
        Reciprocity::Differential => nd,
    };
    let rows = nd + 1 + 2 * n + recip_rows;
    let mut entries = vec![0i64; rows * cols];
    let mut row_labels = Vec::with_capacity(rows);

    for d in 0..nd {
        for s in 0..4 {
            entries[d * cols + d * 4 + s] = 1;
        }
        let (i, j) = dyad_label(n, d);
        row_labels.push(format!("dyad({i},{j})"));
    }

    let edge_row = nd;
    for d in 0..nd {
        entries[edge_row * cols + d * 4 + 1] = 1;
        entries[edge_row * cols + d * 4 + 2] = 1;
        entries[edge_row * cols + d * 4 + 3] = 2;
    }
    row_labels.push("edges".into());

    for v in 0..n {
        let r = nd + 1 + v;
        for d in 0..nd {
            let (i, j) = dyad_nodes(n, d);
            // State 10 is the edge i->j (received by j), state 01 is j->i.
            if v == j {
                entries[r * cols + d * 4 + 1] = 1;
            }
            if v == i {
                entries[r * cols + d * 4 + 2] = 1;
            }
            if v == i || v == j {
                entries[r * cols + d * 4 + 3] = 1;
            }
        }
        row_labels.push(format!("in_{}", v + 1));
    }

    for v in 0..n {
        let r = nd + 1 + n + v;
        for d in 0..nd {
            let (i, j) = dyad_nodes(n, d);
            if v == i {
                entries[r * cols + d * 4 + 1] = 1;
            }
            if v == j {
                entries[r * cols + d * 4 + 2] = 1;
            }
            if v == i || v == j {
                entries[r * cols + d * 4 + 3] = 1;
            }
        }
        row_labels.push(format!("out_{}", v + 1));
    }

    match recip {
        Reciprocity::Zero => {}
        Reciprocity::Constant => {
            let r = nd + 1 + 2 * n;
            for d in 0..nd {
                entries[r * cols + d * 4 + 3] = 1;
            }
            row_labels.push("recip".into());
        }
        Reciprocity::Differential => {
            for d in 0..nd {
                let r = nd + 1 + 2 * n + d;
                entries[r * cols + d * 4 + 3] = 1;
                let (i, j) = dyad_label(n, d);
                row_labels.push(format!("recip({i},{j})"));
            }
        }
    }

    DesignMatrix::new(rows, cols, entries, row_labels, dyadic_col_labels(n, true))
}

/// Assignment of nodes to blocks. Block names are sorted (numerically when
/// all names parse as integers) so the induced design matrix does not depend
/// on input order; every block must be nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    assignment: Vec<usize>,
    names: Vec<String>,
}

impl BlockPartition {
    /// Builds a partition from one block name per node.
    pub fn from_names(per_node: &[String]) -> Result<Self> {
        if per_node.len() < 2 {
            return Err(Error::InvalidPartition(
                "partition needs at least 2 nodes".into(),
            ));
        }
        let mut names: Vec<String> = per_node.to_vec();
        names.sort();
        names.dedup();
        if names.iter().all(|s| s.parse::<i64>().is_ok()) {
            names.sort_by_key(|s| s.parse::<i64>().unwrap());
        }
        let assignment = per_node
            .iter()
            .map(|b| names.iter().position(|x| x == b).unwrap())
            .collect();
        Ok(BlockPartition { assignment, names })
    }

    /// Builds a partition from zero-based block indices covering `0..k`.
    pub fn new(assignment: Vec<usize>, k: usize) -> Result<Self> {
        if assignment.len() < 2 {
            return Err(Error::InvalidPartition(
                "partition needs at least 2 nodes".into(),
            ));
        }
        if k == 0 {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        for r in 0..k {
            if !assignment.contains(&r) {
                return Err(Error::InvalidPartition(format!("block {} is empty", r + 1)));
            }
        }
        if let Some(&b) = assignment.iter().find(|&&b| b >= k) {
            return Err(Error::InvalidPartition(format!(
                "block index {b} out of range for {k} blocks"
            )));
        }
        let names = (1..=k).map(|r| r.to_string()).collect();
        Ok(BlockPartition { assignment, names })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn block_name(&self, r: usize) -> &str {
        &self.names[r]
    }
}

/// Variant of the stochastic blockmodel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SbmVariant {
    /// Block-level edge and reciprocation counts per block pair.
    Full,
    /// Total edges, block-level in/out-degree sums, total reciprocation.
    Restricted,
}

/// Directed stochastic blockmodel over a fixed node partition.
///
/// The restricted variant constrains, besides the dyad normalizers, the total
/// edge count, the number of edges sent by each block, the number received by
/// each block, and the total count of mutual dyads. The full variant
/// constrains the edge count for every ordered block pair and the mutual-dyad
/// count for every unordered block pair.
pub fn sbm_design(partition: &BlockPartition, variant: SbmVariant) -> Result<DesignMatrix> {
    let n = partition.n();
    let k = partition.k();
    let nd = dyad_count(n);
    let cols = nd * 4;
    let mut rows_data: Vec<(String, Vec<i64>)> = Vec::new();

    for d in 0..nd {
        let mut row = vec![0i64; cols];
        for s in 0..4 {
            row[d * 4 + s] = 1;
        }
        let (i, j) = dyad_label(n, d);
        rows_data.push((format!("dyad({i},{j})"), row));
    }

    match variant {
        SbmVariant::Restricted => {
            let mut edges = vec![0i64; cols];
            for d in 0..nd {
                edges[d * 4 + 1] = 1;
                edges[d * 4 + 2] = 1;
                edges[d * 4 + 3] = 2;
            }
            rows_data.push(("edges".into(), edges));

            for r in 0..k {
                let mut row = vec![0i64; cols];
                for d in 0..nd {
                    let (i, j) = dyad_nodes(n, d);
                    if partition.block_of(i) == r {
                        row[d * 4 + 1] += 1;
                        row[d * 4 + 3] += 1;
                    }
                    if partition.block_of(j) == r {
                        row[d * 4 + 2] += 1;
                        row[d * 4 + 3] += 1;
                    }
                }
                rows_data.push((format!("blockout_{}", partition.block_name(r)), row));
            }
            for r in 0..k {
                let mut row = vec![0i64; cols];
                for d in 0..nd {
                    let (i, j) = dyad_nodes(n, d);
                    if partition.block_of(j) == r {
                        row[d * 4 + 1] += 1;
                        row[d * 4 + 3] += 1;
                    }
                    if partition.block_of(i) == r {
                        row[d * 4 + 2] += 1;
                        row[d * 4 + 3] += 1;
                    }
                }
                rows_data.push((format!("blockin_{}", partition.block_name(r)), row));
            }

            let mut recip = vec![0i64; cols];
            for d in 0..nd {
                recip[d * 4 + 3] = 1;
            }
            rows_data.push(("recip".into(), recip));
        }
        SbmVariant::Full => {
            for r in 0..k {
                for s in 0..k {
                    let mut row = vec![0i64; cols];
                    for d in 0..nd {
                        let (i, j) = dyad_nodes(n, d);
                        let (bi, bj) = (partition.block_of(i), partition.block_of(j));
                        if (bi, bj) == (r, s) {
                            row[d * 4 + 1] += 1;
                            row[d * 4 + 3] += 1;
                        }
                        if (bj, bi) == (r, s) {
                            row[d * 4 + 2] += 1;
                            row[d * 4 + 3] += 1;
                        }
                    }
                    if row.iter().any(|&e| e != 0) {
                        rows_data.push((
                            format!(
                                "edges_{}_{}",
                                partition.block_name(r),
                                partition.block_name(s)
                            ),
                            row,
                        ));
                    }
                }
            }
            for r in 0..k {
                for s in r..k {
                    let mut row = vec![0i64; cols];
                    for d in 0..nd {
                        let (i, j) = dyad_nodes(n, d);
                        let mut blocks = [partition.block_of(i), partition.block_of(j)];
                        blocks.sort_unstable();
                        if blocks == [r, s] {
                            row[d * 4 + 3] = 1;
                        }
                    }
                    if row.iter().any(|&e| e != 0) {
                        rows_data.push((
                            format!(
                                "recip_{}_{}",
                                partition.block_name(r),
                                partition.block_name(s)
                            ),
                            row,
                        ));
                    }
                }
            }
        }
    }

    let rows = rows_data.len();
    let mut entries = Vec::with_capacity(rows * cols);
    let mut row_labels = Vec::with_capacity(rows);
    for (label, row) in rows_data {
        row_labels.push(label);
        entries.extend(row);
    }
    DesignMatrix::new(rows, cols, entries, row_labels, dyadic_col_labels(n, true))
}

/// A model family instance: everything needed to build the design matrix and
/// to interpret a table of the matching shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelSpec {
    Independence { d1: usize, d2: usize },
    Beta { n: usize },
    P1 { n: usize, recip: Reciprocity },
    Sbm { partition: BlockPartition, variant: SbmVariant },
}

impl ModelSpec {
    pub fn design(&self) -> Result<DesignMatrix> {
        match self {
            ModelSpec::Independence { d1, d2 } => independence_design(*d1, *d2),
            ModelSpec::Beta { n } => beta_design(*n),
            ModelSpec::P1 { n, recip } => p1_design(*n, *recip),
            ModelSpec::Sbm { partition, variant } => sbm_design(partition, *variant),
        }
    }

    /// Shape of tables this model acts on.
    pub fn table_shape(&self) -> TableShape {
        match self {
            ModelSpec::Independence { d1, d2 } => TableShape::Flat { len: d1 * d2 },
            ModelSpec::Beta { n } => TableShape::Dyadic {
                n: *n,
                directed: false,
            },
            ModelSpec::P1 { n, .. } => TableShape::Dyadic {
                n: *n,
                directed: true,
            },
            ModelSpec::Sbm { partition, .. } => TableShape::Dyadic {
                n: partition.n(),
                directed: true,
            },
        }
    }

    /// Edge direction of the underlying graph; `None` for plain tables.
    pub fn directed(&self) -> Option<bool> {
        match self.table_shape() {
            TableShape::Dyadic { directed, .. } => Some(directed),
            TableShape::Flat { .. } => None,
        }
    }

    /// Node count for graph families; `None` for plain tables.
    pub fn n(&self) -> Option<usize> {
        match self.table_shape() {
            TableShape::Dyadic { n, .. } => Some(n),
            TableShape::Flat { .. } => None,
        }
    }

    /// Chain target consistent with the family and observation mode: simple
    /// dyadic data has uniform conditional law on the fiber, count data the
    /// generalized hypergeometric one.
    pub fn target(&self, mode: Mode) -> crate::sampler::Target {
        match self {
            ModelSpec::Independence { .. } => crate::sampler::Target::Hypergeometric,
            _ => match mode {
                Mode::Simple => crate::sampler::Target::Uniform,
                Mode::Multigraph => crate::sampler::Target::Hypergeometric,
            },
        }
    }
}
