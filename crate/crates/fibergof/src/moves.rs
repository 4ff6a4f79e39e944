//! Markov moves: integer kernel vectors of a design matrix.
//!
//! A move is a sparse integer vector `d` with `Ad = 0`; adding it to a table
//! preserves the sufficient statistics, so moves walk within a fiber. The
//! module provides an exact integer kernel basis (spanning all moves), plus
//! hand-rolled families of small swap moves that are cheap to apply and, for
//! the two-way independence model, known to connect every fiber.

use serde::{Deserialize, Serialize};

use crate::design::{independence_design, DesignMatrix, ModelSpec};
use crate::error::{Error, Result};
use crate::table::{dyad_index, DyadTable, Mode};

/// A sparse integer vector in the kernel of a design matrix.
///
/// Entries are `(cell, delta)` pairs sorted by cell with nonzero deltas.
/// Construction through [`Move::new`] or [`Move::from_sparse`] verifies the
/// kernel condition against the intended design matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    entries: Vec<(usize, i64)>,
}

/// Deserialization routes through the normalizing constructor so that moves
/// loaded from files keep the sorted, merged, zero-free entry invariant the
/// rest of the crate relies on.
impl<'de> Deserialize<'de> for Move {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            entries: Vec<(usize, i64)>,
        }
        Ok(Move::from_entries_unchecked(Raw::deserialize(deserializer)?.entries))
    }
}

impl Move {
    /// Builds a move from a dense delta vector, verifying `A d = 0`.
    pub fn new(a: &DesignMatrix, delta: &[i64]) -> Result<Self> {
        if delta.len() != a.cols() {
            return Err(Error::DimensionMismatch {
                expected: a.cols(),
                got: delta.len(),
            });
        }
        let entries = delta
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d != 0)
            .map(|(c, &d)| (c, d))
            .collect();
        Self::from_sparse(a, entries)
    }

    /// Builds a move from `(cell, delta)` pairs, verifying `A d = 0`.
    pub fn from_sparse(a: &DesignMatrix, entries: Vec<(usize, i64)>) -> Result<Self> {
        let mv = Self::from_entries_unchecked(entries);
        for &(c, _) in &mv.entries {
            if c >= a.cols() {
                return Err(Error::DimensionMismatch {
                    expected: a.cols(),
                    got: c + 1,
                });
            }
        }
        if a.mul_sparse(&mv.entries)?.iter().any(|&x| x != 0) {
            return Err(Error::NotAMove);
        }
        Ok(mv)
    }

    /// Normalizes entries (sort, merge duplicates, drop zeros) without the
    /// kernel check; for internal use where membership is guaranteed.
    pub(crate) fn from_entries_unchecked(mut entries: Vec<(usize, i64)>) -> Self {
        entries.sort_unstable_by_key(|&(c, _)| c);
        let mut merged: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
        for (c, d) in entries {
            match merged.last_mut() {
                Some((lc, ld)) if *lc == c => *ld += d,
                _ => merged.push((c, d)),
            }
        }
        merged.retain(|&(_, d)| d != 0);
        Move { entries: merged }
    }

    pub fn entries(&self) -> &[(usize, i64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The move with all deltas negated.
    pub fn negated(&self) -> Self {
        Move {
            entries: self.entries.iter().map(|&(c, d)| (c, -d)).collect(),
        }
    }

    /// Dense delta vector of the given length.
    pub fn to_dense(&self, len: usize) -> Vec<i64> {
        let mut v = vec![0; len];
        for &(c, d) in &self.entries {
            v[c] = d;
        }
        v
    }

    /// Applies the move to a table, checking applicability first.
    pub fn apply(&self, t: &DyadTable) -> Result<DyadTable> {
        if !applicable(self, t) {
            return Err(Error::InvalidTable(
                "move is not applicable at this table".into(),
            ));
        }
        let mut out = t.clone();
        apply_unchecked(self, &mut out);
        Ok(out)
    }
}

/// Adds the move's deltas in place without validity checks.
pub(crate) fn apply_unchecked(mv: &Move, t: &mut DyadTable) {
    let cells = t.cells_mut();
    for &(c, d) in &mv.entries {
        cells[c] += d;
    }
}

/// Whether `delta` lies in the kernel of `a`.
pub fn is_move(a: &DesignMatrix, delta: &[i64]) -> Result<bool> {
    if delta.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: delta.len(),
        });
    }
    let entries: Vec<(usize, i64)> = delta
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d != 0)
        .map(|(c, &d)| (c, d))
        .collect();
    Ok(a.mul_sparse(&entries)?.iter().all(|&x| x == 0))
}

/// Whether applying `mv` at `t` keeps every touched cell nonnegative and, in
/// simple mode, every touched dyad block summing to one.
pub fn applicable(mv: &Move, t: &DyadTable) -> bool {
    let cells = t.cells();
    for &(c, d) in mv.entries() {
        if c >= cells.len() || cells[c] + d < 0 {
            return false;
        }
    }
    if t.mode() == Mode::Simple {
        let s = t
            .shape()
            .states_per_dyad()
            .expect("simple tables are dyadic");
        // Dyad sums are preserved iff the deltas within each block cancel.
        let mut last_dyad = usize::MAX;
        let mut block_sum = 0i64;
        for &(c, d) in mv.entries() {
            let dyad = c / s;
            if dyad != last_dyad {
                if block_sum != 0 {
                    return false;
                }
                last_dyad = dyad;
                block_sum = 0;
            }
            block_sum += d;
        }
        if block_sum != 0 {
            return false;
        }
    }
    true
}

/// Retains the moves applicable at `t` in either direction.
pub fn prune(moves: &[Move], t: &DyadTable) -> Vec<Move> {
    moves
        .iter()
        .filter(|m| applicable(m, t) || applicable(&m.negated(), t))
        .cloned()
        .collect()
}

/// A lattice basis of the integer kernel of a design matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBasis {
    moves: Vec<Move>,
}

impl LatticeBasis {
    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn rank(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Computes a lattice basis of `{ d integer : A d = 0 }` by unimodular
/// column elimination.
///
/// The matrix is brought to column echelon form by integer column operations
/// (swap, negate, subtract an integer multiple), with the same operations
/// mirrored on an identity matrix `U`. Since the operations are invertible
/// over the integers, the columns of `U` below the pivot columns form a basis
/// of the full integer kernel — every move is an integer combination of the
/// returned vectors. Arithmetic is checked 128-bit; overflow is an error
/// rather than a wrong basis.
pub fn integer_kernel(a: &DesignMatrix) -> Result<LatticeBasis> {
    let m = a.rows();
    let l = a.cols();
    // Work on transposes so column operations touch contiguous memory.
    let mut mt: Vec<Vec<i128>> = (0..l)
        .map(|c| (0..m).map(|r| a.get(r, c) as i128).collect())
        .collect();
    let mut ut: Vec<Vec<i128>> = (0..l)
        .map(|c| {
            let mut e = vec![0i128; l];
            e[c] = 1;
            e
        })
        .collect();

    let col_axpy = |target: &mut [i128], source: &[i128], q: i128| -> Result<()> {
        for (t, &s) in target.iter_mut().zip(source) {
            *t = q
                .checked_mul(s)
                .and_then(|qs| t.checked_sub(qs))
                .ok_or(Error::Overflow)?;
        }
        Ok(())
    };

    let mut p = 0;
    for r in 0..m {
        if p == l {
            break;
        }
        loop {
            let Some(jmin) = (p..l)
                .filter(|&j| mt[j][r] != 0)
                .min_by_key(|&j| mt[j][r].unsigned_abs())
            else {
                break;
            };
            mt.swap(p, jmin);
            ut.swap(p, jmin);
            let mut cleared = true;
            for j in (p + 1)..l {
                if mt[j][r] != 0 {
                    let q = mt[j][r] / mt[p][r];
                    if q != 0 {
                        let (head, tail) = mt.split_at_mut(j);
                        col_axpy(&mut tail[0], &head[p], q)?;
                        let (head, tail) = ut.split_at_mut(j);
                        col_axpy(&mut tail[0], &head[p], q)?;
                    }
                    if mt[j][r] != 0 {
                        cleared = false;
                    }
                }
            }
            if cleared {
                p += 1;
                break;
            }
        }
    }

    let mut moves = Vec::with_capacity(l - p);
    for col in &ut[p..] {
        let mut entries = Vec::new();
        let mut first_sign = 0i128;
        for (c, &v) in col.iter().enumerate() {
            if v != 0 {
                if first_sign == 0 {
                    first_sign = v.signum();
                }
                let v = v * first_sign;
                entries.push((c, i64::try_from(v).map_err(|_| Error::Overflow)?));
            }
        }
        let mv = Move::from_entries_unchecked(entries);
        debug_assert!(
            a.mul_sparse(mv.entries())?.iter().all(|&x| x == 0),
            "kernel basis vector failed verification"
        );
        moves.push(mv);
    }
    Ok(LatticeBasis { moves })
}

/// The 2x2 swap moves of the `d1 x d2` independence model: `+1` on cells
/// `(i,j)` and `(i',j')`, `-1` on `(i,j')` and `(i',j)`. These generate the
/// full kernel lattice and connect every fiber of the model.
pub fn independence_basic_moves(d1: usize, d2: usize) -> Result<Vec<Move>> {
    if d1 < 2 || d2 < 2 {
        return Err(Error::InvalidModel(format!(
            "swap moves need at least a 2 x 2 table, got {d1} x {d2}"
        )));
    }
    let a = independence_design(d1, d2)?;
    let cell = |i: usize, j: usize| i * d2 + j;
    let mut moves = Vec::with_capacity(d1 * (d1 - 1) * d2 * (d2 - 1) / 4);
    for i in 0..d1 {
        for ii in (i + 1)..d1 {
            for j in 0..d2 {
                for jj in (j + 1)..d2 {
                    let entries = vec![
                        (cell(i, j), 1),
                        (cell(ii, jj), 1),
                        (cell(i, jj), -1),
                        (cell(ii, j), -1),
                    ];
                    moves.push(Move::from_sparse(&a, entries)?);
                }
            }
        }
    }
    Ok(moves)
}

/// Cell index of a directed dyad state; `fwd`/`rev` refer to the edge from
/// the smaller to the larger node and its reverse.
pub(crate) fn directed_cell(n: usize, i: usize, j: usize, fwd: bool, rev: bool) -> usize {
    let (a, b, fwd, rev) = if i < j { (i, j, fwd, rev) } else { (j, i, rev, fwd) };
    let state = match (fwd, rev) {
        (false, false) => 0,
        (true, false) => 1,
        (false, true) => 2,
        (true, true) => 3,
    };
    dyad_index(n, a, b) * 4 + state
}

/// The table delta that removes a directed edge `u -> v` from a dyad whose
/// other direction is `other`, plus the delta that adds it. Removal moves the
/// dyad from state `(present, other)` to `(absent, other)`.
pub(crate) fn edge_delta(n: usize, u: usize, v: usize, other: bool, add: bool) -> [(usize, i64); 2] {
    let from = directed_cell(n, u, v, !add, other);
    let to = directed_cell(n, u, v, add, other);
    [(from, -1), (to, 1)]
}

/// Directed edge-pair rewires, resolved over dyad states: remove edges
/// `a -> b` and `c -> d` (four distinct nodes), add `a -> d` and `c -> b`,
/// for every combination of reciprocation contexts. Only combinations in the
/// kernel of `a_mat` are kept, which filters the list down to the moves of
/// the specific model (degrees only, constant reciprocity, block structure).
pub fn directed_rewire_moves(a_mat: &DesignMatrix, n: usize) -> Result<Vec<Move>> {
    let mut moves = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if b == a {
                continue;
            }
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                for d in 0..n {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    // The pattern is symmetric under swapping (a,b) <-> (c,d).
                    if (a, b) > (c, d) {
                        continue;
                    }
                    for ctx in 0..16u32 {
                        let entries: Vec<(usize, i64)> = edge_delta(n, a, b, ctx & 1 != 0, false)
                            .into_iter()
                            .chain(edge_delta(n, c, d, ctx & 2 != 0, false))
                            .chain(edge_delta(n, a, d, ctx & 4 != 0, true))
                            .chain(edge_delta(n, c, b, ctx & 8 != 0, true))
                            .collect();
                        let mv = Move::from_entries_unchecked(entries);
                        if mv.is_zero() || !seen.insert(mv.entries().to_vec()) {
                            continue;
                        }
                        if a_mat.mul_sparse(mv.entries())?.iter().all(|&x| x == 0) {
                            moves.push(mv);
                        }
                    }
                }
            }
        }
    }
    Ok(moves)
}

/// Undirected two-edge swaps on four distinct nodes: for each pair of
/// disjoint perfect matchings of `{a, b, c, d}`, remove one and add the
/// other. Only swaps in the kernel of `a_mat` are kept.
pub fn undirected_swap_moves(a_mat: &DesignMatrix, n: usize) -> Result<Vec<Move>> {
    let cell = |i: usize, j: usize, present: bool| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        dyad_index(n, i, j) * 2 + usize::from(present)
    };
    let pair_delta = |i: usize, j: usize, add: bool| {
        [
            (cell(i, j, !add), -1i64),
            (cell(i, j, add), 1),
        ]
    };
    let mut moves = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    let matchings = [[(a, b), (c, d)], [(a, c), (b, d)], [(a, d), (b, c)]];
                    for x in 0..3 {
                        for y in (x + 1)..3 {
                            let entries: Vec<(usize, i64)> = matchings[x]
                                .iter()
                                .flat_map(|&(i, j)| pair_delta(i, j, false))
                                .chain(
                                    matchings[y]
                                        .iter()
                                        .flat_map(|&(i, j)| pair_delta(i, j, true)),
                                )
                                .collect();
                            let mv = Move::from_entries_unchecked(entries);
                            if a_mat.mul_sparse(mv.entries())?.iter().all(|&x| x == 0) {
                                moves.push(mv);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(moves)
}

/// The curated move family for a model: swap moves that stay inside the
/// family's kernel. These are fast to sample and connect fibers well in
/// practice, but completeness is only guaranteed for the independence model;
/// samplers must mix in kernel-basis combinations for irreducibility.
pub fn curated_moves(spec: &ModelSpec) -> Result<Vec<Move>> {
    match spec {
        ModelSpec::Independence { d1, d2 } => independence_basic_moves(*d1, *d2),
        ModelSpec::Beta { n } => undirected_swap_moves(&spec.design()?, *n),
        ModelSpec::P1 { n, .. } => directed_rewire_moves(&spec.design()?, *n),
        ModelSpec::Sbm { partition, .. } => {
            directed_rewire_moves(&spec.design()?, partition.n())
        }
    }
}

/// A serializable set of moves for a table with `cols` cells.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MovesFile {
    pub cols: usize,
    pub moves: Vec<Move>,
}

impl MovesFile {
    pub fn new(cols: usize, moves: Vec<Move>) -> Self {
        MovesFile { cols, moves }
    }

    /// Re-validates every move against a design matrix after deserialization.
    pub fn validate(&self, a: &DesignMatrix) -> Result<()> {
        if self.cols != a.cols() {
            return Err(Error::DimensionMismatch {
                expected: a.cols(),
                got: self.cols,
            });
        }
        for mv in &self.moves {
            if a.mul_sparse(mv.entries())?.iter().any(|&x| x != 0) {
                return Err(Error::NotAMove);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{beta_design, p1_design, sbm_design, BlockPartition, Reciprocity, SbmVariant};
    use crate::table::GraphData;

    /// Rank over the rationals by fraction-free (Bareiss) elimination;
    /// an independent check on the kernel dimension.
    fn rational_rank(rows: usize, cols: usize, get: impl Fn(usize, usize) -> i64) -> usize {
        let mut m: Vec<Vec<i128>> = (0..rows)
            .map(|r| (0..cols).map(|c| get(r, c) as i128).collect())
            .collect();
        let mut rank = 0;
        let mut prev = 1i128;
        for c in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, pr);
            for r in (rank + 1)..rows {
                for cc in (c + 1)..cols {
                    m[r][cc] = (m[rank][c] * m[r][cc] - m[r][c] * m[rank][cc]) / prev;
                }
                m[r][c] = 0;
            }
            prev = m[rank][c];
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    fn check_kernel_basis(a: &DesignMatrix) {
        let basis = integer_kernel(a).unwrap();
        let rank_a = rational_rank(a.rows(), a.cols(), |r, c| a.get(r, c));
        assert_eq!(basis.rank(), a.cols() - rank_a, "kernel dimension");
        for mv in basis.moves() {
            assert!(!mv.is_zero());
            assert!(a.mul_sparse(mv.entries()).unwrap().iter().all(|&x| x == 0));
        }
        // The basis vectors must be linearly independent.
        let dense: Vec<Vec<i64>> = basis
            .moves()
            .iter()
            .map(|m| m.to_dense(a.cols()))
            .collect();
        let rank_b = rational_rank(dense.len(), a.cols(), |r, c| dense[r][c]);
        assert_eq!(rank_b, basis.rank());
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let a = DesignMatrix::new(
            1,
            2,
            vec![1, 1],
            vec!["total".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let basis = integer_kernel(&a).unwrap();
        assert_eq!(basis.rank(), 1);
        assert_eq!(basis.moves()[0].to_dense(2), vec![1, -1]);
    }

    #[test]
    fn kernel_of_independence_2x2() {
        let a = independence_design(2, 2).unwrap();
        let basis = integer_kernel(&a).unwrap();
        assert_eq!(basis.rank(), 1);
        let d = basis.moves()[0].to_dense(4);
        assert!(d == vec![1, -1, -1, 1] || d == vec![-1, 1, 1, -1]);
    }

    #[test]
    fn kernel_dimensions_across_families() {
        check_kernel_basis(&independence_design(3, 3).unwrap());
        check_kernel_basis(&independence_design(2, 5).unwrap());
        check_kernel_basis(&beta_design(5).unwrap());
        check_kernel_basis(&p1_design(4, Reciprocity::Zero).unwrap());
        check_kernel_basis(&p1_design(4, Reciprocity::Constant).unwrap());
        check_kernel_basis(&p1_design(4, Reciprocity::Differential).unwrap());
        let p = BlockPartition::new(vec![0, 0, 1, 1, 0], 2).unwrap();
        check_kernel_basis(&sbm_design(&p, SbmVariant::Restricted).unwrap());
        check_kernel_basis(&sbm_design(&p, SbmVariant::Full).unwrap());
    }

    #[test]
    fn move_construction_rejects_non_kernel_vectors() {
        let a = independence_design(2, 2).unwrap();
        assert!(matches!(
            Move::new(&a, &[1, -1, 0, 0]),
            Err(Error::NotAMove)
        ));
        assert!(matches!(
            Move::new(&a, &[1, -1, -1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Move::new(&a, &[1, -1, -1, 1]).is_ok());
    }

    #[test]
    fn applicability_respects_bounds_and_dyad_sums() {
        let a = independence_design(2, 2).unwrap();
        let mv = Move::new(&a, &[1, -1, -1, 1]).unwrap();
        let t = DyadTable::plain(vec![0, 1, 1, 0]).unwrap();
        assert!(applicable(&mv, &t));
        let t2 = mv.apply(&t).unwrap();
        assert_eq!(t2.cells(), &[1, 0, 0, 1]);
        // Reapplying would drive two cells negative.
        assert!(!applicable(&mv, &t2));
        assert!(applicable(&mv.negated(), &t2));

        // Simple-mode dyad sums: a move shifting mass between dyads without
        // balancing inside a block must be inapplicable.
        let b = beta_design(4).unwrap();
        let mut g = GraphData::new(4, false);
        g.add_edge(0, 1, 1).unwrap();
        g.add_edge(2, 3, 1).unwrap();
        let t = crate::table::encode_graph(&g, Mode::Simple).unwrap();
        let swaps = undirected_swap_moves(&b, 4).unwrap();
        for mv in &swaps {
            if applicable(&mv, &t) {
                let t2 = mv.apply(&t).unwrap();
                t2.validate().unwrap();
            }
        }
    }

    #[test]
    fn prune_keeps_either_direction() {
        let a = independence_design(2, 2).unwrap();
        let mv = Move::new(&a, &[1, -1, -1, 1]).unwrap();
        let t = DyadTable::plain(vec![2, 0, 0, 2]).unwrap();
        // Only the negated direction applies, but prune keeps the move.
        assert!(!applicable(&mv, &t));
        assert_eq!(prune(&[mv], &t).len(), 1);
        let empty = DyadTable::plain(vec![0, 0, 0, 0]).unwrap();
        let mv2 = Move::new(&a, &[1, -1, -1, 1]).unwrap();
        assert!(prune(&[mv2], &empty).is_empty());
    }

    #[test]
    fn independence_basic_move_counts() {
        assert_eq!(independence_basic_moves(2, 2).unwrap().len(), 1);
        assert_eq!(independence_basic_moves(3, 3).unwrap().len(), 9);
        assert_eq!(independence_basic_moves(2, 4).unwrap().len(), 6);
        assert!(independence_basic_moves(1, 4).is_err());
    }

    #[test]
    fn beta_swaps_preserve_degrees() {
        let a = beta_design(5).unwrap();
        let moves = undirected_swap_moves(&a, 5).unwrap();
        assert_eq!(moves.len(), 3 * 5); // 3 matching pairs per 4-subset
        for mv in &moves {
            assert!(a.mul_sparse(mv.entries()).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rewire_moves_match_reciprocity_structure() {
        // With free per-dyad reciprocity every rewire that changes a mutual
        // count is excluded; with zero reciprocity everything passes.
        let zero = directed_rewire_moves(&p1_design(4, Reciprocity::Zero).unwrap(), 4).unwrap();
        let con =
            directed_rewire_moves(&p1_design(4, Reciprocity::Constant).unwrap(), 4).unwrap();
        let diff =
            directed_rewire_moves(&p1_design(4, Reciprocity::Differential).unwrap(), 4).unwrap();
        assert!(zero.len() > con.len());
        assert!(con.len() > diff.len());
        assert!(!diff.is_empty());
    }

    #[test]
    fn sbm_rewires_stay_in_kernel() {
        let p = BlockPartition::new(vec![0, 0, 1, 1], 2).unwrap();
        let a = sbm_design(&p, SbmVariant::Full).unwrap();
        let moves = directed_rewire_moves(&a, 4).unwrap();
        assert!(!moves.is_empty());
        for mv in &moves {
            assert!(a.mul_sparse(mv.entries()).unwrap().iter().all(|&x| x == 0));
        }
        // The full variant admits strictly fewer rewires than the restricted.
        let ar = sbm_design(&p, SbmVariant::Restricted).unwrap();
        let mr = directed_rewire_moves(&ar, 4).unwrap();
        assert!(moves.len() < mr.len());
    }

    #[test]
    fn moves_file_round_trip() {
        let a = independence_design(2, 3).unwrap();
        let moves = independence_basic_moves(2, 3).unwrap();
        let file = MovesFile::new(a.cols(), moves.clone());
        let json = serde_json::to_string(&file).unwrap();
        let back: MovesFile = serde_json::from_str(&json).unwrap();
        back.validate(&a).unwrap();
        assert_eq!(back.moves, moves);
    }
}
