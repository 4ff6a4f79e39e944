//! Brute-force fiber enumeration for small instances.
//!
//! The fiber of a table `u` under a design matrix `A` is the set of
//! nonnegative integer tables `v` with `Av = Au` (and, in simple mode, valid
//! dyad blocks). For desk-sized problems it can be enumerated outright by a
//! depth-first search with margin pruning, giving an independent ground truth
//! for connectivity questions and exact p-values that the Monte Carlo
//! machinery is checked against.

use std::collections::HashMap;

use crate::design::DesignMatrix;
use crate::error::{Error, Result};
use crate::moves::Move;
use crate::sampler::Target;
use crate::table::DyadTable;

/// An enumerated fiber: members in lexicographic cell order.
#[derive(Debug, Clone)]
pub struct Fiber {
    pub members: Vec<Vec<i64>>,
    /// True when enumeration stopped at the cap; members are then a prefix.
    pub truncated: bool,
}

impl Fiber {
    /// Index of a member, if present.
    pub fn position(&self, cells: &[i64]) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.as_slice().cmp(cells))
            .ok()
    }
}

/// Enumerates the fiber of `t` under `a`, up to `cap` members.
///
/// Cells are assigned in order with two prunes: a cell never exceeds what the
/// remaining slack of its covering rows allows, and a row whose support is
/// exhausted must have zero slack. Members are produced in lexicographically
/// increasing order; if the cap is hit, `truncated` is set and downstream
/// exact computations refuse the result rather than silently using a prefix.
pub fn enumerate_fiber(a: &DesignMatrix, t: &DyadTable, cap: usize) -> Result<Fiber> {
    if cap == 0 {
        return Err(Error::InvalidModel("fiber cap must be positive".into()));
    }
    if t.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: t.len(),
        });
    }
    let targets = a.mul_cells(t.cells())?;
    let cols = a.cols();
    let rows = a.rows();

    // Rows listed per cell, and the last cell supporting each row.
    let mut support: Vec<Vec<usize>> = vec![Vec::new(); cols];
    let mut last_cell = vec![0usize; rows];
    for r in 0..rows {
        for c in 0..cols {
            if a.get(r, c) != 0 {
                support[c].push(r);
                last_cell[r] = c;
            }
        }
    }
    let mut rows_ending_at: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for r in 0..rows {
        rows_ending_at[last_cell[r]].push(r);
    }

    struct Search<'a> {
        a: &'a DesignMatrix,
        t: &'a DyadTable,
        support: Vec<Vec<usize>>,
        rows_ending_at: Vec<Vec<usize>>,
        resid: Vec<i64>,
        current: Vec<i64>,
        members: Vec<Vec<i64>>,
        cap: usize,
        truncated: bool,
    }

    impl Search<'_> {
        fn dfs(&mut self, c: usize) {
            if self.truncated {
                return;
            }
            if c == self.current.len() {
                if self.resid.iter().all(|&x| x == 0) && self.t.cells_valid(&self.current) {
                    if self.members.len() == self.cap {
                        self.truncated = true;
                        return;
                    }
                    self.members.push(self.current.clone());
                }
                return;
            }
            let ub = self.support[c]
                .iter()
                .map(|&r| self.resid[r] / self.a.get(r, c))
                .min()
                .unwrap_or(0);
            for v in 0..=ub {
                self.current[c] = v;
                for &r in &self.support[c] {
                    self.resid[r] -= self.a.get(r, c) * v;
                }
                if self
                    .rows_ending_at[c]
                    .iter()
                    .all(|&r| self.resid[r] == 0)
                {
                    self.dfs(c + 1);
                }
                for &r in &self.support[c] {
                    self.resid[r] += self.a.get(r, c) * v;
                }
            }
            self.current[c] = 0;
        }
    }

    let mut search = Search {
        a,
        t,
        support,
        rows_ending_at,
        resid: targets,
        current: vec![0; cols],
        members: Vec::new(),
        cap,
        truncated: false,
    };
    search.dfs(0);
    Ok(Fiber {
        members: search.members,
        truncated: search.truncated,
    })
}

/// Connectivity of the fiber under a move set.
#[derive(Debug, Clone)]
pub struct ConnectivityReport {
    pub components: usize,
    /// Component id per fiber member, numbered by first appearance.
    pub component_of: Vec<usize>,
    /// Two members in different components, when disconnected.
    pub witness: Option<(usize, usize)>,
}

/// Partitions an enumerated fiber into components reachable by the moves
/// (applied in either direction). Errors on truncated fibers, where
/// connectivity over the prefix would be meaningless.
pub fn connectivity_check(fiber: &Fiber, moves: &[Move]) -> Result<ConnectivityReport> {
    if fiber.truncated {
        return Err(Error::TruncatedFiber {
            cap: fiber.members.len(),
        });
    }
    let index: HashMap<&[i64], usize> = fiber
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let n = fiber.members.len();
    let mut component_of = vec![usize::MAX; n];
    let mut components = 0;
    let mut queue = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        component_of[start] = components;
        queue.push(start);
        while let Some(i) = queue.pop() {
            for mv in moves {
                for direction in [mv.clone(), mv.negated()] {
                    let mut cells = fiber.members[i].clone();
                    let mut feasible = true;
                    for &(c, d) in direction.entries() {
                        cells[c] += d;
                        if cells[c] < 0 {
                            feasible = false;
                        }
                    }
                    if !feasible {
                        continue;
                    }
                    if let Some(&j) = index.get(cells.as_slice()) {
                        if component_of[j] == usize::MAX {
                            component_of[j] = components;
                            queue.push(j);
                        }
                    }
                }
            }
        }
        components += 1;
    }
    let witness = if components > 1 {
        let other = component_of.iter().position(|&c| c != component_of[0]);
        other.map(|j| (0, j))
    } else {
        None
    };
    Ok(ConnectivityReport {
        components,
        component_of,
        witness,
    })
}

/// Exact conditional p-value by summing the target law over an enumerated
/// fiber: the probability mass of members whose statistic is at least the
/// observed value.
pub fn exact_pvalue_small(
    fiber: &Fiber,
    stat: impl Fn(&[i64]) -> f64,
    observed: f64,
    target: Target,
) -> Result<f64> {
    if fiber.truncated {
        return Err(Error::TruncatedFiber {
            cap: fiber.members.len(),
        });
    }
    if fiber.members.is_empty() {
        return Err(Error::InvalidTable("empty fiber".into()));
    }
    // Work with log weights and a max shift for numerical safety.
    let log_weights: Vec<f64> = fiber
        .members
        .iter()
        .map(|m| match target {
            Target::Uniform => 0.0,
            Target::Hypergeometric => -m.iter().map(|&v| ln_factorial(v)).sum::<f64>(),
        })
        .collect();
    let max_lw = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (m, &lw) in fiber.members.iter().zip(&log_weights) {
        let w = (lw - max_lw).exp();
        total += w;
        if stat(m) >= observed {
            tail += w;
        }
    }
    Ok(tail / total)
}

/// Natural log of `v!` for nonnegative counts.
pub(crate) fn ln_factorial(v: i64) -> f64 {
    (2..=v).map(|t| (t as f64).ln()).sum()
}
