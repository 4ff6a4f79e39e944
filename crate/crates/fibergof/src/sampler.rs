//! Metropolis–Hastings sampling on model fibers.
//!
//! The chain walks the fiber of the observed table by proposing Markov moves
//! and accepting them against the conditional null law: uniform for simple
//! graph data (every graph with the observed sufficient statistics is equally
//! likely) or generalized hypergeometric `pi(v) ~ 1 / prod v_c!` for count
//! data. Proposals mix two arms:
//!
//! * a *curated* arm (probability `proposal_mix`): cheap swap moves — either
//!   a fixed list, or dynamic edge-pair rewires read off the current graph —
//!   that do most of the mixing;
//! * a *basis* arm: a random integer combination of lattice kernel basis
//!   vectors with sign-symmetric geometric coefficients. Every nonzero
//!   coefficient vector has positive probability, so any two fiber members
//!   are one proposal apart and the chain is irreducible even where the
//!   curated moves alone disconnect the fiber.
//!
//! Both arms are symmetric, and proposals that would leave the fiber or the
//! valid table region are rejected (or resolved to the zero move), so the
//! stationary law on the fiber is exactly the requested target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::design::{DesignMatrix, ModelSpec};
use crate::error::{Error, Result};
use crate::moves::{
    applicable, apply_unchecked, curated_moves, edge_delta, independence_basic_moves,
    integer_kernel, LatticeBasis, Move,
};
use crate::table::{dyad_index, dyad_nodes, DyadTable, Mode, TableShape};

/// Stationary law on the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    /// Uniform over the fiber (conditional law of a simple dyadic model).
    Uniform,
    /// `pi(v)` proportional to `1 / prod_c v_c!` (count data).
    Hypergeometric,
}

/// Chain length, thinning, seeding, and proposal mixture parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainConfig {
    /// Total Metropolis steps per chain, including burn-in.
    pub steps: u64,
    /// Steps discarded before recording begins.
    pub burn_in: u64,
    /// Record every `thin`-th post-burn-in state.
    pub thin: u64,
    /// Base RNG seed; each chain derives an independent stream from it.
    pub seed: u64,
    /// Number of independent chains, pooled in the result.
    pub chains: u32,
    /// Probability of drawing from the curated arm instead of the basis arm.
    pub proposal_mix: f64,
    /// Success probability of the geometric coefficient law in the basis arm.
    pub geometric_p: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            steps: 100_000,
            burn_in: 10_000,
            thin: 10,
            seed: 0,
            chains: 1,
            proposal_mix: 0.8,
            geometric_p: 0.5,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig("need at least one chain".into()));
        }
        if !(0.0..=1.0).contains(&self.proposal_mix) {
            return Err(Error::InvalidConfig(format!(
                "proposal_mix must lie in [0, 1], got {}",
                self.proposal_mix
            )));
        }
        if !(self.geometric_p > 0.0 && self.geometric_p < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "geometric_p must lie in (0, 1), got {}",
                self.geometric_p
            )));
        }
        if self.burn_in >= self.steps {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} leaves no recording steps out of {}",
                self.burn_in, self.steps
            )));
        }
        Ok(())
    }
}

/// Curated proposal arm.
#[derive(Debug, Clone)]
pub enum CuratedProposals {
    /// Uniform draw from a fixed move list, with a random sign.
    FixedList(Vec<Move>),
    /// Rewire a random pair of directed edges read off the current graph.
    DirectedRewire,
    /// Swap a random pair of disjoint undirected edges.
    UndirectedRewire,
}

/// The proposal distribution of a chain: curated arm, kernel lattice basis,
/// and the design matrix used to vet dynamically built moves.
#[derive(Debug, Clone)]
pub struct ProposalSet {
    curated: CuratedProposals,
    basis: LatticeBasis,
    design: DesignMatrix,
}

impl ProposalSet {
    /// Builds a proposal set, computing the kernel basis of `a`.
    pub fn new(a: &DesignMatrix, curated: CuratedProposals) -> Result<Self> {
        Ok(ProposalSet {
            curated,
            basis: integer_kernel(a)?,
            design: a.clone(),
        })
    }

    /// The standard proposal set for a model family: dynamic rewires for
    /// simple dyadic data, fixed swap lists otherwise.
    pub fn for_model(spec: &ModelSpec, a: &DesignMatrix, mode: Mode) -> Result<Self> {
        let curated = match (spec, mode) {
            (ModelSpec::Independence { d1, d2 }, _) => {
                if *d1 >= 2 && *d2 >= 2 {
                    CuratedProposals::FixedList(independence_basic_moves(*d1, *d2)?)
                } else {
                    CuratedProposals::FixedList(Vec::new())
                }
            }
            (ModelSpec::Beta { .. }, Mode::Simple) => CuratedProposals::UndirectedRewire,
            (ModelSpec::P1 { .. } | ModelSpec::Sbm { .. }, Mode::Simple) => {
                CuratedProposals::DirectedRewire
            }
            (_, Mode::Multigraph) => CuratedProposals::FixedList(curated_moves(spec)?),
        };
        Self::new(a, curated)
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn curated(&self) -> &CuratedProposals {
        &self.curated
    }
}

/// Pooled outcome of one or more chains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainResult {
    /// Statistic value at the starting table.
    pub observed: f64,
    /// Add-one tail estimate `(1 + #{kept >= observed}) / (1 + kept)`.
    pub p_value: f64,
    /// Batch-means standard error of the tail frequency.
    pub p_se: f64,
    /// Thinned post-burn-in statistic stream, chains concatenated.
    pub kept: Vec<f64>,
    /// Fraction of steps that changed the state.
    pub acceptance_rate: f64,
    /// Accepted (state-changing) steps across all chains.
    pub accepted: u64,
    /// Total steps across all chains.
    pub total_steps: u64,
    /// Final table of each chain.
    pub final_states: Vec<DyadTable>,
}

fn chain_rng(seed: u64, chain: u32) -> ChaCha12Rng {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..12].copy_from_slice(&chain.to_le_bytes());
    s[16..32].copy_from_slice(b"fibergof-chain01");
    ChaCha12Rng::from_seed(s)
}

/// Geometric draw on `{0, 1, 2, ...}` with success probability `p`.
fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    let mut k = 0;
    while rng.random::<f64>() >= p {
        k += 1;
    }
    k
}

/// Natural log of `v!`.
pub(crate) fn ln_factorial(v: i64) -> f64 {
    (2..=v).map(|t| (t as f64).ln()).sum()
}

fn zero_move() -> Move {
    Move::from_entries_unchecked(Vec::new())
}

fn has_directed_edge(t: &DyadTable, n: usize, u: usize, v: usize) -> bool {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let block = &t.cells()[dyad_index(n, a, b) * 4..][..4];
    if u < v {
        block[1] + block[3] > 0
    } else {
        block[2] + block[3] > 0
    }
}

/// Present directed edges of a simple dyadic table.
fn collect_directed_edges(t: &DyadTable) -> Vec<(usize, usize)> {
    let TableShape::Dyadic { n, directed: true } = t.shape() else {
        return Vec::new();
    };
    let mut edges = Vec::new();
    for (d, block) in t.cells().chunks_exact(4).enumerate() {
        let (i, j) = dyad_nodes(n, d);
        if block[1] + block[3] > 0 {
            edges.push((i, j));
        }
        if block[2] + block[3] > 0 {
            edges.push((j, i));
        }
    }
    edges
}

/// Draws two distinct indices in `0..len` uniformly (ordered).
fn two_distinct<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..len);
    let mut j = rng.random_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Rewires a random ordered pair of directed edges `a->b`, `c->d` (four
/// distinct nodes) to `a->d`, `c->b`, resolved against the current dyad
/// states. The pattern count is state-independent (edge totals are fiber
/// invariants) and the reverse rewire has the same proposal probability, so
/// the proposal is symmetric. Resolutions falling outside the model kernel
/// become the zero move.
fn propose_directed_rewire<R: Rng + ?Sized>(
    state: &DyadTable,
    ps: &ProposalSet,
    rng: &mut R,
) -> Move {
    let TableShape::Dyadic { n, directed: true } = state.shape() else {
        return zero_move();
    };
    let edges = collect_directed_edges(state);
    if edges.len() < 2 {
        return zero_move();
    }
    let (x, y) = two_distinct(edges.len(), rng);
    let (a, b) = edges[x];
    let (c, d) = edges[y];
    if a == c || a == d || b == c || b == d {
        return zero_move();
    }
    let entries: Vec<(usize, i64)> = edge_delta(n, a, b, has_directed_edge(state, n, b, a), false)
        .into_iter()
        .chain(edge_delta(n, c, d, has_directed_edge(state, n, d, c), false))
        .chain(edge_delta(n, a, d, has_directed_edge(state, n, d, a), true))
        .chain(edge_delta(n, c, b, has_directed_edge(state, n, b, c), true))
        .collect();
    let mv = Move::from_entries_unchecked(entries);
    match ps.design.mul_sparse(mv.entries()) {
        Ok(v) if v.iter().all(|&x| x == 0) => mv,
        _ => zero_move(),
    }
}

/// Present undirected edges of a simple dyadic table.
fn collect_undirected_edges(t: &DyadTable) -> Vec<(usize, usize)> {
    let TableShape::Dyadic {
        n,
        directed: false,
    } = t.shape()
    else {
        return Vec::new();
    };
    t.cells()
        .chunks_exact(2)
        .enumerate()
        .filter(|(_, block)| block[1] > 0)
        .map(|(d, _)| dyad_nodes(n, d))
        .collect()
}

/// Swaps a random pair of node-disjoint undirected edges to one of the two
/// alternative matchings on the same four nodes, chosen uniformly. Symmetric
/// for the same reason as the directed rewire.
fn propose_undirected_rewire<R: Rng + ?Sized>(
    state: &DyadTable,
    ps: &ProposalSet,
    rng: &mut R,
) -> Move {
    let TableShape::Dyadic {
        n,
        directed: false,
    } = state.shape()
    else {
        return zero_move();
    };
    let edges = collect_undirected_edges(state);
    if edges.len() < 2 {
        return zero_move();
    }
    let (x, y) = two_distinct(edges.len(), rng);
    let (a, b) = edges[x];
    let (c, d) = edges[y];
    if a == c || a == d || b == c || b == d {
        return zero_move();
    }
    let ((p1, q1), (p2, q2)) = if rng.random::<bool>() {
        ((a, c), (b, d))
    } else {
        ((a, d), (b, c))
    };
    let cell = |i: usize, j: usize, present: bool| {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        dyad_index(n, i, j) * 2 + usize::from(present)
    };
    let pair = |i: usize, j: usize, add: bool| {
        [(cell(i, j, !add), -1i64), (cell(i, j, add), 1i64)]
    };
    let entries: Vec<(usize, i64)> = pair(a, b, false)
        .into_iter()
        .chain(pair(c, d, false))
        .chain(pair(p1, q1, true))
        .chain(pair(p2, q2, true))
        .collect();
    let mv = Move::from_entries_unchecked(entries);
    match ps.design.mul_sparse(mv.entries()) {
        Ok(v) if v.iter().all(|&x| x == 0) => mv,
        _ => zero_move(),
    }
}

/// Random integer combination of kernel basis vectors with sign-symmetric
/// geometric coefficients, redrawn until some coefficient is nonzero.
fn propose_basis_combination<R: Rng + ?Sized>(
    ps: &ProposalSet,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Move {
    let basis = ps.basis.moves();
    if basis.is_empty() {
        return zero_move();
    }
    for _ in 0..64 {
        let mut dense = vec![0i64; ps.design.cols()];
        let mut any = false;
        for b in basis {
            let mag = sample_geometric(cfg.geometric_p, rng);
            if mag == 0 {
                continue;
            }
            any = true;
            let coef = if rng.random::<bool>() {
                mag as i64
            } else {
                -(mag as i64)
            };
            for &(c, d) in b.entries() {
                dense[c] += coef * d;
            }
        }
        if any {
            let entries = dense
                .into_iter()
                .enumerate()
                .filter(|&(_, d)| d != 0)
                .collect();
            return Move::from_entries_unchecked(entries);
        }
    }
    zero_move()
}

/// Draws one proposal move at `state`. The zero move (hold) is returned when
/// a dynamic rewire cannot be formed or resolves outside the kernel.
pub fn propose<R: Rng + ?Sized>(
    state: &DyadTable,
    proposals: &ProposalSet,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Move {
    if rng.random::<f64>() < cfg.proposal_mix {
        match &proposals.curated {
            CuratedProposals::FixedList(list) if !list.is_empty() => {
                let mv = &list[rng.random_range(0..list.len())];
                return if rng.random::<bool>() {
                    mv.clone()
                } else {
                    mv.negated()
                };
            }
            CuratedProposals::FixedList(_) => {} // fall through to the basis arm
            CuratedProposals::DirectedRewire => {
                return propose_directed_rewire(state, proposals, rng);
            }
            CuratedProposals::UndirectedRewire => {
                return propose_undirected_rewire(state, proposals, rng);
            }
        }
    }
    propose_basis_combination(proposals, cfg, rng)
}

pub(crate) fn mh_step_inplace<R: Rng + ?Sized>(
    state: &mut DyadTable,
    mv: &Move,
    target: Target,
    rng: &mut R,
) -> bool {
    if mv.is_zero() || !applicable(mv, state) {
        return false;
    }
    let accept = match target {
        Target::Uniform => true,
        Target::Hypergeometric => {
            // pi(v + d) / pi(v) = prod_c v_c! / (v_c + d_c)!
            let log_ratio: f64 = mv
                .entries()
                .iter()
                .map(|&(c, d)| {
                    let v = state.cells()[c];
                    ln_factorial(v) - ln_factorial(v + d)
                })
                .sum();
            log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp()
        }
    };
    if accept {
        apply_unchecked(mv, state);
    }
    accept
}

/// One Metropolis–Hastings step: returns the next state and whether the move
/// was accepted. Inapplicable moves and the zero move leave the state fixed.
pub fn mh_step<R: Rng + ?Sized>(
    state: &DyadTable,
    mv: &Move,
    target: Target,
    rng: &mut R,
) -> (DyadTable, bool) {
    let mut next = state.clone();
    let accepted = mh_step_inplace(&mut next, mv, target, rng);
    (next, accepted)
}

/// Runs `cfg.chains` independent chains from `t0` and pools the results.
///
/// Each chain gets a private RNG stream derived from `(cfg.seed, chain
/// index)`, so results are reproducible bit-for-bit regardless of thread
/// scheduling. The statistic is recorded every `cfg.thin` steps after
/// burn-in.
pub fn run_chain<F>(
    t0: &DyadTable,
    a: &DesignMatrix,
    proposals: &ProposalSet,
    target: Target,
    stat_fn: F,
    cfg: &ChainConfig,
) -> Result<ChainResult>
where
    F: Fn(&DyadTable) -> f64 + Sync,
{
    cfg.validate()?;
    if t0.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: t0.len(),
        });
    }
    t0.validate()?;
    let observed = stat_fn(t0);
    let reference = a.mul_cells(t0.cells())?;

    let run_one = |chain: u32| -> Result<(Vec<f64>, u64, DyadTable)> {
        let mut rng = chain_rng(cfg.seed, chain);
        let mut state = t0.clone();
        let mut kept =
            Vec::with_capacity(((cfg.steps - cfg.burn_in) / cfg.thin + 1) as usize);
        let mut accepted = 0u64;
        for step in 0..cfg.steps {
            let mv = propose(&state, proposals, cfg, &mut rng);
            if mh_step_inplace(&mut state, &mv, target, &mut rng) {
                accepted += 1;
            }
            if step >= cfg.burn_in && (step - cfg.burn_in + 1) % cfg.thin == 0 {
                kept.push(stat_fn(&state));
            }
        }
        if cfg!(debug_assertions) {
            assert_eq!(
                a.mul_cells(state.cells())?,
                reference,
                "chain left the fiber"
            );
        }
        Ok((kept, accepted, state))
    };

    let per_chain: Vec<(Vec<f64>, u64, DyadTable)> = if cfg.chains == 1 {
        vec![run_one(0)?]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.chains)
                .map(|chain| scope.spawn(move || run_one(chain)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("chain thread panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let mut kept = Vec::new();
    let mut accepted = 0;
    let mut final_states = Vec::with_capacity(per_chain.len());
    for (k, acc, fin) in per_chain {
        kept.extend(k);
        accepted += acc;
        final_states.push(fin);
    }
    let total_steps = cfg.steps * u64::from(cfg.chains);
    let (p_value, p_se) = estimate_pvalue(observed, &kept)?;
    Ok(ChainResult {
        observed,
        p_value,
        p_se,
        acceptance_rate: accepted as f64 / total_steps as f64,
        accepted,
        total_steps,
        kept,
        final_states,
    })
}

/// Add-one tail probability estimate with a batch-means standard error.
///
/// The point estimate is `(1 + #{s >= observed}) / (1 + n)`, never exactly
/// zero. The standard error splits the stream into up to 50 equal batches
/// and uses the spread of batch tail frequencies, which absorbs chain
/// autocorrelation; it is NaN when fewer than two batches can be formed.
pub fn estimate_pvalue(observed: f64, stream: &[f64]) -> Result<(f64, f64)> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    let n = stream.len();
    let hits = stream.iter().filter(|&&s| s >= observed).count();
    let p = (1 + hits) as f64 / (1 + n) as f64;

    let batches = n.min(50);
    if batches < 2 {
        return Ok((p, f64::NAN));
    }
    let len = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|k| {
            let chunk = &stream[k * len..(k + 1) * len];
            chunk.iter().filter(|&&s| s >= observed).count() as f64 / len as f64
        })
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>()
        / (batches as f64 - 1.0)
        / batches as f64;
    Ok((p, var.sqrt()))
}
