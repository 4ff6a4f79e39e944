//! Goodness-of-fit statistics, the exact conditional test pipeline, and
//! parametric-bootstrap simulation.
//!
//! The exact test conditions on the sufficient statistics: fit the model
//! once at the observed table, freeze the fitted means (they depend on the
//! data only through the margins, hence are constant across the fiber), and
//! estimate the conditional tail probability of the chosen discrepancy
//! statistic by a Metropolis–Hastings walk over the fiber.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::design::ModelSpec;
use crate::error::{Error, Result};
use crate::ipf::{ipf_fit, mle_existence_heuristic, FitResult};
use crate::sampler::{run_chain, ChainConfig, ProposalSet};
use crate::table::{sufficient_statistics, DyadTable, Mode, TableShape};

/// Pearson chi-square discrepancy `sum (u - m)^2 / m` over cells with a
/// positive fitted mean. A positive count on a zero fitted mean makes the
/// statistic infinite.
pub fn chi_square(cells: &[i64], fitted: &[f64]) -> f64 {
    assert_eq!(cells.len(), fitted.len(), "cell/fitted length mismatch");
    let mut total = 0.0;
    for (&u, &m) in cells.iter().zip(fitted) {
        if m > 0.0 {
            let d = u as f64 - m;
            total += d * d / m;
        } else if u > 0 {
            return f64::INFINITY;
        }
    }
    total
}

/// Deviance `G^2 = 2 sum u ln(u / m)` over cells with a positive count.
pub fn deviance_g2(cells: &[i64], fitted: &[f64]) -> f64 {
    assert_eq!(cells.len(), fitted.len(), "cell/fitted length mismatch");
    let mut total = 0.0;
    for (&u, &m) in cells.iter().zip(fitted) {
        if u > 0 {
            if m <= 0.0 {
                return f64::INFINITY;
            }
            total += 2.0 * u as f64 * ((u as f64).ln() - m.ln());
        }
    }
    total
}

/// Discrepancy statistic for the exact test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatKind {
    Chi2,
    G2,
}

impl StatKind {
    pub fn value(self, cells: &[i64], fitted: &[f64]) -> f64 {
        match self {
            StatKind::Chi2 => chi_square(cells, fitted),
            StatKind::G2 => deviance_g2(cells, fitted),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StatKind::Chi2 => "chi2",
            StatKind::G2 => "g2",
        }
    }
}

/// Condensed fit diagnostics for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub converged: bool,
    pub iterations: u64,
    pub max_gap: f64,
}

/// Full record of one exact test run; serializes to the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofReport {
    pub model: String,
    pub mode: String,
    pub statistic: String,
    pub observed_stat: f64,
    /// True when the observed statistic is infinite (positive count on a
    /// zero fitted mean); the p-value is then the mass of infinite states.
    pub observed_infinite: bool,
    pub p_value: f64,
    pub p_se: f64,
    pub kept_samples: usize,
    pub acceptance_rate: f64,
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
    pub chains: u32,
    pub seed: u64,
    pub fit: FitSummary,
    /// Labelled sufficient statistics of the observed table.
    pub sufficient_stats: Vec<(String, i64)>,
    /// Node labels in internal order, for graph data.
    pub node_labels: Option<Vec<String>>,
    /// Reference quantiles (level, value) of the sampled null statistic.
    pub null_quantiles: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
    /// SHA-256 over the table shape, mode, and cells.
    pub data_fingerprint: String,
}

impl GofReport {
    /// Pretty JSON encoding; byte-identical across runs with equal inputs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Two-line CSV encoding (header and values) of the scalar fields.
    pub fn to_csv(&self) -> String {
        let header = "model,mode,statistic,observed_stat,p_value,p_se,kept_samples,\
                      acceptance_rate,steps,burn_in,thin,chains,seed,fit_converged,\
                      fit_iterations,fit_max_gap,data_fingerprint";
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.mode,
            self.statistic,
            self.observed_stat,
            self.p_value,
            self.p_se,
            self.kept_samples,
            self.acceptance_rate,
            self.steps,
            self.burn_in,
            self.thin,
            self.chains,
            self.seed,
            self.fit.converged,
            self.fit.iterations,
            self.fit.max_gap,
            self.data_fingerprint
        );
        format!("{header}\n{row}\n")
    }
}

/// Canonical name of a model family instance.
pub fn model_name(spec: &ModelSpec) -> String {
    use crate::design::{Reciprocity, SbmVariant};
    match spec {
        ModelSpec::Independence { d1, d2 } => format!("independence({d1}x{d2})"),
        ModelSpec::Beta { n } => format!("beta(n={n})"),
        ModelSpec::P1 { n, recip } => {
            let r = match recip {
                Reciprocity::Zero => "zero",
                Reciprocity::Constant => "constant",
                Reciprocity::Differential => "differential",
            };
            format!("p1-{r}(n={n})")
        }
        ModelSpec::Sbm { partition, variant } => {
            let v = match variant {
                SbmVariant::Restricted => "restricted",
                SbmVariant::Full => "full",
            };
            format!("sbm-{v}(n={}, blocks={})", partition.n(), partition.k())
        }
    }
}

/// SHA-256 fingerprint of a table (shape, mode, and cells).
pub fn data_fingerprint(t: &DyadTable) -> String {
    let mut h = Sha256::new();
    match t.shape() {
        TableShape::Dyadic { n, directed } => {
            h.update(format!("dyadic;n={n};directed={directed};").as_bytes());
        }
        TableShape::Flat { len } => {
            h.update(format!("flat;len={len};").as_bytes());
        }
    }
    let mode = match t.mode() {
        Mode::Simple => "simple",
        Mode::Multigraph => "multigraph",
    };
    h.update(mode.as_bytes());
    h.update(b";");
    for &c in t.cells() {
        h.update(c.to_le_bytes());
    }
    h.finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn quantiles(kept: &[f64]) -> Vec<(f64, f64)> {
    if kept.is_empty() {
        return Vec::new();
    }
    let mut sorted = kept.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("statistics are not NaN"));
    [0.05, 0.25, 0.5, 0.75, 0.95]
        .iter()
        .map(|&q| {
            let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
            (q, sorted[idx])
        })
        .collect()
}

/// Runs the exact conditional goodness-of-fit test of `spec` on `t`.
///
/// Fits the model by iterative scaling, freezes the fitted means, and walks
/// the fiber of `t` with the model's standard proposal set, estimating
/// `P(stat >= observed | margins)` under the conditional null law.
pub fn exact_test(
    t: &DyadTable,
    spec: &ModelSpec,
    stat: StatKind,
    cfg: &ChainConfig,
    node_labels: Option<&[String]>,
) -> Result<GofReport> {
    if t.shape() != spec.table_shape() {
        return Err(Error::InvalidTable(format!(
            "table shape {:?} does not match the model's {:?}",
            t.shape(),
            spec.table_shape()
        )));
    }
    let a = spec.design()?;
    let fit = ipf_fit(&a, t, 1e-10, 10_000)?;
    let mut warnings = Vec::new();
    if !fit.converged {
        warnings.push(format!(
            "fit did not converge: margin gap {:.3e} after {} iterations",
            fit.max_gap, fit.iterations
        ));
    }
    if !mle_existence_heuristic(&a, t)? {
        warnings.push(
            "a sufficient statistic lies on its boundary; the MLE may not exist \
             and fitted means may sit at zero or one"
                .into(),
        );
    }

    let fitted = fit.fitted.clone();
    let stat_fn = move |v: &DyadTable| stat.value(v.cells(), &fitted);
    let proposals = ProposalSet::for_model(spec, &a, t.mode())?;
    let target = spec.target(t.mode());
    let chain = run_chain(t, &a, &proposals, target, stat_fn, cfg)?;

    let observed_infinite = chain.observed.is_infinite();
    if observed_infinite {
        warnings.push(
            "observed statistic is infinite: a positive count sits on a zero fitted mean".into(),
        );
    }

    let stats = sufficient_statistics(&a, t)?;
    Ok(GofReport {
        model: model_name(spec),
        mode: match t.mode() {
            Mode::Simple => "simple".into(),
            Mode::Multigraph => "multigraph".into(),
        },
        statistic: stat.name().into(),
        observed_stat: chain.observed,
        observed_infinite,
        p_value: chain.p_value,
        p_se: chain.p_se,
        kept_samples: chain.kept.len(),
        acceptance_rate: chain.acceptance_rate,
        steps: cfg.steps,
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        chains: cfg.chains,
        seed: cfg.seed,
        fit: FitSummary {
            converged: fit.converged,
            iterations: fit.iterations,
            max_gap: fit.max_gap,
        },
        sufficient_stats: stats
            .labels
            .into_iter()
            .zip(stats.values)
            .collect(),
        node_labels: node_labels.map(<[String]>::to_vec),
        null_quantiles: quantiles(&chain.kept),
        warnings,
        data_fingerprint: data_fingerprint(t),
    })
}

/// Draws simple tables from the fitted dyad-wise multinomial: each dyad
/// independently takes a state with probabilities proportional to its fitted
/// means. Requires a converged fit on a dyadic model.
pub fn simulate_tables(
    spec: &ModelSpec,
    fit: &FitResult,
    count: usize,
    seed: u64,
) -> Result<Vec<DyadTable>> {
    use rand::{Rng, SeedableRng};
    if !fit.converged {
        return Err(Error::NonconvergedFit);
    }
    let shape = spec.table_shape();
    let TableShape::Dyadic { .. } = shape else {
        return Err(Error::InvalidModel(
            "dyad-wise simulation requires a dyadic model".into(),
        ));
    };
    let s = shape.states_per_dyad().expect("dyadic");
    if fit.fitted.len() != shape.len() {
        return Err(Error::DimensionMismatch {
            expected: shape.len(),
            got: fit.fitted.len(),
        });
    }
    let mut rng = {
        let mut seed_bytes = [0u8; 32];
        seed_bytes[..8].copy_from_slice(&seed.to_le_bytes());
        seed_bytes[16..32].copy_from_slice(b"fibergof-simul01");
        rand_chacha::ChaCha12Rng::from_seed(seed_bytes)
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut cells = vec![0i64; shape.len()];
        for (d, block) in fit.fitted.chunks_exact(s).enumerate() {
            let total: f64 = block.iter().sum();
            if !(total > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "fitted means on dyad {d} sum to {total}; cannot draw a state"
                )));
            }
            let mut u = rng.random::<f64>() * total;
            let mut state = s - 1;
            for (k, &w) in block.iter().enumerate() {
                if u < w {
                    state = k;
                    break;
                }
                u -= w;
            }
            cells[d * s + state] = 1;
        }
        out.push(DyadTable::new(shape, Mode::Simple, cells)?);
    }
    Ok(out)
}
