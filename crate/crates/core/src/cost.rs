//! Closed-form Toffoli and qubit counts, parameter search and improvement
//! sweeps.
//!
//! Every `N / lambda` in a published formula is evaluated as
//! `ceil(N / lambda)`.

use std::fmt;
use std::io::Write;

use crate::error::ParamError;
use crate::qrom::{ceil_log2, check_lambda, plan_qrom};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    BitPacket,
    SelectCopy,
    Power2Packet,
    SequentialFresh,
    SequentialInplace,
    Plain,
    PlainCircuit,
    LowClean,
    LowDirty,
    Berry,
    UncomputePrior,
    UncomputeSelectCopy,
}

impl Formula {
    pub fn as_str(self) -> &'static str {
        match self {
            Formula::BitPacket => "bit_packet",
            Formula::SelectCopy => "select_copy",
            Formula::Power2Packet => "power2_packet",
            Formula::SequentialFresh => "sequential_fresh",
            Formula::SequentialInplace => "sequential_inplace",
            Formula::Plain => "plain",
            Formula::PlainCircuit => "plain_circuit",
            Formula::LowClean => "low_clean",
            Formula::LowDirty => "low_dirty",
            Formula::Berry => "berry",
            Formula::UncomputePrior => "uncompute_prior",
            Formula::UncomputeSelectCopy => "uncompute_select_copy",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostBreakdown {
    pub formula: Formula,
    pub toffoli_total: u64,
    /// Toffolis spent in the Select (or other `q`-indexed) stages.
    pub select_toffoli: u64,
    /// Everything else: copies, swaps, restores.
    pub copy_toffoli: u64,
    pub dirty_qubits: u64,
    pub clean_work_qubits: u64,
    pub output_qubits: u64,
}

impl CostBreakdown {
    fn new(formula: Formula, select: u64, copy: u64, dirty: u64, clean: u64, output: u64) -> Self {
        CostBreakdown {
            formula,
            toffoli_total: select + copy,
            select_toffoli: select,
            copy_toffoli: copy,
            dirty_qubits: dirty,
            clean_work_qubits: clean,
            output_qubits: output,
        }
    }
}

fn check_b(b: u64) -> Result<(), ParamError> {
    if b == 0 {
        return Err(ParamError::new("b must be at least 1"));
    }
    Ok(())
}

/// General bit-packet lookup cost:
/// `(ceil(b/mu) + 1)(ceil(N/lambda) + lambda - 3) + (lambda - 1)(mu (floor(b/mu) + 1) + b mod mu)`.
pub fn cost_bit_packet(n: u64, b: u64, lambda: u64, mu: u64) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    check_lambda(n, lambda)?;
    if mu == 0 || mu > b {
        return Err(ParamError::new(format!(
            "mu must satisfy 1 <= mu <= b, got mu={mu}, b={b}"
        )));
    }
    let alpha = b.div_ceil(mu);
    let q = n.div_ceil(lambda);
    let select = (alpha + 1) * (q - 1);
    let copy = (alpha + 1) * (lambda - 2) + (lambda - 1) * (mu * (b / mu + 1) + b % mu);
    let work = ceil_log2(q).max(lambda.trailing_zeros() as usize) as u64;
    Ok(CostBreakdown::new(
        Formula::BitPacket,
        select,
        copy,
        mu * (lambda - 1),
        work,
        b,
    ))
}

/// `2 ceil(N/lambda) + 2b(lambda - 1) + 2 lambda - 6`.
pub fn cost_select_copy(n: u64, b: u64, lambda: u64) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    check_lambda(n, lambda)?;
    let q = n.div_ceil(lambda);
    let select = 2 * (q - 1);
    let copy = 2 * b * (lambda - 1) + 2 * (lambda - 2);
    let work = ceil_log2(q).max(lambda.trailing_zeros() as usize) as u64;
    Ok(CostBreakdown::new(
        Formula::SelectCopy,
        select,
        copy,
        b * (lambda - 1),
        work,
        b,
    ))
}

/// Cost of `alpha` sequential `b/alpha`-bit lookups with copy depth
/// `alpha * lambda`, for powers of two:
/// `(1 + 1/alpha) N/lambda + (b + b/alpha)(alpha lambda - 1) + (alpha + 1)(alpha lambda - 3)`.
pub fn cost_power2_packet(
    n: u64,
    b: u64,
    lambda: u64,
    alpha: u64,
) -> Result<CostBreakdown, ParamError> {
    for (name, v) in [("N", n), ("b", b), ("lambda", lambda), ("alpha", alpha)] {
        if !v.is_power_of_two() {
            return Err(ParamError::new(format!(
                "{name} must be a power of two, got {v}"
            )));
        }
    }
    if alpha > b {
        return Err(ParamError::new(format!(
            "alpha must not exceed b, got alpha={alpha}, b={b}"
        )));
    }
    let depth = alpha
        .checked_mul(lambda)
        .ok_or_else(|| ParamError::new("alpha * lambda overflows"))?;
    check_lambda(n, depth)?;
    // (1 + 1/alpha) N / lambda = (alpha + 1) N / (alpha lambda), an integer here
    let select = (alpha + 1) * (n / depth - 1);
    let copy = (b + b / alpha) * (depth - 1) + (alpha + 1) * (depth - 2);
    let work = ceil_log2(n / depth).max(depth.trailing_zeros() as usize) as u64;
    Ok(CostBreakdown::new(
        Formula::Power2Packet,
        select,
        copy,
        (b / alpha) * (depth - 1),
        work,
        b,
    ))
}

/// `m` lookups into fresh output registers sharing dirty qubits:
/// `(m + 1)(ceil(N/lambda) + b(lambda - 1) + lambda - 3)`.
///
/// `m = 0` evaluates the formula only; no circuit corresponds to it.
pub fn cost_sequential_fresh(
    n: u64,
    b: u64,
    lambda: u64,
    m: u64,
) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    check_lambda(n, lambda)?;
    let q = n.div_ceil(lambda);
    let select = (m + 1) * (q - 1);
    let copy = (m + 1) * (b * (lambda - 1) + lambda - 2);
    let work = ceil_log2(q).max(lambda.trailing_zeros() as usize) as u64;
    Ok(CostBreakdown::new(
        Formula::SequentialFresh,
        select,
        copy,
        b * (lambda - 1),
        work,
        m * b,
    ))
}

/// `m` lookups into the same output register, caching `phi`:
/// `(m + 1) ceil(N/lambda) + (m + 2)(b(lambda - 1) + lambda - 3)`.
pub fn cost_sequential_inplace(
    n: u64,
    b: u64,
    lambda: u64,
    m: u64,
) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    check_lambda(n, lambda)?;
    let q = n.div_ceil(lambda);
    let select = (m + 1) * q;
    let copy = (m + 2) * (b * (lambda - 1) + lambda - 3);
    let work = ceil_log2(q).max(lambda.trailing_zeros() as usize) as u64;
    Ok(CostBreakdown::new(
        Formula::SequentialInplace,
        select,
        copy,
        b * (lambda - 1),
        work,
        b,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorArt {
    /// Unary iteration, headline `N`.
    Plain,
    /// `N/lambda + b lambda`, `b(lambda - 1)` clean qubits.
    LowClean,
    /// `2N/lambda + 4b lambda`, `b lambda` dirty qubits.
    LowDirty,
    /// `2N/lambda + 4b(lambda - 1)`, `b(lambda - 1)` dirty qubits.
    Berry,
}

/// Headline cost of a prior construction. `lambda` is ignored for
/// [`PriorArt::Plain`].
pub fn cost_prior_art(
    kind: PriorArt,
    n: u64,
    b: u64,
    lambda: u64,
) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    let addr = ceil_log2(n) as u64;
    if kind == PriorArt::Plain {
        if n == 0 {
            return Err(ParamError::new("N must be at least 1"));
        }
        return Ok(CostBreakdown::new(Formula::Plain, n, 0, 0, addr, b));
    }
    check_lambda(n, lambda)?;
    let q = n.div_ceil(lambda);
    let work = ceil_log2(q) as u64;
    Ok(match kind {
        PriorArt::LowClean => CostBreakdown::new(
            Formula::LowClean,
            q,
            b * lambda,
            0,
            work + b * (lambda - 1),
            b,
        ),
        PriorArt::LowDirty => CostBreakdown::new(
            Formula::LowDirty,
            2 * q,
            4 * b * lambda,
            b * lambda,
            work,
            b,
        ),
        PriorArt::Berry => CostBreakdown::new(
            Formula::Berry,
            2 * q,
            4 * b * (lambda - 1),
            b * (lambda - 1),
            work,
            b,
        ),
        PriorArt::Plain => unreachable!(),
    })
}

/// Toffoli count of the circuit that [`crate::baselines::build_plain_qrom`]
/// emits: `N - 1`.
pub fn cost_plain_circuit(n: u64, b: u64) -> Result<CostBreakdown, ParamError> {
    check_b(b)?;
    if n == 0 {
        return Err(ParamError::new("N must be at least 1"));
    }
    Ok(CostBreakdown::new(
        Formula::PlainCircuit,
        n - 1,
        0,
        0,
        ceil_log2(n) as u64,
        b,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncomputeKind {
    /// `2N/lambda' + 4 lambda'`.
    Prior,
    /// `2N/lambda' + 2 lambda' - 6`.
    SelectCopy,
}

/// Toffoli cost of measurement-based lookup uncomputation with
/// `lambda' - 1` dirty qubits.
pub fn cost_uncompute(
    kind: UncomputeKind,
    n: u64,
    lambda_prime: u64,
) -> Result<CostBreakdown, ParamError> {
    if n == 0 {
        return Err(ParamError::new("N must be at least 1"));
    }
    if lambda_prime < 2 {
        return Err(ParamError::new(format!(
            "lambda' must be at least 2, got {lambda_prime}"
        )));
    }
    let q = n.div_ceil(lambda_prime);
    let dirty = lambda_prime - 1;
    let work = ceil_log2(q).max(ceil_log2(lambda_prime)) as u64;
    Ok(match kind {
        UncomputeKind::Prior => CostBreakdown::new(
            Formula::UncomputePrior,
            2 * q,
            4 * lambda_prime,
            dirty,
            work,
            0,
        ),
        UncomputeKind::SelectCopy => CostBreakdown::new(
            Formula::UncomputeSelectCopy,
            2 * (q - 1),
            2 * (lambda_prime - 2),
            dirty,
            work,
            0,
        ),
    })
}

/// Powers of two `lambda` with `1 < lambda < N`.
pub fn lambda_candidates(n: u64) -> impl Iterator<Item = u64> {
    (1..64).map(|k| 1u64 << k).take_while(move |&l| l < n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizationResult {
    /// 0 when infeasible.
    pub lambda: u64,
    /// 0 when infeasible.
    pub mu: u64,
    pub cost: CostBreakdown,
    pub feasible: bool,
}

/// Exhaustive minimisation of [`cost_bit_packet`] over `lambda = 2^k`,
/// `1 < lambda < N` and `1 <= mu <= b` with `mu (lambda - 1) <= dirty_budget`.
/// Ties go to the smaller `lambda`, then the smaller `mu`. With no feasible
/// pair the result carries the plain circuit's `N - 1`.
pub fn optimize_parameters(
    n: u64,
    b: u64,
    dirty_budget: u64,
) -> Result<OptimizationResult, ParamError> {
    check_b(b)?;
    if n < 4 {
        return Err(ParamError::new(format!("N must be at least 4, got {n}")));
    }
    let mut best: Option<OptimizationResult> = None;
    for lambda in lambda_candidates(n) {
        let max_mu = b.min(dirty_budget / (lambda - 1));
        for mu in 1..=max_mu {
            let cost = cost_bit_packet(n, b, lambda, mu)?;
            if best.is_none_or(|r| cost.toffoli_total < r.cost.toffoli_total) {
                best = Some(OptimizationResult {
                    lambda,
                    mu,
                    cost,
                    feasible: true,
                });
            }
        }
    }
    match best {
        Some(r) => Ok(r),
        None => Ok(OptimizationResult {
            lambda: 0,
            mu: 0,
            cost: cost_plain_circuit(n, b)?,
            feasible: false,
        }),
    }
}

/// Minimum of `cost(lambda)` over powers of two `lambda < N` whose dirty
/// usage fits the budget; `(lambda, toffolis)`.
fn best_over_lambda(
    n: u64,
    dirty_budget: u64,
    mut cost: impl FnMut(u64) -> Result<CostBreakdown, ParamError>,
) -> Result<Option<(u64, u64)>, ParamError> {
    let mut best: Option<(u64, u64)> = None;
    for lambda in lambda_candidates(n) {
        let c = cost(lambda)?;
        if c.dirty_qubits <= dirty_budget && best.is_none_or(|(_, t)| c.toffoli_total < t) {
            best = Some((lambda, c.toffoli_total));
        }
    }
    Ok(best)
}

/// Best headline Berry cost under the dirty budget, as `(lambda, toffolis)`.
pub fn berry_optimal(n: u64, b: u64, dirty_budget: u64) -> Result<Option<(u64, u64)>, ParamError> {
    best_over_lambda(n, dirty_budget, |l| {
        cost_prior_art(PriorArt::Berry, n, b, l)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub berry: u64,
    /// Best with a single packet (`mu = b`).
    pub alpha1: u64,
    /// Best with one-bit packets (`mu = 1`).
    pub alphab: u64,
    pub best: u64,
    pub lambda: u64,
    pub mu: u64,
    pub improvement: f64,
}

/// One row per `N`: optimal Berry cost against the optimal bit-packet costs at
/// the same dirty budget. The plain circuit needs no dirty qubits, so every
/// column is capped at its `N - 1`; when plain wins `best`, `lambda` and `mu`
/// are reported as 0.
pub fn improvement_sweep(
    b: u64,
    dirty_budget: u64,
    n_values: &[u64],
) -> Result<Vec<SweepRow>, ParamError> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ParamError::new("N values must be strictly ascending"));
    }
    n_values
        .iter()
        .map(|&n| {
            let plain = n - 1;
            let capped = |r: Option<(u64, u64)>| r.map_or(plain, |(_, t)| t.min(plain));
            let berry = capped(berry_optimal(n, b, dirty_budget)?);
            let alpha1 = capped(best_over_lambda(n, dirty_budget, |l| {
                cost_bit_packet(n, b, l, b)
            })?);
            let alphab = capped(best_over_lambda(n, dirty_budget, |l| {
                cost_bit_packet(n, b, l, 1)
            })?);
            let opt = optimize_parameters(n, b, dirty_budget)?;
            let (best, lambda, mu) = if opt.feasible && opt.cost.toffoli_total < plain {
                (opt.cost.toffoli_total, opt.lambda, opt.mu)
            } else {
                (plain, 0, 0)
            };
            Ok(SweepRow {
                n,
                berry,
                alpha1,
                alphab,
                best,
                lambda,
                mu,
                improvement: berry as f64 / best.max(1) as f64,
            })
        })
        .collect()
}

pub const SWEEP_HEADER: [&str; 8] = [
    "N",
    "berry",
    "alpha1",
    "alphab",
    "best",
    "lambda",
    "mu",
    "improvement",
];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.berry.to_string(),
            r.alpha1.to_string(),
            r.alphab.to_string(),
            r.best.to_string(),
            r.lambda.to_string(),
            r.mu.to_string(),
            format!("{:.6}", r.improvement),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `points` geometrically spaced integers from `n_min` to `n_max` inclusive,
/// deduplicated after rounding.
pub fn geometric_grid(n_min: u64, n_max: u64, points: usize) -> Result<Vec<u64>, ParamError> {
    if points == 0 {
        return Err(ParamError::new("points must be at least 1"));
    }
    if n_min == 0 || n_min > n_max {
        return Err(ParamError::new(format!(
            "need 1 <= n_min <= n_max, got {n_min}..{n_max}"
        )));
    }
    if points == 1 {
        return Ok(vec![n_min]);
    }
    let ratio = (n_max as f64 / n_min as f64).ln() / (points - 1) as f64;
    let mut grid: Vec<u64> = (0..points)
        .map(|i| match i {
            0 => n_min,
            i if i == points - 1 => n_max,
            i => ((n_min as f64) * (ratio * i as f64).exp()).round() as u64,
        })
        .map(|n| n.clamp(n_min, n_max))
        .collect();
    grid.dedup();
    Ok(grid)
}

/// `plan_qrom` agrees with the formula's qubit counts; used by tests and the
/// CLI to report register sizes.
pub fn plan_qubits(n: u64, b: u64, lambda: u64, mu: u64) -> Result<(u64, u64), ParamError> {
    let plan = plan_qrom(n, b as usize, lambda, mu as usize)?;
    Ok((
        plan.dirty_qubits() as u64,
        (plan.work_qubits() + plan.temp_qubits()) as u64,
    ))
}
