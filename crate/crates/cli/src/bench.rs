//! Recovery-rate sweep over a grid of (m, s) cells.

use std::fmt::Write as _;

use bincs_core::diagnostics::{recovery_metrics, verify_uniqueness};
use bincs_core::instances::{gen_planted, BinarySignal, Distribution};
use bincs_core::qubo_ising::{build_qubo, qubo_to_ising};
use bincs_core::solvers::solve_qubo;

use crate::{usage, BackendArgs, CliResult};

pub const CSV_HEADER: &str = "m,n,s,trials,discarded,exact_rate,support_f1_mean,residual_mean";

#[derive(Debug, Clone)]
pub struct BenchGrid {
    pub n: usize,
    pub m_values: Vec<usize>,
    pub s_values: Vec<usize>,
    pub trials: usize,
    pub backend: BackendArgs,
    pub dist: Distribution,
    /// `None` keeps each generated instance's default penalty.
    pub lambda: Option<f64>,
    pub uniqueness_cap: usize,
    pub seed: u64,
}

/// Aggregates for one cell. Rates and means run over the trials that
/// passed the uniqueness check and are NaN when none did.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub m: usize,
    pub s: usize,
    pub trials: usize,
    pub discarded: usize,
    pub exact_rate: f64,
    pub support_f1_mean: f64,
    pub residual_mean: f64,
}

/// `root ⊕ (cell·2⁴⁰ + trial)`; cells are numbered m-major, s-minor.
pub fn trial_seed(root: u64, cell: usize, trial: usize) -> u64 {
    root ^ ((cell as u64) << 40).wrapping_add(trial as u64)
}

fn validate(grid: &BenchGrid) -> CliResult<()> {
    if grid.n == 0 || grid.trials == 0 {
        return Err(usage("--n and --trials must be positive"));
    }
    if grid.m_values.is_empty() || grid.s_values.is_empty() {
        return Err(usage("--m-list and --s-list must be nonempty"));
    }
    if grid.m_values.contains(&0) {
        return Err(usage("every m must be positive"));
    }
    if let Some(&s) = grid.s_values.iter().find(|&&s| s > grid.n) {
        return Err(bincs_core::Error::Sparsity { s, n: grid.n }.into());
    }
    if grid.n > grid.uniqueness_cap {
        return Err(bincs_core::Error::Size {
            n: grid.n,
            cap: grid.uniqueness_cap,
        }
        .into());
    }
    Ok(())
}

pub fn run_cells(grid: &BenchGrid) -> CliResult<Vec<CellSummary>> {
    validate(grid)?;
    let mut out = Vec::new();
    let cells = grid.m_values.iter().flat_map(|&m| grid.s_values.iter().map(move |&s| (m, s)));
    for (cell, (m, s)) in cells.enumerate() {
        let (mut discarded, mut exact, mut f1, mut residual) = (0usize, 0usize, 0.0, 0.0);
        for trial in 0..grid.trials {
            let seed = trial_seed(grid.seed, cell, trial);
            let (mut inst, x_true) = gen_planted::<f64>(m, grid.n, s, grid.dist, seed)?;
            if let Some(lambda) = grid.lambda {
                inst = inst.with_lambda(lambda)?;
            }
            if !verify_uniqueness(&inst, grid.uniqueness_cap)?.unique {
                discarded += 1;
                continue;
            }
            let q = build_qubo(&inst);
            let backend = grid.backend.resolve(&qubo_to_ising(&q))?;
            let result = solve_qubo(&q, &backend, seed)?;
            let x = BinarySignal::new(result.best_state.iter().map(|&v| v as u8).collect())?;
            let metrics = recovery_metrics(&x, &x_true, &inst)?;
            exact += usize::from(metrics.exact_match);
            f1 += metrics.support_f1;
            residual += metrics.residual;
        }
        let counted = (grid.trials - discarded) as f64;
        out.push(CellSummary {
            m,
            s,
            trials: grid.trials,
            discarded,
            exact_rate: exact as f64 / counted,
            support_f1_mean: f1 / counted,
            residual_mean: residual / counted,
        });
    }
    Ok(out)
}

pub fn run_bench(grid: &BenchGrid) -> CliResult<String> {
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for c in run_cells(grid)? {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            c.m,
            grid.n,
            c.s,
            c.trials,
            c.discarded,
            format_g(c.exact_rate),
            format_g(c.support_f1_mean),
            format_g(c.residual_mean)
        )
        .unwrap();
    }
    Ok(csv)
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// C-style `%g` with six significant digits.
pub fn format_g(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mant), exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_owned()
    }
}
