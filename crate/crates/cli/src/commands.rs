use std::path::Path;

use bincs_core::diagnostics::{
    coherence_sparsity_bound, mutual_coherence, recovery_metrics, rip_constant, verify_uniqueness, RecoveryMetrics,
    Uniqueness, RIP_DELTA_2S_THRESHOLD,
};
use bincs_core::hardware::{cell_clique_embedding, chimera, embed as embed_model, normalize, quantize, ChainStrength, EmbeddingMap};
use bincs_core::instances::{gen_planted, gen_uncertain_planted, BinarySignal, CsInstance};
use bincs_core::io::{read_model, write_model, Instance, InstanceDocument, ModelFile, Truth};
use bincs_core::qubo_ising::{build_qubo, objective, qubo_to_ising, IsingModel};
use bincs_core::solvers::{solve_exhaustive, solve_local, solve_qubo, solve_sa, AnnealSchedule, Backend, SolveResult};
use bincs_core::uncertainty::{assemble_a, recover as recover_trace, RecoverOptions};
use bincs_core::RecoveryTrace;
use serde::Serialize;

use crate::{emit, read_text, usage, BuildArgs, CliResult, DiagnoseArgs, Dist, EmbedArgs, Form, GenArgs, Kind, RecoverArgs, SolveArgs};

fn load(path: &Path) -> CliResult<InstanceDocument> {
    Ok(InstanceDocument::from_json(&read_text(path)?)?)
}

/// The standard instance, or the nominal (`d = 0`) one of an uncertain
/// instance.
fn nominal(inst: &Instance) -> CliResult<CsInstance<f64>> {
    Ok(match inst {
        Instance::Cs(i) => i.clone(),
        Instance::Uncertain(i) => i.nominal()?,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn to_signal(state: &[i8]) -> CliResult<BinarySignal> {
    Ok(BinarySignal::new(state.iter().map(|&v| v as u8).collect())?)
}

pub(crate) fn gen(a: &GenArgs) -> CliResult<()> {
    let doc = match a.kind {
        Kind::Cs => {
            let (inst, x) = gen_planted::<f64>(a.m, a.n, a.s, a.dist.into(), a.seed)?;
            InstanceDocument::new(Instance::Cs(inst), Some(Truth { x, d: None }))
        }
        Kind::CsUncertain => {
            if a.dist != Dist::Gaussian {
                return Err(usage("--kind cs-uncertain draws gaussian matrices only"));
            }
            let (inst, x, d) = gen_uncertain_planted::<f64>(a.m, a.n, a.s, a.r, a.gamma, a.noise, a.seed)?;
            InstanceDocument::new(Instance::Uncertain(inst), Some(Truth { x, d: Some(d) }))
        }
    };
    emit(a.out.as_deref(), &(doc.to_json() + "\n"))
}

pub(crate) fn build(a: &BuildArgs) -> CliResult<()> {
    let doc = load(&a.input)?;
    let q = build_qubo(&nominal(&doc.instance)?);
    let text = match a.form {
        Form::Qubo => {
            if a.normalize || a.bits.is_some() {
                return Err(usage("--normalize and --bits apply to --form ising only"));
            }
            write_model(&q)
        }
        Form::Ising => {
            let mut s = qubo_to_ising(&q);
            if a.normalize {
                s = normalize(&s).0;
            }
            if let Some(bits) = a.bits {
                s = quantize(&s, bits)?;
            }
            write_model(&s)
        }
    };
    emit(a.out.as_deref(), &text)
}

#[derive(Serialize)]
struct SolveReport {
    #[serde(flatten)]
    result: SolveResult<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<RecoveryMetrics<f64>>,
}

fn solve_ising(s: &IsingModel<f64>, backend: &Backend<f64>, seed: u64) -> CliResult<SolveResult<f64>> {
    Ok(match backend {
        Backend::Exhaustive { cap_n } => solve_exhaustive(s, *cap_n)?,
        Backend::Sa(schedule) => {
            let schedule = schedule.clone().unwrap_or_else(|| AnnealSchedule::default_for(s));
            solve_sa(s, &schedule, seed)?
        }
        Backend::Local { starts } => solve_local(s, *starts, seed)?,
    })
}

pub(crate) fn solve(a: &SolveArgs) -> CliResult<()> {
    let text = read_text(&a.input)?;
    let report = if text.trim_start().starts_with('{') {
        let doc = InstanceDocument::from_json(&text)?;
        let mut inst = nominal(&doc.instance)?;
        if let Some(lambda) = a.lambda {
            inst = inst.with_lambda(lambda)?;
        }
        let q = build_qubo(&inst);
        let backend = a.backend.resolve(&qubo_to_ising(&q))?;
        let result = solve_qubo(&q, &backend, a.seed)?;
        let x = to_signal(&result.best_state)?;
        let metrics = match &doc.truth {
            Some(t) => Some(recovery_metrics(&x, &t.x, &inst)?),
            None => None,
        };
        SolveReport {
            objective: Some(objective(&inst, &x)?),
            metrics,
            result,
        }
    } else {
        if a.lambda.is_some() {
            return Err(usage("--lambda needs an instance document, not an exported model"));
        }
        let result = match read_model(&text)? {
            ModelFile::Qubo(q) => solve_qubo(&q, &a.backend.resolve(&qubo_to_ising(&q))?, a.seed)?,
            ModelFile::Ising(s) => solve_ising(&s, &a.backend.resolve(&s)?, a.seed)?,
        };
        SolveReport {
            result,
            objective: None,
            metrics: None,
        }
    };
    emit(a.out.as_deref(), &json(&report))
}

#[derive(Serialize)]
struct RecoverReport {
    #[serde(flatten)]
    trace: RecoveryTrace<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<RecoveryMetrics<f64>>,
    /// `‖d − d_true‖₂`.
    #[serde(skip_serializing_if = "Option::is_none")]
    d_error: Option<f64>,
}

pub(crate) fn recover(a: &RecoverArgs) -> CliResult<()> {
    let doc = load(&a.input)?;
    let Instance::Uncertain(inst) = &doc.instance else {
        return Err(usage("recover needs a cs-uncertain instance"));
    };
    let backend = a.backend.resolve(&qubo_to_ising(&build_qubo(&inst.nominal()?)))?;
    let opts = RecoverOptions {
        backend,
        eps: a.eps,
        max_iters: a.max_iters,
        seed: a.seed,
    };
    let trace = recover_trace(inst, &opts)?;
    let last = trace.last();
    let (mut metrics, mut d_error) = (None, None);
    if let Some(t) = &doc.truth {
        let at_d = CsInstance::new(assemble_a(inst, &last.d)?, inst.y().to_vec(), inst.lambda())?;
        metrics = Some(recovery_metrics(&last.x, &t.x, &at_d)?);
        d_error = t
            .d
            .as_ref()
            .map(|d| d.iter().zip(&last.d).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt());
    }
    let report = RecoverReport { trace, metrics, d_error };
    emit(a.out.as_deref(), &json(&report))
}

#[derive(Serialize)]
struct CoherenceReport {
    mu: f64,
    /// Sparsity levels below `(1 + 1/μ)/2` are uniquely recoverable.
    sparsity_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth_within_bound: Option<bool>,
}

#[derive(Serialize)]
struct RipReport {
    s: usize,
    delta: f64,
}

#[derive(Serialize)]
struct UniquenessReport {
    #[serde(flatten)]
    result: Uniqueness<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth_is_unique_minimizer: Option<bool>,
}

#[derive(Serialize)]
struct Advisory {
    rip_delta_2s_threshold: f64,
    coherence_condition: &'static str,
    coherence_note: &'static str,
}

#[derive(Serialize)]
struct DiagnoseReport {
    m: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    coherence: Option<CoherenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rip: Option<RipReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniqueness: Option<UniquenessReport>,
    advisory: Advisory,
}

pub(crate) fn diagnose(a: &DiagnoseArgs) -> CliResult<()> {
    let doc = load(&a.input)?;
    let inst = nominal(&doc.instance)?;
    let everything = !a.coherence && a.rip.is_none() && !a.uniqueness;
    let truth = doc.truth.as_ref().map(|t| &t.x);

    let coherence = if a.coherence || everything {
        let mu = mutual_coherence(inst.a())?;
        let bound = coherence_sparsity_bound(mu);
        Some(CoherenceReport {
            mu,
            sparsity_bound: bound,
            truth_within_bound: truth.map(|x| (x.sparsity() as f64) < bound),
        })
    } else {
        None
    };
    let rip = match a.rip {
        Some(s) => Some(RipReport {
            s,
            delta: rip_constant(inst.a(), s, a.rip_cap)?,
        }),
        None => None,
    };
    let uniqueness = if a.uniqueness || everything {
        let result = verify_uniqueness(&inst, a.uniqueness_cap)?;
        Some(UniquenessReport {
            truth_is_unique_minimizer: truth.map(|x| result.unique && result.minimizers[0] == *x),
            result,
        })
    } else {
        None
    };
    let report = DiagnoseReport {
        m: inst.m(),
        n: inst.n(),
        coherence,
        rip,
        uniqueness,
        advisory: Advisory {
            rip_delta_2s_threshold: RIP_DELTA_2S_THRESHOLD,
            coherence_condition: "sparsity < (1 + 1/mu)/2",
            coherence_note: "the variant mu < (1 + 1/mu)/2 holds for every mu in (0, 1] and is not a usable test; \
                             the bound is read as a limit on sparsity",
        },
    };
    emit(a.out.as_deref(), &json(&report))
}

fn parse_chain_strength(text: &str) -> CliResult<ChainStrength<f64>> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(ChainStrength::Auto);
    }
    match text.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(ChainStrength::Fixed(v)),
        _ => Err(usage(format!("--chain-strength must be a positive number or auto, got `{text}`"))),
    }
}

pub(crate) fn embed(a: &EmbedArgs) -> CliResult<()> {
    let model = match read_model(&read_text(&a.input)?)? {
        ModelFile::Ising(s) => s,
        ModelFile::Qubo(q) => qubo_to_ising(&q),
    };
    let (rows, cols) = (a.cells[0], a.cells[1]);
    if rows == 0 || cols == 0 || a.t == 0 {
        return Err(usage("--cells and --t must be positive"));
    }
    let g = chimera(rows, cols, a.t);
    let emb = match &a.embedding {
        Some(path) => serde_json::from_str::<EmbeddingMap>(&read_text(path)?)
            .map_err(|e| usage(format!("embedding file {}: {e}", path.display())))?,
        None => {
            if !g.is_single_cell() {
                return Err(usage("graphs with more than one cell need an --embedding file"));
            }
            cell_clique_embedding(model.n(), &g)?
        }
    };
    let physical = embed_model(&model, &g, &emb, parse_chain_strength(&a.chain_strength)?)?;
    emit(a.out.as_deref(), &write_model(&physical))
}
