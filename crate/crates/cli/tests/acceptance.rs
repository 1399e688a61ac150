//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p bincs-cli --test acceptance`.

use std::time::Instant;

use bincs_cli::bench::{run_bench, run_cells, BenchGrid};
use bincs_cli::BackendArgs;
use bincs_core::diagnostics::{mutual_coherence, rip_constant, verify_uniqueness};
use bincs_core::hardware::{cell_clique_embedding, chimera, embed, normalize, quantize, unembed, ChainStrength};
use bincs_core::instances::{gen_planted, gen_uncertain_planted, BinarySignal, Distribution};
use bincs_core::linalg::Matrix;
use bincs_core::qubo_ising::{build_qubo, ising_energy, objective, qubo_energy, qubo_to_ising, IsingModel, QuadraticModel};
use bincs_core::solvers::{solve_exhaustive, solve_qubo, solve_sa, AnnealSchedule, Backend};
use bincs_core::uncertainty::{recover, solve_d, RecoverOptions, Termination};
use bincs_core::CsInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and thresholds.
const IDENTITY_TOL: f64 = 1e-9;
const SA_MIN_HITS: usize = 90;
const D_GRADIENT_TOL: f64 = 1e-8;
const D_ORACLE_TOL: f64 = 1e-6;
const DESCENT_EPS: f64 = 1e-6;
const DESCENT_MAX_ITERS: usize = 20;
const DESCENT_D_TOL: f64 = 1e-3;
const DESCENT_MIN_RATE: f64 = 0.8;
const EMBED_TOL: f64 = 1e-12;
const MU_TOL: f64 = 1e-12;
const DELTA2_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_instance(rng: &mut ChaCha8Rng) -> CsInstance<f64> {
    let (m, n) = (rng.random_range(1..=8), rng.random_range(1..=12));
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    CsInstance::new(Matrix::from_rows(&rows).unwrap(), y, rng.random_range(0.0..0.5)).unwrap()
}

/// `‖y − Ax‖² + λ‖x‖₀` by explicit loops.
fn objective_oracle(inst: &CsInstance<f64>, x: &[u8]) -> f64 {
    let a = inst.a();
    let mut f = 0.0;
    for t in 0..inst.m() {
        let ax: f64 = (0..inst.n()).map(|i| a[(t, i)] * x[i] as f64).sum();
        f += (inst.y()[t] - ax).powi(2);
    }
    f + inst.lambda() * x.iter().map(|&b| b as f64).sum::<f64>()
}

fn corpus() -> Vec<CsInstance<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    (0..200).map(|_| random_instance(&mut rng)).collect()
}

fn c1_qubo_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut states = 0usize;
    for inst in corpus() {
        let q = build_qubo(&inst);
        let y2: f64 = inst.y().iter().map(|v| v * v).sum();
        for bits in 0..1u64 << inst.n() {
            let x = BinarySignal::from_bits(inst.n(), bits);
            let f = objective(&inst, &x).map_err(|e| e.to_string())?;
            let oracle = objective_oracle(&inst, x.values());
            let gap = (f - y2 - qubo_energy(&q, &x).unwrap()).abs() / (1.0 + f.abs());
            let gap_oracle = (f - oracle).abs() / (1.0 + oracle.abs());
            worst = worst.max(gap).max(gap_oracle);
            states += 1;
        }
    }
    check(worst <= IDENTITY_TOL, || format!("relative gap {worst:e}"))?;
    Ok(format!("200 instances, {states} states, max relative gap {worst:.2e}"))
}

fn c2_ising_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for inst in corpus() {
        let s = qubo_to_ising(&build_qubo(&inst));
        for bits in 0..1u64 << inst.n() {
            let x = BinarySignal::from_bits(inst.n(), bits);
            let f = objective_oracle(&inst, x.values());
            let e = ising_energy(&s, &x.to_spins()).unwrap() + s.offset();
            worst = worst.max((f - e).abs() / (1.0 + f.abs()));
        }
    }
    check(worst <= IDENTITY_TOL, || format!("relative gap {worst:e}"))?;
    Ok(format!("max relative gap {worst:.2e}"))
}

fn c3_oracle_recovery() -> Outcome {
    let (mut counted, mut hits) = (0, 0);
    for seed in 0..100 {
        let (inst, x) = gen_planted::<f64>(10, 16, 2, Distribution::Gaussian, seed).unwrap();
        if !verify_uniqueness(&inst, 20).unwrap().unique {
            continue;
        }
        counted += 1;
        let r = solve_qubo(&build_qubo(&inst), &Backend::Exhaustive { cap_n: 25 }, 0).unwrap();
        if r.best_state.iter().map(|&v| v as u8).eq(x.values().iter().copied()) {
            hits += 1;
        }
    }
    check(counted > 0 && hits == counted, || format!("{hits}/{counted} counted trials recovered"))?;
    Ok(format!("{hits}/{counted} counted trials recovered, {} discarded", 100 - counted))
}

fn random_ising(rng: &mut ChaCha8Rng, n: usize) -> IsingModel<f64> {
    let field: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut coupling = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            coupling.push(((i, j), rng.random_range(-1.0..1.0)));
        }
    }
    IsingModel::new(field, coupling, 0.0).unwrap()
}

/// Minimum energy by enumerating states in natural binary order.
fn ground_energy(m: &IsingModel<f64>) -> f64 {
    let n = m.n();
    (0..1u32 << n)
        .map(|b| {
            let z: Vec<i8> = (0..n).map(|i| if (b >> i) & 1 == 1 { 1 } else { -1 }).collect();
            m.energy(&z).unwrap() + m.offset()
        })
        .fold(f64::INFINITY, f64::min)
}

fn c4_sa_quality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut hits = 0;
    for k in 0..100 {
        let m = random_ising(&mut rng, 12);
        let e = ground_energy(&m);
        let r = solve_sa(&m, &AnnealSchedule::default_for(&m), k).unwrap();
        check(r.best_energy >= e - 1e-9, || format!("model {k}: SA below the exhaustive minimum"))?;
        if r.best_energy <= e + 1e-9 {
            hits += 1;
        }
    }
    check(hits >= SA_MIN_HITS, || format!("{hits}/100 ground states"))?;
    Ok(format!("{hits}/100 ground states"))
}

fn ridge(g: &Matrix<f64>, c: &[f64], gamma: f64, d: &[f64]) -> f64 {
    let mut f = 0.0;
    for t in 0..g.rows() {
        let gd: f64 = (0..g.cols()).map(|k| g[(t, k)] * d[k]).sum();
        f += (gd - c[t]).powi(2);
    }
    f + d.iter().map(|v| v * v).sum::<f64>() / gamma
}

/// Grid search with repeated halving of the search box around the best
/// grid point.
fn grid_oracle(g: &Matrix<f64>, c: &[f64], gamma: f64) -> Vec<f64> {
    let r = g.cols();
    let per_axis = 21usize;
    let mut center = vec![0.0; r];
    let mut radius = 50.0;
    while radius > 1e-10 {
        let mut best = (f64::INFINITY, center.clone());
        for idx in 0..per_axis.pow(r as u32) {
            let mut k = idx;
            let point: Vec<f64> = (0..r)
                .map(|a| {
                    let step = k % per_axis;
                    k /= per_axis;
                    center[a] - radius + 2.0 * radius * step as f64 / (per_axis - 1) as f64
                })
                .collect();
            let f = ridge(g, c, gamma, &point);
            if f < best.0 {
                best = (f, point);
            }
        }
        center = best.1;
        radius /= 2.0;
    }
    center
}

fn c5_d_update() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let mut worst_grad: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for case in 0..100 {
        let r = rng.random_range(1..=3);
        let m = rng.random_range(r + 1..=10);
        let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..r).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let g = Matrix::from_rows(&rows).unwrap();
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gamma = 10f64.powf(rng.random_range(-1.0..2.0));
        let d = solve_d(&g, &c, gamma).map_err(|e| e.to_string())?;
        let best = ridge(&g, &c, gamma, &d);
        for _ in 0..1000 {
            let scale = 10f64.powi(rng.random_range(-6..=1));
            let probe: Vec<f64> = d.iter().map(|v| v + scale * rng.random_range(-1.0..1.0)).collect();
            let f = ridge(&g, &c, gamma, &probe);
            check(f >= best - 1e-12 * (1.0 + best), || format!("case {case}: probe beats solve_d"))?;
        }
        // ∇ = 2Gᵀ(Gd − c) + 2d/γ, scaled by 1 + ‖G‖_F‖c‖
        let mut grad: Vec<f64> = d.iter().map(|v| 2.0 * v / gamma).collect();
        for t in 0..m {
            let resid: f64 = (0..r).map(|k| g[(t, k)] * d[k]).sum::<f64>() - c[t];
            for k in 0..r {
                grad[k] += 2.0 * g[(t, k)] * resid;
            }
        }
        let scaled = norm(&grad) / (1.0 + norm(g.as_slice()) * norm(&c));
        worst_grad = worst_grad.max(scaled);
        if case < 20 {
            let o = grid_oracle(&g, &c, gamma);
            let gap = d.iter().zip(&o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst_oracle = worst_oracle.max(gap);
        }
    }
    check(worst_grad <= D_GRADIENT_TOL, || format!("scaled gradient {worst_grad:e}"))?;
    check(worst_oracle <= D_ORACLE_TOL, || format!("grid oracle gap {worst_oracle:e}"))?;
    Ok(format!(
        "100 cases beat 1000 probes, max scaled gradient {worst_grad:.2e}, grid oracle gap {worst_oracle:.2e} on 20"
    ))
}

fn c6_descent() -> Outcome {
    let mut successes = 0;
    for seed in 0..50 {
        let (inst, x, d_true) = gen_uncertain_planted::<f64>(12, 10, 2, 1, 1e8, false, seed).unwrap();
        let trace = recover(&inst, &RecoverOptions::new(Backend::default(), DESCENT_EPS)).map_err(|e| e.to_string())?;
        for w in trace.iterations.windows(2) {
            check(w[1].objective <= w[0].objective, || format!("seed {seed}: objective increased"))?;
        }
        let last = trace.last();
        let d_err = norm(&last.d.iter().zip(&d_true).map(|(a, b)| a - b).collect::<Vec<_>>());
        if trace.terminated_by == Termination::Epsilon
            && trace.iterations.len() <= DESCENT_MAX_ITERS
            && last.x.support() == x.support()
            && d_err <= DESCENT_D_TOL
        {
            successes += 1;
        }
    }
    let rate = successes as f64 / 50.0;
    check(rate >= DESCENT_MIN_RATE, || format!("success rate {rate}"))?;
    Ok(format!("all traces monotone, {successes}/50 converged by epsilon with exact support and d"))
}

fn spins(n: usize, bits: u32) -> Vec<i8> {
    (0..n).map(|i| if (bits >> i) & 1 == 1 { 1 } else { -1 }).collect()
}

fn c7_hardware() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    for k in 0..50 {
        let n = rng.random_range(1..=10);
        let scale = rng.random_range(0.1..20.0);
        let field: Vec<f64> = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
        let mut coupling = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                coupling.push(((i, j), rng.random_range(-scale..scale)));
            }
        }
        let m = IsingModel::new(field, coupling, 0.0).unwrap();
        let (nm, _) = normalize(&m);
        check(
            nm.field().iter().all(|h| h.abs() <= 2.0) && nm.coupling().values().all(|j| j.abs() <= 1.0),
            || format!("model {k}: normalized coefficients out of range"),
        )?;
        let (a, b) = (solve_exhaustive(&m, 25).unwrap(), solve_exhaustive(&nm, 25).unwrap());
        check(a.minimizers == b.minimizers, || format!("model {k}: argmin changed"))?;
        for bits in 2..=8u32 {
            let q = quantize(&nm, bits).map_err(|e| e.to_string())?;
            let levels = ((1u32 << (bits - 1)) - 1) as f64;
            let on = |v: f64, step: f64| ((v / step) - (v / step).round()).abs() <= 1e-9;
            check(
                q.field().iter().all(|&h| on(h, 2.0 / levels)) && q.coupling().values().all(|&j| on(j, 1.0 / levels)),
                || format!("model {k}: off-grid value at {bits} bits"),
            )?;
            check(quantize(&q, bits).unwrap() == q, || format!("model {k}: quantize not idempotent"))?;
        }
    }

    let g = chimera(1, 1, 4);
    let emb = cell_clique_embedding(4, &g).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let logical = random_ising(&mut rng, 4);
        let phys = embed(&logical, &g, &emb, ChainStrength::Auto).map_err(|e| e.to_string())?;
        for bits in 0..16 {
            let s = spins(4, bits);
            let mut p = vec![-1i8; 8];
            for (chain, &v) in emb.chains.iter().zip(&s) {
                chain.iter().for_each(|&node| p[node] = v);
            }
            let gap = (logical.energy(&s).unwrap() + logical.offset() - phys.energy(&p).unwrap() - phys.offset()).abs();
            worst = worst.max(gap);
        }
        let pr = solve_exhaustive(&phys, 25).unwrap();
        let lr = solve_exhaustive(&logical, 25).unwrap();
        let (z, broken) = unembed(&pr.best_state, &emb).unwrap();
        check(broken == 0 && lr.minimizers.contains(&z), || format!("K4 model {k}: ground state lost"))?;
    }
    check(worst <= EMBED_TOL, || format!("embedding energy gap {worst:e}"))?;
    Ok(format!(
        "normalize/quantize on 50 models, K4 round trip gap {worst:.1e}, 20/20 ground states preserved"
    ))
}

fn c8_diagnostics() -> Outcome {
    let eye = Matrix::<f64>::identity(4);
    check(mutual_coherence(&eye).unwrap() == 0.0, || "mu(I) != 0".into())?;
    let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let mu = mutual_coherence(&a).unwrap();
    check((mu - 0.5f64.sqrt()).abs() <= MU_TOL, || format!("mu = {mu}"))?;
    let h = 0.5f64.sqrt();
    let unit = Matrix::from_rows(&[vec![1.0, h, 0.6], vec![0.0, h, 0.8]]).unwrap();
    let d1 = rip_constant(&unit, 1, 1_000_000).unwrap();
    check(d1.abs() <= 1e-15, || format!("delta_1 = {d1}"))?;
    let worked = Matrix::from_rows(&[vec![1.0, h], vec![0.0, h]]).unwrap();
    let d2 = rip_constant(&worked, 2, 1_000_000).unwrap();
    check((d2 - h).abs() <= DELTA2_TOL, || format!("delta_2 = {d2}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut unique = 0;
    for k in 0..100u64 {
        let n = rng.random_range(2..=12);
        let m = rng.random_range(1..=n);
        let s = rng.random_range(0..=n.min(3));
        let (inst, _) = gen_planted::<f64>(m, n, s, Distribution::Bernoulli, 5000 + k).unwrap();
        let u = verify_uniqueness(&inst, 20).unwrap();
        let r = solve_exhaustive(&build_qubo(&inst), 25).unwrap();
        let a: Vec<Vec<u8>> = u.minimizers.iter().map(|x| x.values().to_vec()).collect();
        let b: Vec<Vec<u8>> = r.minimizers.iter().map(|z| z.iter().map(|&v| v as u8).collect()).collect();
        check(a == b, || format!("instance {k}: minimizer sets differ"))?;
        unique += usize::from(u.unique);
    }
    Ok(format!("worked values exact, uniqueness agrees on 100 instances ({unique} unique)"))
}

fn c9_bench() -> Outcome {
    let grid = BenchGrid {
        n: 16,
        m_values: vec![4, 6, 8, 10, 12],
        s_values: vec![2],
        trials: 20,
        backend: BackendArgs::exhaustive(),
        dist: Distribution::Gaussian,
        lambda: None,
        uniqueness_cap: 20,
        seed: 2024,
    };
    let cells = run_cells(&grid).map_err(|e| e.to_string())?;
    let rate = |m: usize| cells.iter().find(|c| c.m == m).unwrap().exact_rate;
    let (lo, hi) = (rate(4), rate(12));
    check(hi >= lo, || format!("rate(m=12) = {hi} < rate(m=4) = {lo}"))?;
    let first = run_bench(&grid).map_err(|e| e.to_string())?;
    let second = run_bench(&grid).map_err(|e| e.to_string())?;
    check(first == second, || "repeated runs differ".into())?;
    let rates: Vec<String> = cells.iter().map(|c| format!("m={}:{:.2}", c.m, c.exact_rate)).collect();
    Ok(format!("exact rates {}; repeated CSV byte-identical", rates.join(" ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("QUBO identity", c1_qubo_identity),
        ("Ising identity", c2_ising_identity),
        ("oracle recovery", c3_oracle_recovery),
        ("SA surrogate quality", c4_sa_quality),
        ("d-update correctness", c5_d_update),
        ("alternating descent", c6_descent),
        ("hardware model", c7_hardware),
        ("diagnostics", c8_diagnostics),
        ("benchmark sanity", c9_bench),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
