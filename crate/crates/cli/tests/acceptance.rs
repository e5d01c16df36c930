//! Acceptance report: one PASS/FAIL line per criterion. Red criteria are
//! reported, never asserted, so the suite stays green while the report
//! stays honest. Run with `--nocapture` to see the lines.

use std::f64::consts::{E, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;

use fracwave::fode::{
    closed_form_a1, closed_form_a2, closed_form_a3_rotation, contraction_certificate, solve_picard,
    solve_predictor_corrector, LinearBlockSystem, MultiOrderProblem, SolutionTrajectory,
};
use fracwave::fraccalc::{
    caputo_square_inequality, check_identity_suite_with_derivative, gamma_fn, mittag_leffler, rl_integral_values,
    FracOrder, MLParams, TimeGrid,
};
use fracwave::galerkin::{
    check_order_equivalence, continuous_dependence_experiment, energy_estimate_2, solve_ibvp, BoundaryCoefficients,
    CoefficientField, GalerkinModel, IbvpSolver, InitialData, Perturbation,
};
use fracwave_cli::RunManifest;
use nalgebra::{DMatrix, DVector};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn order(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

fn linear(a: [f64; 4], alpha: (f64, f64), xi: [f64; 2], horizon: f64) -> MultiOrderProblem {
    LinearBlockSystem::new(DMatrix::from_row_slice(2, 2, &a), vec![order(alpha.0), order(alpha.1)])
        .unwrap()
        .into_problem(xi.to_vec(), horizon)
        .unwrap()
}

fn sup_diff(a: &SolutionTrajectory, b: &SolutionTrajectory, stride: usize) -> (f64, f64) {
    let mut sup = 0.0_f64;
    let mut end = 0.0_f64;
    for (k, x) in a.states.iter().enumerate() {
        let d = x.iter().zip(&b.states[k * stride]).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        sup = sup.max(d);
        end = d;
    }
    (sup, end)
}

fn model(m: usize, f: &str, g: &str, h: &str, data: &str) -> GalerkinModel {
    let c = |n: &str| CoefficientField::preset(n).unwrap();
    GalerkinModel::build(
        m,
        BoundaryCoefficients::new(c(f), c(g), c(h)).unwrap(),
        InitialData::preset(data).unwrap(),
    )
    .unwrap()
}

fn criterion_1() -> Verdict {
    let e1 = mittag_leffler(1.0, &MLParams::new(1.0, 1.0)).unwrap();
    let e2 = mittag_leffler(-(PI / 2.0).powi(2), &MLParams::new(2.0, 1.0)).unwrap();
    let rec = [0.1, 0.5, 1.5, 7.3, 20.0]
        .iter()
        .map(|&x| {
            let g1 = gamma_fn(x + 1.0).unwrap();
            (g1 - x * gamma_fn(x).unwrap()).abs() / g1
        })
        .fold(0.0, f64::max);
    let (d1, d2) = ((e1 - E).abs(), e2.abs());
    verdict(
        d1 <= 1e-12 && d2 <= 1e-10 && rec <= 1e-12,
        format!("|E1(1)-e| = {d1:.1e}, |E2(-(pi/2)^2)| = {d2:.1e}, recurrence {rec:.1e}"),
    )
}

fn criterion_2() -> Verdict {
    let grid = TimeGrid::new(1.0, 2048).unwrap();
    let f = grid.sample(f64::sin);
    let df = grid.sample(f64::cos);
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.3, 0.5, 0.7] {
        let r = check_identity_suite_with_derivative(&f, &df, order(a)).unwrap();
        let eq = r.max_equality_residual();
        let ineq = r.integral_comparison_margin.unwrap().min(r.square_bound_margin);
        pass &= eq <= 1e-5 && ineq >= -1e-12;
        parts.push(format!(
            "a={a}: inversion {:.1e} flux {:.1e} derivative {:.1e} margins {:.1e}",
            r.inversion_residual, r.flux_residual, r.derivative_residual, ineq
        ));
    }
    let j = rl_integral_values(&rl_integral_values(f.values(), grid.step(), order(0.3)), grid.step(), order(0.7));
    let j1 = rl_integral_values(f.values(), grid.step(), FracOrder::ONE);
    let semigroup = j.iter().zip(&j1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    pass &= semigroup <= 1e-5;
    parts.push(format!("semigroup {semigroup:.1e}"));
    verdict(pass, parts.join("; "))
}

fn criterion_3() -> Verdict {
    let grid = TimeGrid::new(1.0, 4096).unwrap();
    let min = |f: fn(f64) -> f64, a: f64| {
        let s = caputo_square_inequality(&grid.sample(f), order(a)).unwrap();
        s.values()[1..].iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let m = [min(|_| 2.0, 0.5), min(|t| t, 0.5), min(|t| (3.0 * t).cos(), 0.7)];
    let worst = m.iter().cloned().fold(f64::INFINITY, f64::min);
    verdict(worst >= -1e-4, format!("min node margins {:.1e}, {:.1e}, {:.1e}", m[0], m[1], m[2]))
}

fn criterion_4() -> Verdict {
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let p = linear([-1.0, 0.0, 0.0, -2.0], (0.4, 0.8), [1.0, 1.0], 1.0);
    let traj = solve_picard(&p, &grid, 1e-12, 500).unwrap();
    let exact = closed_form_a1(-1.0, -2.0, (0.4, 0.8), [1.0, 1.0], &grid).unwrap();
    let (sup, end) = sup_diff(&traj, &exact, 1);
    let cert = contraction_certificate(&p, &grid);
    let (cert_ok, cert_text) = match &cert {
        Ok(c) => {
            let s = &c.sequence;
            let peak = s.iter().enumerate().fold(0, |best, (i, v)| if *v > s[best] { i } else { best });
            let decreasing = s[peak..].windows(2).all(|w| w[1] < w[0]) && s.len() > peak + 1;
            (decreasing, format!("m* = {}, bound {:.2e}", c.m_star, c.bound))
        }
        Err(e) => (false, e.to_string()),
    };
    verdict(
        sup <= 1e-4 && cert_ok,
        format!("max error {sup:.2e} (end-time {end:.1e}); certificate {cert_text}"),
    )
}

fn criterion_5() -> Verdict {
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let jordan = closed_form_a2(-1.0, (0.5, 0.5), [0.0, 1.0], &grid).unwrap();
    let pc = solve_predictor_corrector(&linear([-1.0, 1.0, 0.0, -1.0], (0.5, 0.5), [0.0, 1.0], 1.0), &grid).unwrap();
    let (e_a2, _) = sup_diff(&pc, &jordan, 1);

    let (a1, a2, mu, xi) = (0.3, 0.5, 1.0, [1.0, 0.0]);
    let rot = closed_form_a3_rotation(mu, (a1, a2), xi, &grid).unwrap();
    let pc = solve_predictor_corrector(&linear([0.0, mu, -mu, 0.0], (a1, a2), xi, 1.0), &grid).unwrap();
    let (e_a3, _) = sup_diff(&pc, &rot, 1);

    let h = grid.step();
    let beta = order(a1 + a2);
    let (c1, c2) = (pc.component(0), pc.component(1));
    let (j1, j2) = (rl_integral_values(&c1, h, beta), rl_integral_values(&c2, h, beta));
    let (g1, g2) = (gamma_fn(1.0 + a1).unwrap(), gamma_fn(1.0 + a2).unwrap());
    let mut residual = 0.0_f64;
    for (k, t) in grid.nodes().iter().enumerate() {
        let r1 = c1[k] - (xi[0] + mu * xi[1] * t.powf(a1) / g1 - mu * mu * j1[k]);
        let r2 = c2[k] - (xi[1] - mu * xi[0] * t.powf(a2) / g2 - mu * mu * j2[k]);
        residual = residual.max(r1.abs()).max(r2.abs());
    }
    verdict(
        e_a2 <= 2e-3 && e_a3 <= 2e-3 && residual <= 5e-3,
        format!("PC vs Jordan {e_a2:.1e}, vs rotation {e_a3:.1e}; rotation integral-equation residual {residual:.1e}"),
    )
}

fn fitted(hs: &[f64], errs: &[f64]) -> f64 {
    let x: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_6() -> Verdict {
    let p = linear([-1.0, 0.0, 0.0, -2.0], (0.4, 0.8), [1.0, 1.0], 1.0);
    let ladder = [256, 512, 1024];
    let runs: Vec<SolutionTrajectory> = ladder
        .iter()
        .map(|&n| solve_predictor_corrector(&p, &TimeGrid::new(1.0, n).unwrap()).unwrap())
        .collect();
    let finest = runs.last().unwrap();
    let errs: Vec<(f64, f64)> = runs[..2].iter().zip(&ladder).map(|(r, n)| sup_diff(r, finest, 1024 / n)).collect();
    let hs: Vec<f64> = ladder[..2].iter().map(|&n| 1.0 / n as f64).collect();
    let sup_order = fitted(&hs, &errs.iter().map(|e| e.0).collect::<Vec<_>>());
    let end_order = fitted(&hs, &errs.iter().map(|e| e.1).collect::<Vec<_>>());
    let target = 1.0 + 0.4 - 0.25;

    let q = linear([-1.0, 0.0, 0.0, -2.0], (1.0, 1.0), [1.0, 1.0], 1.0);
    let classical: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = TimeGrid::new(1.0, n).unwrap();
            let exact = closed_form_a1(-1.0, -2.0, (1.0, 1.0), [1.0, 1.0], &g).unwrap();
            sup_diff(&solve_predictor_corrector(&q, &g).unwrap(), &exact, 1).0
        })
        .collect();
    let classical_order = fitted(&[1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0], &classical);
    verdict(
        sup_order >= target && (classical_order - 2.0).abs() <= 0.3,
        format!(
            "A1 self-convergence sup order {sup_order:.2} (needs >= {target:.2}; end-time order {end_order:.2}); order-one ladder {classical_order:.2}"
        ),
    )
}

/// Scaling and squaring with a Taylor polynomial.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|v| v.abs()).sum::<f64>();
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let b = a / 2f64.powi(s);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn criterion_7() -> Verdict {
    let grid = TimeGrid::new(1.0, 2000).unwrap();
    let md = model(4, "sine", "zero", "ramp", "two-mode");
    let drift = solve_ibvp(&md, FracOrder::ONE, &grid, IbvpSolver::Implicit)
        .unwrap()
        .report
        .relative_drift();
    let single = model(1, "unit", "zero", "unit", "velocity-mode");
    let sol = solve_ibvp(&single, FracOrder::ONE, &grid, IbvpSolver::Implicit).unwrap();
    let k = single.block_matrix();
    let x0 = DVector::from_vec(single.initial_state());
    let mut worst = 0.0_f64;
    for (n, t) in grid.nodes().iter().enumerate() {
        let exact = expm(&(&k * *t)) * &x0;
        for (a, b) in sol.trajectory.states[n].iter().zip(exact.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    verdict(
        drift <= 1e-3 && worst <= 1e-5,
        format!("energy drift {drift:.1e}; m=1 vs matrix exponential {worst:.1e}"),
    )
}

fn criterion_8() -> Verdict {
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for alpha in [0.3, 0.5, 0.7, 1.0] {
        for data in ["single-mode", "two-mode", "boundary-mix"] {
            let md = model(4, "sine", "unit", "ramp", data);
            let sol = solve_ibvp(&md, order(alpha), &grid, IbvpSolver::Implicit).unwrap();
            let min = sol.report.est1_margin.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < worst {
                worst = min;
                at = format!("alpha {alpha}, {data}");
            }
        }
    }
    verdict(worst >= -1e-3, format!("smallest margin {worst:.2e} ({at}) over 12 runs"))
}

fn criterion_9() -> Verdict {
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let mut pass = true;
    let (mut gap, mut margin) = (0.0_f64, f64::INFINITY);
    for data in ["single-mode", "two-mode", "boundary-mix"] {
        let md = model(4, "sine", "unit", "ramp", data);
        let sol = solve_ibvp(&md, order(0.5), &grid, IbvpSolver::Implicit).unwrap();
        let e2 = energy_estimate_2(&sol.report, &md);
        pass &= e2.initial_gap <= 1e-10 * e2.laplacian_sq.sqrt().max(1.0) && e2.min_margin >= 0.0;
        gap = gap.max(e2.initial_gap);
        margin = margin.min(e2.min_margin);
    }
    verdict(pass, format!("initial gap {gap:.1e}; smallest bound margin {margin:.2e}"))
}

fn criterion_10() -> Verdict {
    let md = model(2, "unit", "zero", "unit", "two-mode");
    let grid = TimeGrid::new(1.0, 2048).unwrap();
    let half = check_order_equivalence(&solve_ibvp(&md, order(0.5), &grid, IbvpSolver::Implicit).unwrap()).unwrap();
    let one = check_order_equivalence(&solve_ibvp(&md, FracOrder::ONE, &grid, IbvpSolver::Implicit).unwrap()).unwrap();
    verdict(
        half.residual <= 1e-3 && one.residual <= 1e-6,
        format!(
            "alpha 0.5 residual {:.2e} at node {} (over t >= T/10: {:.1e}); alpha 1 residual {:.1e}",
            half.residual, half.node, half.tail_residual, one.residual
        ),
    )
}

fn criterion_11() -> Verdict {
    let md = model(4, "sine", "unit", "ramp", "two-mode");
    let grid = TimeGrid::new(1.0, 512).unwrap();
    let pert = Perturbation {
        data: InitialData::preset("boundary-mix").unwrap(),
        ..Perturbation::default()
    };
    let rows = continuous_dependence_experiment(
        &md,
        &pert,
        &[0.0, 1.0, 0.5, 0.25, 0.125],
        order(0.5),
        &grid,
        IbvpSolver::Implicit,
    )
    .unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.d_total).collect();
    let monotone = d[1..].windows(2).all(|w| w[1] <= w[0]);
    let ratio = d[2] / d[1];
    verdict(
        d[0] == 0.0 && monotone && (0.4..=0.6).contains(&ratio),
        format!("D(0) = {:.1e}; D = {:.3e}, {:.3e}, {:.3e}, {:.3e}; D(1/2)/D(1) = {ratio:.4}", d[0], d[1], d[2], d[3], d[4]),
    )
}

fn criterion_12() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("repro.toml");
    std::fs::write(
        &cfg,
        "scenario = \"ibvp\"\noutput = \"out\"\nalpha = 0.5\n[grid]\nT = 1.0\nN = 256\n\
         [model]\nm = 4\nf = \"sine\"\ng = \"unit\"\nh = \"ramp\"\ndata = \"two-mode\"\n",
    )
    .unwrap();
    let dir = tmp.path().join("out");
    let run = |p: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_fracwave")).arg("run").arg(p).output().unwrap();
        (out.status.code(), RunManifest::read(&dir).unwrap())
    };
    let (c1, m1) = run(&cfg);
    let (c2, m2) = run(&cfg);
    let same = m1.artifact_digest == m2.artifact_digest && m1.without_timings() == m2.without_timings();
    verdict(
        same && c1 == c2,
        format!(
            "exit codes {c1:?}/{c2:?}; artifact digest {} ({} files) {}",
            &m1.artifact_digest[..12],
            m1.artifacts.len(),
            if same { "repeated" } else { "differs" }
        ),
    )
}

#[test]
fn acceptance_report() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("special functions", criterion_1),
        ("operator identities", criterion_2),
        ("fractional square inequality", criterion_3),
        ("Picard vs diagonal oracle", criterion_4),
        ("cross-solver and closed forms", criterion_5),
        ("convergence order", criterion_6),
        ("classical limit", criterion_7),
        ("energy estimate 1", criterion_8),
        ("energy estimate 2", criterion_9),
        ("order equivalence", criterion_10),
        ("continuous dependence", criterion_11),
        ("reproducibility", criterion_12),
    ];
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| verdict(false, "panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        passed += v.pass as usize;
        println!(
            "{} criterion {:>2} {name}: {} [{secs:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
}
