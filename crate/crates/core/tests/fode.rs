use std::sync::Arc;

use fracwave::fode::{
    closed_form_a1, closed_form_a2, closed_form_a3_rotation, contraction_certificate, residual_check, residual_profile,
    solve_linear_implicit, solve_picard, solve_predictor_corrector, solve_predictor_corrector_with, BoxDomain, CorrectorOptions,
    LinearBlockSystem, MultiOrderProblem, Rhs, SolutionTrajectory, SolveError,
};
use fracwave::fraccalc::{gamma_fn, rl_integral_values, FracOrder, MLParams, MittagLeffler, TimeGrid};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn orders(a: &[f64]) -> Vec<FracOrder> {
    a.iter().map(|&v| FracOrder::new(v).unwrap()).collect()
}

fn linear(a: [[f64; 2]; 2], alpha: (f64, f64), xi: [f64; 2]) -> MultiOrderProblem {
    let m = DMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
    LinearBlockSystem::new(m, orders(&[alpha.0, alpha.1]))
        .unwrap()
        .into_problem(xi.to_vec(), 1.0)
        .unwrap()
}

fn max_err(a: &SolutionTrajectory, b: &SolutionTrajectory) -> f64 {
    a.max_difference(b)
}

fn end_err(a: &SolutionTrajectory, b: &SolutionTrajectory) -> f64 {
    let (x, y) = (a.states.last().unwrap(), b.states.last().unwrap());
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

#[test]
fn picard_scalar_relaxation() {
    let p = LinearBlockSystem::new(DMatrix::from_element(1, 1, -1.0), orders(&[0.6]))
        .unwrap()
        .into_problem(vec![1.0], 1.0)
        .unwrap();
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let traj = solve_picard(&p, &grid, 1e-12, 200).unwrap();
    let e = MittagLeffler::new(MLParams::new(0.6, 1.0)).unwrap();
    let err = grid
        .nodes()
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| (s[0] - e.eval(-t.powf(0.6)).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn picard_matches_diagonal_closed_form() {
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (0.4, 0.8), [1.0, 1.0]);
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let traj = solve_picard(&p, &grid, 1e-12, 200).unwrap();
    let exact = closed_form_a1(-1.0, -2.0, (0.4, 0.8), [1.0, 1.0], &grid).unwrap();
    // The sup error sits at the first node, where the t^{0.4} onset is
    // interpolated linearly; away from the origin the fit is much tighter.
    assert!(max_err(&traj, &exact) <= 7e-4, "{}", max_err(&traj, &exact));
    assert!(end_err(&traj, &exact) <= 1e-5, "{}", end_err(&traj, &exact));
    let cert = traj.meta.certificate.clone().expect("certificate attached");
    assert!(cert.bound < 1.0 && cert.m_star >= 1);
    // increments shrink after the first iteration
    let inc = &traj.meta.increments;
    assert!(inc.windows(2).skip(1).all(|w| w[1] <= w[0]), "{inc:?}");
}

#[test]
fn picard_zero_field_is_immediate() {
    let rhs: Rhs = Arc::new(|_, _, out| out.fill(0.0));
    let p = MultiOrderProblem::new(orders(&[0.3, 0.9]), vec![2.0, -3.0], rhs, 0.0, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 64).unwrap();
    let traj = solve_picard(&p, &grid, 1e-12, 10).unwrap();
    assert_eq!(traj.meta.iterations, 1);
    assert!(traj.states.iter().all(|s| s == &[2.0, -3.0]));
    assert_eq!(residual_check(&traj, &p).unwrap(), 0.0);
}

#[test]
fn picard_reports_non_convergence() {
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (0.4, 0.8), [1.0, 1.0]);
    let grid = TimeGrid::new(1.0, 64).unwrap();
    match solve_picard(&p, &grid, 1e-14, 3) {
        Err(SolveError::NonConvergence { iterations, last_increment }) => {
            assert_eq!(iterations, 3);
            assert!(last_increment > 1e-14);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn evaluation_errors_name_the_step() {
    let rhs: Rhs = Arc::new(|t, x, out| out[0] = if t > 0.5 { f64::NAN } else { -x[0] });
    let p = MultiOrderProblem::new(orders(&[0.5]), vec![1.0], rhs, 1.0, 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 10).unwrap();
    match solve_predictor_corrector(&p, &grid) {
        Err(SolveError::Evaluation { step, component }) => assert_eq!((step, component), (6, 0)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cross_solver_rotation() {
    let p = linear([[0.0, 1.0], [-1.0, 0.0]], (0.4, 0.9), [1.0, 0.5]);
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let a = solve_picard(&p, &grid, 1e-12, 200).unwrap();
    let b = solve_predictor_corrector(&p, &grid).unwrap();
    assert!(max_err(&a, &b) <= 1e-4, "{}", max_err(&a, &b));
}

#[test]
fn classical_limit_is_exponential() {
    let p = LinearBlockSystem::new(DMatrix::from_element(1, 1, -1.0), orders(&[1.0]))
        .unwrap()
        .into_problem(vec![1.0], 1.0)
        .unwrap();
    let grid = TimeGrid::new(1.0, 1000).unwrap();
    for traj in [solve_predictor_corrector(&p, &grid).unwrap(), solve_picard(&p, &grid, 1e-13, 200).unwrap()] {
        let err = grid
            .nodes()
            .iter()
            .zip(&traj.states)
            .map(|(t, s)| (s[0] - (-t).exp()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{}: {err}", traj.meta.method);
    }
}

#[test]
fn predictor_corrector_matches_diagonal_closed_form() {
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (0.4, 0.8), [1.0, 1.0]);
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let traj = solve_predictor_corrector(&p, &grid).unwrap();
    let exact = closed_form_a1(-1.0, -2.0, (0.4, 0.8), [1.0, 1.0], &grid).unwrap();
    assert!(max_err(&traj, &exact) <= 5e-4, "{}", max_err(&traj, &exact));
    assert!(end_err(&traj, &exact) <= 2e-6, "{}", end_err(&traj, &exact));
    let smooth = linear([[-1.0, 0.0], [0.0, -2.0]], (0.8, 0.9), [1.0, 1.0]);
    let exact = closed_form_a1(-1.0, -2.0, (0.8, 0.9), [1.0, 1.0], &grid).unwrap();
    let traj = solve_predictor_corrector(&smooth, &grid).unwrap();
    assert!(max_err(&traj, &exact) <= 1e-6, "{}", max_err(&traj, &exact));
}

#[test]
fn closed_form_trivial_cases() {
    let grid = TimeGrid::new(1.0, 16).unwrap();
    let a1 = closed_form_a1(0.0, 0.0, (0.3, 0.7), [1.5, -2.0], &grid).unwrap();
    assert!(a1.states.iter().all(|s| s == &[1.5, -2.0]));
    let a1 = closed_form_a1(-1.0, 0.5, (1.0, 1.0), [1.0, 2.0], &grid).unwrap();
    for (t, s) in grid.nodes().iter().zip(&a1.states) {
        assert!((s[0] - (-t).exp()).abs() < 1e-14);
        assert!((s[1] - 2.0 * (0.5 * t).exp()).abs() < 1e-13);
    }
    let a2 = closed_form_a2(0.0, (1.0, 1.0), [1.0, 2.0], &grid).unwrap();
    for (t, s) in grid.nodes().iter().zip(&a2.states) {
        assert!((s[0] - (1.0 + 2.0 * t)).abs() < 1e-10, "{} vs {}", s[0], 1.0 + 2.0 * t);
        assert_eq!(s[1], 2.0);
    }
    let a2 = closed_form_a2(-1.0, (0.5, 0.7), [1.0, 0.0], &grid).unwrap();
    let scalar = closed_form_a1(-1.0, -1.0, (0.5, 0.7), [1.0, 0.0], &grid).unwrap();
    assert_eq!(a2.states, scalar.states);
    let a3 = closed_form_a3_rotation(0.0, (0.3, 0.5), [1.0, 2.0], &grid).unwrap();
    assert!(a3.states.iter().all(|s| s == &[1.0, 2.0]));
    let a3 = closed_form_a3_rotation(1.0, (0.3, 0.5), [0.0, 0.0], &grid).unwrap();
    assert!(a3.states.iter().all(|s| s == &[0.0, 0.0]));
    assert!(matches!(
        closed_form_a3_rotation(1.0, (0.6, 0.5), [1.0, 0.0], &grid),
        Err(SolveError::Unsupported(_))
    ));
}

/// Σ_k λ^k t^{α₁+α₂k} E_{α₁, α₁+α₂k+1}(λ t^{α₁}): the Jordan coupling term
/// expanded termwise.
fn jordan_coupling(lambda: f64, a1: f64, a2: f64, t: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..60 {
        let e = MittagLeffler::new(MLParams::new(a1, a1 + a2 * k as f64 + 1.0)).unwrap();
        let term = lambda.powi(k) * t.powf(a1 + a2 * k as f64) * e.eval(lambda * t.powf(a1)).unwrap();
        total += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    total
}

#[test]
fn jordan_closed_form_matches_series_oracle() {
    let grid = TimeGrid::new(1.0, 8).unwrap();
    for &(a1, a2) in &[(0.5, 0.5), (0.3, 0.8), (0.9, 0.4)] {
        let cf = closed_form_a2(-1.0, (a1, a2), [0.0, 1.0], &grid).unwrap();
        for (t, s) in grid.nodes().iter().zip(&cf.states).skip(1) {
            let oracle = jordan_coupling(-1.0, a1, a2, *t);
            assert!((s[0] - oracle).abs() < 1e-9, "({a1},{a2}) t={t}: {} vs {oracle}", s[0]);
        }
    }
}

#[test]
fn jordan_closed_form_matches_solver() {
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let cf = closed_form_a2(-1.0, (0.5, 0.5), [0.0, 1.0], &grid).unwrap();
    let p = linear([[-1.0, 1.0], [0.0, -1.0]], (0.5, 0.5), [0.0, 1.0]);
    let pc = solve_predictor_corrector(&p, &grid).unwrap();
    assert!(max_err(&cf, &pc) <= 1e-3, "{}", max_err(&cf, &pc));
}

/// Rotation system solved by differentiating once more: each component obeys
/// a single-order equation of order α₁+α₂ with a forcing fixed by the
/// initial data.
fn rotation_oracle(mu: f64, a1: f64, a2: f64, xi: [f64; 2], t: f64) -> [f64; 2] {
    let beta = a1 + a2;
    let lead = MittagLeffler::new(MLParams::new(beta, 1.0)).unwrap();
    let e1 = MittagLeffler::new(MLParams::new(beta, 1.0 + a1)).unwrap();
    let e2 = MittagLeffler::new(MLParams::new(beta, 1.0 + a2)).unwrap();
    let z = -mu * mu * t.powf(beta);
    let l = lead.eval(z).unwrap();
    [
        l * xi[0] + mu * xi[1] * t.powf(a1) * e1.eval(z).unwrap(),
        l * xi[1] - mu * xi[0] * t.powf(a2) * e2.eval(z).unwrap(),
    ]
}

#[test]
fn rotation_closed_form_matches_series_oracle() {
    let grid = TimeGrid::new(1.0, 8).unwrap();
    for &(a1, a2, xi) in &[(0.3, 0.5, [1.0, 0.0]), (0.4, 0.4, [0.5, -1.0]), (0.2, 0.7, [0.0, 1.0])] {
        let cf = closed_form_a3_rotation(1.3, (a1, a2), xi, &grid).unwrap();
        for (t, s) in grid.nodes().iter().zip(&cf.states) {
            let o = rotation_oracle(1.3, a1, a2, xi, *t);
            assert!((s[0] - o[0]).abs() < 1e-9 && (s[1] - o[1]).abs() < 1e-9, "t={t}: {s:?} vs {o:?}");
        }
    }
}

#[test]
fn rotation_closed_form_matches_solver_and_integral_equation() {
    let (a1, a2) = (0.3, 0.5);
    let grid = TimeGrid::new(1.0, 1024).unwrap();
    let cf = closed_form_a3_rotation(1.0, (a1, a2), [1.0, 0.0], &grid).unwrap();
    let p = linear([[0.0, 1.0], [-1.0, 0.0]], (a1, a2), [1.0, 0.0]);
    let pc = solve_predictor_corrector(&p, &grid).unwrap();
    assert!(max_err(&cf, &pc) <= 2e-3, "{}", max_err(&cf, &pc));

    // φ = E-free form: φ₁ = ξ₁ + μ ξ₂ t^{α₁}/Γ(1+α₁) - μ² J^{β} φ₁,
    //                  φ₂ = ξ₂ - μ ξ₁ t^{α₂}/Γ(1+α₂) - μ² J^{β} φ₂.
    let beta = a1 + a2;
    let order = FracOrder::new(beta).unwrap();
    let h = grid.step();
    let c1: Vec<f64> = cf.component(0);
    let c2: Vec<f64> = cf.component(1);
    let j1 = rl_integral_values(&c1, h, order);
    let j2 = rl_integral_values(&c2, h, order);
    let (g1, g2) = (gamma_fn(1.0 + a1).unwrap(), gamma_fn(1.0 + a2).unwrap());
    let mut worst = 0.0_f64;
    for (k, t) in grid.nodes().iter().enumerate() {
        let r1 = c1[k] - (1.0 + 0.0 * t.powf(a1) / g1 - j1[k]);
        let r2 = c2[k] - (0.0 - t.powf(a2) / g2 - j2[k]);
        worst = worst.max(r1.abs()).max(r2.abs());
    }
    assert!(worst <= 5e-3, "{worst}");
}

#[test]
fn certificate_examples() {
    let unit = LinearBlockSystem::new(DMatrix::from_element(1, 1, 1.0), orders(&[1.0]))
        .unwrap()
        .into_problem(vec![1.0], 1.0)
        .unwrap();
    let grid = TimeGrid::new(1.0, 8).unwrap();
    let c = contraction_certificate(&unit, &grid).unwrap();
    assert_eq!(c.t_m, 2.0);
    assert_eq!(c.m_star, 4);
    for (m, b) in c.sequence.iter().enumerate() {
        let m = m as i32 + 1;
        let exact = 2f64.powi(m) / (1..=m).product::<i32>() as f64;
        assert!((b - exact).abs() < 1e-13 * exact);
    }

    let rhs: Rhs = Arc::new(|_, _, out| out.fill(0.0));
    let zero = MultiOrderProblem::new(orders(&[0.5]), vec![0.0], rhs, 0.0, 1.0).unwrap();
    let c = contraction_certificate(&zero, &grid).unwrap();
    assert_eq!((c.m_star, c.bound), (1, 0.0));

    // (2·4·1)^m / Γ(m/2 + 1), with Γ at half-integers in closed form
    let rhs: Rhs = Arc::new(|_, x, out| out.copy_from_slice(x));
    let half = MultiOrderProblem::new(orders(&[0.5, 0.5]), vec![1.0, 1.0], rhs, 2.0, 1.0).unwrap();
    let c = contraction_certificate(&half, &grid).unwrap();
    let gamma_half = |m: u32| -> f64 {
        // Γ(m/2 + 1)
        if m % 2 == 0 {
            (1..=m / 2).map(f64::from).product()
        } else {
            let mut g = std::f64::consts::PI.sqrt() / 2.0;
            let mut x = 1.5;
            while x < m as f64 / 2.0 + 1.0 - 1e-9 {
                g *= x;
                x += 1.0;
            }
            g
        }
    };
    let scan = (1u32..).find(|&m| 8f64.powi(m as i32) / gamma_half(m) < 1.0).unwrap();
    assert_eq!(c.m_star, scan as usize);
    assert!((c.bound - 8f64.powi(scan as i32) / gamma_half(scan)).abs() < 1e-12);
    // the sequence eventually decreases
    let s = &c.sequence;
    assert!(s[s.len() - 1] < s[s.len() - 2]);
}

#[test]
fn certificate_overflow_is_reported() {
    let rhs: Rhs = Arc::new(|_, x, out| out.copy_from_slice(x));
    let p = MultiOrderProblem::new(orders(&[0.05]), vec![1.0], rhs, 1e6, 1e6).unwrap();
    let grid = TimeGrid::new(1e6, 8).unwrap();
    assert!(matches!(contraction_certificate(&p, &grid), Err(SolveError::CertificateOverflow { .. })));
}

#[test]
fn residual_detects_perturbation() {
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (0.4, 0.8), [1.0, 1.0]);
    let grid = TimeGrid::new(1.0, 256).unwrap();
    let traj = solve_picard(&p, &grid, 1e-10, 200).unwrap();
    let r = residual_check(&traj, &p).unwrap();
    assert!(r <= 1e-8, "{r}");
    let mut bad = traj.clone();
    bad.states[100][1] += 0.1;
    assert!(residual_check(&bad, &p).unwrap() >= 0.09);
    let profile = residual_profile(&traj, &p).unwrap();
    assert_eq!(profile.len(), grid.len());
    assert_eq!(profile[0], 0.0);
}

#[test]
fn initial_state_is_exact() {
    let xi = [0.1 + 0.2, std::f64::consts::E];
    let p = linear([[-0.3, 0.7], [0.2, -1.1]], (0.35, 0.65), xi);
    let grid = TimeGrid::new(1.0, 32).unwrap();
    for traj in [solve_picard(&p, &grid, 1e-12, 200).unwrap(), solve_predictor_corrector(&p, &grid).unwrap()] {
        assert_eq!(traj.states[0], xi.to_vec());
    }
}

fn fitted_order(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn predictor_corrector_convergence_order() {
    let (a1, a2) = (0.4, 0.8);
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (a1, a2), [1.0, 1.0]);
    let (sup, end): (Vec<f64>, Vec<f64>) = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let grid = TimeGrid::new(1.0, n).unwrap();
            let exact = closed_form_a1(-1.0, -2.0, (a1, a2), [1.0, 1.0], &grid).unwrap();
            let traj = solve_predictor_corrector(&p, &grid).unwrap();
            (max_err(&traj, &exact), end_err(&traj, &exact))
        })
        .unzip();
    let rates = fitted_order(&end);
    assert!(rates.iter().all(|&r| r >= 1.0 + a1 - 0.25), "{end:?} {rates:?}");
    // the sup norm is limited by the first step
    let rates = fitted_order(&sup);
    assert!(rates.iter().all(|&r| r > 0.3 && r < 1.0), "{sup:?} {rates:?}");

    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (1.0, 1.0), [1.0, 1.0]);
    let errors: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let grid = TimeGrid::new(1.0, n).unwrap();
            let exact = closed_form_a1(-1.0, -2.0, (1.0, 1.0), [1.0, 1.0], &grid).unwrap();
            max_err(&solve_predictor_corrector(&p, &grid).unwrap(), &exact)
        })
        .collect();
    let rates = fitted_order(&errors);
    assert!(rates.iter().all(|&r| (r - 2.0).abs() <= 0.3), "{errors:?} {rates:?}");
}

#[test]
fn converged_corrector_is_implicit_trapezoid() {
    // x' = -x: implicit trapezoid gives ((1 - h/2)/(1 + h/2))^k exactly
    let p = LinearBlockSystem::new(DMatrix::from_element(1, 1, -1.0), orders(&[1.0]))
        .unwrap()
        .into_problem(vec![1.0], 1.0)
        .unwrap();
    let grid = TimeGrid::new(1.0, 20).unwrap();
    let traj = solve_predictor_corrector_with(&p, &grid, CorrectorOptions::converged()).unwrap();
    let h = grid.step();
    let r = (1.0 - h / 2.0) / (1.0 + h / 2.0);
    for (k, s) in traj.states.iter().enumerate() {
        assert!((s[0] - r.powi(k as i32)).abs() < 1e-14);
    }
}

#[test]
fn domain_exit_is_flagged() {
    let p = LinearBlockSystem::new(DMatrix::from_element(1, 1, -1.0), orders(&[0.7]))
        .unwrap()
        .into_problem(vec![1.0], 1.0)
        .unwrap()
        .with_domain(BoxDomain {
            lower: vec![0.5],
            upper: vec![2.0],
        })
        .unwrap();
    let grid = TimeGrid::new(1.0, 64).unwrap();
    let traj = solve_predictor_corrector(&p, &grid).unwrap();
    let exit = traj.meta.domain_exit.expect("trajectory leaves the box");
    assert!(traj.states[exit][0] <= 0.5);
    assert!(traj.states[..exit].iter().all(|s| s[0] > 0.5));
}

#[test]
fn trajectory_csv_layout() {
    let p = linear([[-1.0, 0.0], [0.0, -2.0]], (0.4, 0.8), [1.0, 1.0]);
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let traj = solve_predictor_corrector(&p, &grid).unwrap();
    let res = residual_profile(&traj, &p).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf, &res).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,x1,x2,cd1,cd2,residual");
    assert_eq!(lines.count(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn permutation_commutes_with_solvers(
        a in prop::collection::vec(-1.5f64..1.5, 9),
        al in prop::collection::vec(0.2f64..1.0, 3),
        xi in prop::collection::vec(-2.0f64..2.0, 3),
        perm_idx in 0usize..6,
    ) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = perms[perm_idx];
        let m = DMatrix::from_row_slice(3, 3, &a);
        let p = LinearBlockSystem::new(m, orders(&al)).unwrap().into_problem(xi.clone(), 1.0).unwrap();
        let q = p.permuted(&perm).unwrap();
        let grid = TimeGrid::new(1.0, 32).unwrap();
        let check = |x: &SolutionTrajectory, y: &SolutionTrajectory| {
            for (sx, sy) in x.states.iter().zip(&y.states) {
                for (i, &pi) in perm.iter().enumerate() {
                    assert_eq!(sy[i].to_bits(), sx[pi].to_bits());
                }
            }
        };
        check(&solve_predictor_corrector(&p, &grid).unwrap(), &solve_predictor_corrector(&q, &grid).unwrap());
        check(&solve_picard(&p, &grid, 1e-10, 400).unwrap(), &solve_picard(&q, &grid, 1e-10, 400).unwrap());
    }
}

#[test]
fn linear_implicit_is_the_picard_fixed_point() {
    let m = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, -0.3, -2.0]);
    let sys = LinearBlockSystem::new(m, orders(&[0.45, 1.0])).unwrap();
    let p = sys.clone().into_problem(vec![1.0, -1.0], 1.0).unwrap();
    let grid = TimeGrid::new(1.0, 200).unwrap();
    let direct = solve_linear_implicit(&sys, &[1.0, -1.0], &grid).unwrap();
    let picard = solve_picard(&p, &grid, 1e-14, 300).unwrap();
    let corrected = solve_predictor_corrector_with(&p, &grid, CorrectorOptions::converged()).unwrap();
    assert!(max_err(&direct, &picard) < 1e-13, "{}", max_err(&direct, &picard));
    assert!(max_err(&direct, &corrected) < 1e-13, "{}", max_err(&direct, &corrected));
    assert!(residual_check(&direct, &p).unwrap() < 1e-13);
}

#[test]
fn linear_implicit_handles_stiff_blocks() {
    // step weight times the norm is far above one: fixed-point iteration
    // would diverge, the direct solve does not
    let sys = LinearBlockSystem::new(DMatrix::from_element(1, 1, -400.0), orders(&[0.3])).unwrap();
    let grid = TimeGrid::new(1.0, 256).unwrap();
    let traj = solve_linear_implicit(&sys, &[1.0], &grid).unwrap();
    let e = MittagLeffler::new(MLParams::new(0.3, 1.0)).unwrap();
    let exact = e.eval(-400.0).unwrap();
    assert!((traj.states[256][0] - exact).abs() < 1e-3, "{} vs {exact}", traj.states[256][0]);
}
