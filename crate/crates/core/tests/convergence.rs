use polyjac_core::discretize::{assemble, perturbed_start, ProblemKind, ProblemSpec};
use polyjac_core::solvers::{newton_solve, Method, SolverConfig};

fn solve_error(kind: ProblemKind, n: usize) -> f64 {
    let (sys, exact) = assemble(&ProblemSpec::new(kind, n)).unwrap();
    let cfg = SolverConfig::new(Method::Newton, perturbed_start(&exact));
    let (root, _) = newton_solve(&sys, &cfg).unwrap();
    root.sub(&exact).unwrap().norm_inf()
}

#[test]
fn manufactured_error_is_second_order() {
    let ns = [8usize, 16, 32, 64];
    for kind in [ProblemKind::BurgersSteady, ProblemKind::DuffingCubic] {
        let errs: Vec<f64> = ns.iter().map(|&n| solve_error(kind, n)).collect();
        let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / (n as f64 + 1.0)).collect();
        // least-squares slope of log(err) against log(h)
        let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = lx.iter().sum::<f64>() / 4.0;
        let my = ly.iter().sum::<f64>() / 4.0;
        let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = cov / var;
        assert!((slope - 2.0).abs() <= 0.3, "{kind}: slope {slope}, errors {errs:?}");
    }
}

#[test]
fn newton_from_perturbed_start_is_fast() {
    for kind in ProblemKind::ALL {
        for n in [8, 16, 32] {
            let (sys, exact) = assemble(&ProblemSpec::new(kind, n)).unwrap();
            let cfg = SolverConfig::new(Method::Newton, perturbed_start(&exact));
            let (root, rep) = newton_solve(&sys, &cfg).unwrap();
            assert!(rep.iterations <= 10, "{kind} n={n}: {} iterations", rep.iterations);
            assert!(sys.residual(&root).unwrap().norm_inf() <= 1e-10);
        }
    }
}

#[test]
fn fractional_stays_admissible_along_newton_path() {
    let (sys, exact) = assemble(&ProblemSpec::new(ProblemKind::FractionalSqrt, 16)).unwrap();
    let cfg = SolverConfig::new(Method::Newton, perturbed_start(&exact));
    let (_, rep) = newton_solve(&sys, &cfg).unwrap();
    let polyjac_core::TermForm::PointwiseProduct { a_r, .. } = sys.terms()[0].form() else {
        panic!("expected a pointwise product term");
    };
    for c in &rep.iterates {
        assert!(a_r.mul_vec(c).unwrap().iter().all(|&x| x > 0.0));
    }
}
