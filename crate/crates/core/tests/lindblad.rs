use faer::c64;
use proptest::prelude::*;

use tiltdiode::lindblad::decomposition::SectorDecomposition;
use tiltdiode::lindblad::*;
use tiltdiode::model::sectors::Parity;
use tiltdiode::model::SectorLabel;
use tiltdiode::noninteracting::{solve_chain, QuadraticChain};
use tiltdiode::{Error, ModelParams};

fn ness_obs(p: &ModelParams) -> NessObservables {
    observables(&ness(p, NessMethod::Auto).unwrap(), p).unwrap()
}

fn diode(n: usize) -> ModelParams {
    ModelParams::new(n).with_interaction(5.0)
}

fn decomposition(p: &ModelParams) -> (EigenbasisDecomposition, f64) {
    let rho = ness(p, NessMethod::Auto).unwrap();
    let bases = sector_eigenbases(p).unwrap();
    let d = eigenbasis_decomposition(&rho, &bases, p, 1).unwrap();
    (d, observables(&rho, p).unwrap().current)
}

fn half_even(d: &EigenbasisDecomposition) -> &SectorDecomposition {
    d.sectors.iter().find(|s| s.sector.label == SectorLabel::Half(Parity::Even)).unwrap()
}

#[test]
fn superoperator_spectrum() {
    let s = build_superoperator(&diode(4).with_tilt(1.0)).unwrap();
    assert_eq!(s.dim(), 256);
    assert!(s.trace_residual() < 1e-10);
    let ev = s.to_dense().unwrap().eigenvalues().unwrap();
    let zeros = ev.iter().filter(|z| z.norm() < 1e-9).count();
    assert_eq!(zeros, 1);
    let gap = ev.iter().filter(|z| z.norm() >= 1e-9).map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    assert!(gap < -1e-6, "slowest decay {gap}");
}

#[test]
fn zero_driving_is_maximally_mixed() {
    for p in [ModelParams::new(3).with_interaction(2.0).with_tilt(1.5), diode(4).with_tilt(0.7), ModelParams::new(5)] {
        let rho = ness(&p.with_driving(0.0), NessMethod::Auto).unwrap();
        let d = rho.dim();
        let m = rho.matrix();
        for j in 0..d {
            for i in 0..d {
                let target = if i == j { 1.0 / d as f64 } else { 0.0 };
                assert!((m[(i, j)] - c64::new(target, 0.0)).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn dense_and_sparse_paths_agree() {
    let p = diode(4).with_tilt(3.66);
    let a = ness(&p, NessMethod::Dense).unwrap();
    let b = ness(&p, NessMethod::Sparse).unwrap();
    let diff = a.matrix() - b.matrix();
    let worst = (0..16).flat_map(|i| (0..16).map(move |j| (i, j))).map(|(i, j)| diff[(i, j)].norm()).fold(0.0, f64::max);
    assert!(worst < 1e-12);
}

#[test]
fn density_matrix_invariants() {
    for e in [0.0, 0.5, 2.16, 3.66, 9.66] {
        let rho = ness(&diode(4).with_tilt(e), NessMethod::Auto).unwrap();
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!((rho.trace() - c64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
    }
}

#[test]
fn degenerate_steady_state_is_reported() {
    // Without hopping the bulk site decouples and keeps its own conserved population.
    let p = ModelParams::new(3).with_hopping(0.0).with_interaction(1.0);
    match ness(&p, NessMethod::Dense) {
        Err(Error::DegenerateSteadyState { dimension }) => assert!(dimension >= 2),
        other => panic!("expected degeneracy, got {other:?}"),
    }
}

#[test]
fn matches_noninteracting_solver() {
    let p = ModelParams::new(4).with_tilt(3.0);
    let o = ness_obs(&p);
    let c = solve_chain(&QuadraticChain::from_params(&p).unwrap()).unwrap();
    for (x, y) in o.populations.iter().zip(c.populations()) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!((o.current - c.current()).abs() < 1e-9);
}

#[test]
fn current_is_independent_of_chemical_potential() {
    let p = diode(4).with_tilt(2.3);
    let j = ness_obs(&p).current;
    for mu in [-3.0, 0.4, 7.5] {
        let jm = ness_obs(&p.with_chem_potential(mu)).current;
        assert!((jm / j - 1.0).abs() < 1e-9, "μ={mu}");
    }
}

#[test]
fn tilt_inversion_duality() {
    for (n, e) in [(3usize, 1.1), (4, 2.16), (5, 0.8)] {
        let fwd = ness_obs(&diode(n).with_tilt(e));
        let rev = ness_obs(&diode(n).with_tilt(-e).with_driving(-1.0));
        assert!((fwd.current + rev.current).abs() < 1e-10 * fwd.current.abs().max(1e-12));
        for (j, x) in fwd.populations.iter().enumerate() {
            assert!((x - rev.populations[n - 1 - j]).abs() < 1e-10);
        }
    }
}

#[test]
fn no_rectification_without_interaction_or_tilt() {
    let free = rectification(&ModelParams::new(4).with_tilt(1.3), NessMethod::Auto).unwrap();
    assert!((free.ratio - 1.0).abs() < 1e-9);
    let flat = rectification(&ModelParams::new(4).with_interaction(3.0), NessMethod::Auto).unwrap();
    assert!((flat.ratio - 1.0).abs() < 1e-9);
    let r = rectification(&diode(4).with_tilt(3.66), NessMethod::Auto).unwrap();
    assert!(r.ratio > 100.0 && !r.overflow);
}

#[test]
fn overflow_flag() {
    let r = Rectification::from_currents(1e-3, -1e-320);
    assert!(r.overflow);
    assert_eq!(r.ratio, 1e-3 / 1e-300);
    assert!(!Rectification::from_currents(1e-3, -1e-6).overflow);
}

#[test]
fn reverse_state_is_highest_even_eigenstate() {
    let p = diode(4).with_tilt(0.01).with_driving(-1.0);
    let (d, _) = decomposition(&p);
    let s = half_even(&d);
    let probs = s.probabilities();
    assert!(*probs.last().unwrap() >= 0.95, "{probs:?}");
}

#[test]
fn decomposition_reassembles_current() {
    for e in [0.05, 1.0, 2.16, 3.66, 6.0, 9.66] {
        let (d, j) = decomposition(&diode(4).with_tilt(e));
        assert!((d.total_probability() - 1.0).abs() < 1e-9);
        assert!((d.reassembled_current() - j).abs() < 1e-9, "E={e}");
    }
    let rho = ness(&diode(4), NessMethod::Auto).unwrap();
    let bases = sector_eigenbases(&diode(4)).unwrap();
    assert!(eigenbasis_decomposition(&rho, &bases, &diode(4), 4).is_err());
}

#[test]
fn resonant_coherence_dominates() {
    let (d, _) = decomposition(&diode(4).with_tilt(2.16));
    let s = half_even(&d);
    let adjacent: Vec<f64> = (0..s.rho.nrows() - 1).map(|m| s.rho[(m, m + 1)].norm()).collect();
    let best = adjacent.iter().cloned().fold(0.0, f64::max);
    assert_eq!(adjacent[2], best, "{adjacent:?}");
}

#[test]
fn small_tilt_coherence_carries_little_current() {
    let (d, j) = decomposition(&diode(4).with_tilt(0.05));
    let s = half_even(&d);
    let coherence = s.rho[(3, 4)].norm();
    let adjacent_max = (0..s.rho.nrows() - 1).map(|m| s.rho[(m, m + 1)].norm()).fold(0.0, f64::max);
    assert_eq!(coherence, adjacent_max);
    let share = (s.contribution(3, 4) + s.contribution(4, 3)).re.abs() / j.abs();
    assert!(share < 0.1, "share {share}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn continuity_and_boundary_formula(
        n in 2usize..=5,
        delta in 0.0f64..6.0,
        e in -4.0f64..4.0,
        gamma in 0.3f64..3.0,
        f in -1.0f64..1.0,
    ) {
        let p = ModelParams::new(n).with_interaction(delta).with_tilt(e).with_coupling(gamma).with_driving(f);
        let o = ness_obs(&p);
        let scale = o.current.abs().max(1e-12);
        prop_assert!(o.homogeneity_defect() <= 1e-9 * scale);
        prop_assert!((o.current - o.current_from_n1).abs() <= 1e-9);
        prop_assert!(o.impurity >= -1e-12 && o.impurity <= 1.0 - 0.5f64.powi(n as i32) + 1e-12);
    }

    #[test]
    fn agrees_with_noninteracting_oracle(n in 2usize..=6, e in 0.0f64..5.0, gamma in 0.3f64..3.0, f in -1.0f64..1.0) {
        let p = ModelParams::new(n).with_tilt(e).with_coupling(gamma).with_driving(f);
        let o = ness_obs(&p);
        let c = solve_chain(&QuadraticChain::from_params(&p).unwrap()).unwrap();
        for (x, y) in o.populations.iter().zip(c.populations()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!((o.current - c.current()).abs() < 1e-9);
    }

    #[test]
    fn spectrum_is_contracting(delta in 0.0f64..4.0, e in 0.0f64..4.0, f in -1.0f64..1.0) {
        let s = build_superoperator(&ModelParams::new(3).with_interaction(delta).with_tilt(e).with_driving(f)).unwrap();
        prop_assert!(s.trace_residual() < 1e-10);
        let ev = s.to_dense().unwrap().eigenvalues().unwrap();
        prop_assert!(ev.iter().all(|z| z.re <= 1e-10));
    }
}
