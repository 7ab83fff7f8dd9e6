use bandtouch::dynamics::{
    adiabatic_frame_evolve, delta_phi_estimate, evolve, final_probability, lz_probability, rk4_oracle_evolve,
    split_phase_analysis, transition_probability,
};
use bandtouch::fis::linspace;
use bandtouch::matrix::norm;
use bandtouch::{Error, Level, ModelSpec, Protocol};
use proptest::prelude::*;

fn oracle(model: &ModelSpec, protocol: &Protocol) -> f64 {
    transition_probability(&rk4_oracle_evolve(model, protocol, protocol.dt / 5.0).unwrap()).unwrap()
}

#[test]
fn linear_gapless_model_always_flips() {
    let p = final_probability(&ModelSpec::gl(1, 0.5), &Protocol::pl1(0.1)).unwrap();
    assert!((p - 1.0).abs() < 1e-6, "{p}");
}

#[test]
fn odd_gapless_models_end_in_the_excited_state() {
    for (n, d, c) in [(3, 0.5, 0.1), (3, 1.5, 0.3), (5, 0.5, 0.3), (1, 0.8, 1.0)] {
        let p = final_probability(&ModelSpec::gl(n, d), &Protocol::pl2(c)).unwrap();
        assert!((p - 1.0).abs() < 1e-3, "n={n} d={d} c={c}: {p}");
    }
}

#[test]
fn landau_zener_limit() {
    let model = ModelSpec::gp(1, 0.5);
    let protocol = Protocol::pl2(1.0);
    let p = final_probability(&model, &protocol).unwrap();
    let lz = lz_probability(0.5, 1.0);
    assert!((lz - 0.4559).abs() < 1e-4);
    assert!((p - lz).abs() < 0.02, "{p}");
    assert!((p - oracle(&model, &protocol)).abs() < 1e-5);
}

#[test]
fn integrators_agree() {
    for (model, protocol) in [
        (ModelSpec::gp(1, 0.5), Protocol::pl2(1.0)),
        (ModelSpec::gp(2, 0.3), Protocol::pl2(0.5).with_lambda_inf(3.0)),
        (ModelSpec::gl(2, 0.3), Protocol::pl1(0.1)),
        (ModelSpec::gl(3, 0.5), Protocol::plneg(0.3).with_lambda_inf(2.0)),
    ] {
        let cn = final_probability(&model, &protocol).unwrap();
        let rk = oracle(&model, &protocol);
        assert!((cn - rk).abs() < 1e-5, "{model:?}: {cn} vs {rk}");
    }
}

#[test]
fn oracle_norm_drift_over_a_million_steps() {
    let protocol = Protocol::pl2(1.0).with_dt(1e-4);
    let traj = rk4_oracle_evolve(&ModelSpec::gp(1, 0.5), &protocol, 2e-5).unwrap();
    assert!((norm(&traj.final_state()) - 1.0).abs() <= 1e-9);
}

#[test]
fn adiabatic_frame_agrees_with_crank_nicolson() {
    let model = ModelSpec::gp(1, 0.5);
    let protocol = Protocol::pl2(1.0);
    let a = adiabatic_frame_evolve(&model, &protocol).unwrap();
    let cn = final_probability(&model, &protocol).unwrap();
    assert!((a.p_excited() - cn).abs() < 1e-4);
    assert!(a.max_berry <= 1e-8);
}

#[test]
fn slow_drive_stays_adiabatic() {
    let model = ModelSpec::gp(1, 1.0);
    let protocol = Protocol::pl2(0.01);
    let a = adiabatic_frame_evolve(&model, &protocol).unwrap();
    let reference = oracle(&model, &protocol.with_lambda_inf(3.0));
    assert!(reference < 1e-3);
    assert!(a.p_excited() <= 1e-3, "{}", a.p_excited());
}

#[test]
fn norm_and_populations_are_conserved() {
    for (model, protocol) in [
        (ModelSpec::gp(4, 0.5), Protocol::pl2(0.3)),
        (ModelSpec::gl(2, 0.5), Protocol::plneg(0.1)),
        (ModelSpec::graphene_tb(1.0, 1.0), Protocol::custom(-1.0, 1.0, 0.5)),
    ] {
        let traj = evolve(&model, &protocol, 7).unwrap();
        for s in &traj.samples {
            assert!((norm(&s.psi) - 1.0).abs() <= 1e-10);
            assert!((s.p_ground + s.p_excited - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn numerical_infinity_is_far_enough() {
    for (model, protocol) in [
        (ModelSpec::gp(1, 0.4), Protocol::pl2(0.5)),
        (ModelSpec::gp(4, 0.5), Protocol::pl2(0.3)),
        (ModelSpec::gl(2, 0.5), Protocol::pl2(0.1)),
        (ModelSpec::gl(4, 0.5), Protocol::plneg(0.1)),
    ] {
        let a = final_probability(&model, &protocol).unwrap();
        let b = final_probability(&model, &protocol.with_lambda_inf(20.0)).unwrap();
        assert!((a - b).abs() < 1e-3, "{model:?}: {a} vs {b}");
    }
}

#[test]
fn epsilon_is_small_enough() {
    for model in [ModelSpec::gl(2, 0.5), ModelSpec::gl(4, 0.3)] {
        let a = final_probability(&model, &Protocol::plneg(0.1)).unwrap();
        let b = final_probability(&model, &Protocol::plneg(0.1).with_epsilon(5e-7)).unwrap();
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn faster_drives_suppress_gl_two_transitions() {
    for d in [0.2, 0.5, 1.0] {
        let p: Vec<f64> = [0.05, 0.1, 0.3, 1.0]
            .iter()
            .map(|&c| final_probability(&ModelSpec::gl(2, d), &Protocol::pl2(c)).unwrap())
            .collect();
        assert!(p.windows(2).all(|w| w[0] >= w[1]), "d={d}: {p:?}");
    }
}

#[test]
fn excited_start_is_exposed() {
    let p = Protocol::pl2(0.05).with_lambda_inf(3.0).with_initial(Level::Excited);
    let traj = evolve(&ModelSpec::gp(1, 1.0), &p, 0).unwrap();
    assert!(transition_probability(&traj).unwrap() > 0.999);
}

#[test]
fn split_reconstruction_is_exact() {
    for (model, c) in [(ModelSpec::gp(4, 0.5), 0.3), (ModelSpec::gl(4, 0.7), 0.3), (ModelSpec::gp(2, 0.2), 0.1)] {
        let d = split_phase_analysis(&model, &Protocol::pl2(c)).unwrap();
        assert!((d.p_reconstructed - d.p_direct).abs() <= 1e-6);
        assert!((d.alpha_plus.norm_sqr() + d.alpha_minus.norm_sqr() - 1.0).abs() <= 1e-10);
        assert!((d.beta_pp.norm_sqr() + d.beta_pm.norm_sqr() - 1.0).abs() <= 1e-10);
        assert!((d.beta_mp.norm_sqr() + d.beta_mm.norm_sqr() - 1.0).abs() <= 1e-10);
        let single = final_probability(&model, &Protocol::pl2(c)).unwrap();
        assert_eq!(d.p_direct, single);
    }
}

#[test]
fn gapless_split_uses_offset_midpoint() {
    let d = split_phase_analysis(&ModelSpec::gl(4, 0.5), &Protocol::pl2(0.3)).unwrap();
    assert_eq!(d.midpoint, -1e-6);
    assert!((d.delta_phi.abs() - std::f64::consts::PI).abs() < 0.05);
    let d = split_phase_analysis(&ModelSpec::gp(4, 0.5), &Protocol::pl2(0.3)).unwrap();
    assert_eq!(d.midpoint, 0.0);
}

fn unwrap_phase(v: &[f64]) -> Vec<f64> {
    let mut out = vec![v[0]];
    for w in v.windows(2) {
        let d = (w[1] - w[0] + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
        out.push(out.last().unwrap() + d);
    }
    out
}

#[test]
fn phase_estimate_tracks_measured_slope() {
    let c = 1.0;
    let grid = linspace(0.2, 3.0, 57);
    let measured: Vec<f64> =
        grid.iter().map(|&d| split_phase_analysis(&ModelSpec::gp(20, d), &Protocol::pl2(c)).unwrap().delta_phi).collect();
    let estimate: Vec<f64> = grid.iter().map(|&d| delta_phi_estimate(&ModelSpec::gp(20, d), c).unwrap()).collect();
    let span = grid[grid.len() - 1] - grid[0];
    let slope = |v: &[f64]| {
        let u = unwrap_phase(v);
        (u[u.len() - 1] - u[0]) / span
    };
    let (sm, se) = (slope(&measured), slope(&estimate));
    assert!((sm.abs() - se.abs()).abs() <= 0.1 * se.abs(), "{sm} vs {se}");
}

#[test]
fn errors_are_classified() {
    let err = evolve(&ModelSpec::gl(2, 0.5), &Protocol::custom(0.0, 1.0, 1.0), 0).unwrap_err();
    assert!(matches!(err, Error::Degenerate { .. }) && err.is_numerical());
    let err = evolve(&ModelSpec::gl(2, 0.5), &Protocol::pl2(-1.0), 0).unwrap_err();
    assert!(matches!(err, Error::InvalidProtocol(_)) && !err.is_numerical());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn probabilities_are_bounded(n in 1u32..6, d in 0.05..2.0f64, c in 0.2..2.0f64, gapped in any::<bool>()) {
        let model = if gapped { ModelSpec::gp(n, d) } else { ModelSpec::gl(n, d) };
        let protocol = Protocol::pl2(c).with_lambda_inf(2.0);
        let p = final_probability(&model, &protocol).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn gauge_rotations_do_not_change_probability(phase in 0.0..std::f64::consts::TAU, d in 0.1..1.0f64) {
        let model = ModelSpec::gp(2, d);
        let protocol = Protocol::pl2(0.5).with_lambda_inf(2.0);
        let mut traj = evolve(&model, &protocol, 0).unwrap();
        let p = transition_probability(&traj).unwrap();
        let last = traj.samples.last_mut().unwrap();
        let z = bandtouch::Complex64::from_polar(1.0, phase);
        last.psi = [last.psi[0] * z, last.psi[1] * z];
        prop_assert!((transition_probability(&traj).unwrap() - p).abs() < 1e-14);
    }
}
