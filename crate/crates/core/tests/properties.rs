//! Randomized property checks across the channel and entanglement modules.

use decoh::channels::{BlochVector, DensityMatrix2, Jump, LindbladGenerator, QubitChannel};
use decoh::entanglement::{
    apply_local, choi_of_channel, evolve_singlet, holevo_form_depolarizing,
    is_entanglement_breaking, ppt_verdict, random_density_matrix, singlet, verify_holevo_form,
    Factor,
};
use decoh::linalg::{hermitian_eigenvalues, trace_norm, ComplexMatrix};
use decoh::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LN3: f64 = 1.098_612_288_668_109_8;

fn random_generator(rng: &mut ChaCha8Rng) -> LindbladGenerator {
    let h = [0; 3].map(|_| rng.random_range(-2.0..2.0));
    let n_jumps = rng.random_range(0..4);
    let jumps = (0..n_jumps)
        .map(|_| Jump {
            rate: rng.random_range(0.0..1.5),
            coeffs: [0; 4]
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        })
        .collect();
    LindbladGenerator::new(h, jumps).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng) -> QubitChannel {
    let g = random_generator(rng).to_bloch();
    QubitChannel::from_generator(&g, rng.random_range(0.0..5.0)).unwrap()
}

fn random_bloch(rng: &mut ChaCha8Rng) -> BlochVector {
    let rho = DensityMatrix2::new(random_density_matrix(2, rng)).unwrap();
    rho.bloch()
}

#[test]
fn lindblad_channels_stay_cptp() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let ch = random_channel(&mut rng);
        let choi = choi_of_channel(&ch).expect("generated channel must be CP");
        assert!(choi.min_eigenvalue().unwrap() >= -1e-10);
        assert!((choi.matrix().trace().re - 1.0).abs() < 1e-12);

        let rho = DensityMatrix2::from_bloch(&random_bloch(&mut rng)).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(out.matrix().hermitian_eigenvalues(false).unwrap().min() >= -1e-10);
    }
}

#[test]
fn composition_of_random_channels_is_cptp() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let first = random_channel(&mut rng);
        let second = random_channel(&mut rng);
        let both = QubitChannel::compose(&second, &first);
        let r = random_bloch(&mut rng);
        let direct = both.map_bloch(&r);
        let staged = second.map_bloch(&first.map_bloch(&r));
        assert!(direct.max_abs_diff(&staged) < 1e-12);
        assert!(choi_of_channel(&both).is_ok());
    }
}

#[test]
fn semigroup_law_for_random_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let g = random_generator(&mut rng).to_bloch();
        let s = rng.random_range(0.0..3.0);
        let t = rng.random_range(0.0..3.0);
        let whole = QubitChannel::from_generator(&g, s + t).unwrap();
        let split = QubitChannel::compose(
            &QubitChannel::from_generator(&g, t).unwrap(),
            &QubitChannel::from_generator(&g, s).unwrap(),
        );
        assert!(whole.max_abs_diff(&split) < 1e-10, "s={s} t={t}");
    }
}

#[test]
fn generator_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let tau = 1.7;
    let gamma = 0.6;
    let dep = LindbladGenerator::depolarizing(tau).unwrap().to_bloch();
    let deph = LindbladGenerator::dephasing(gamma).unwrap().to_bloch();
    let lit = LindbladGenerator::dephasing_literal(tau)
        .unwrap()
        .to_bloch();
    for _ in 0..50 {
        let t = rng.random_range(0.0..20.0);
        let pairs = [
            (
                QubitChannel::from_generator(&dep, t).unwrap(),
                QubitChannel::depolarizing(t, tau).unwrap(),
            ),
            (
                QubitChannel::from_generator(&deph, t).unwrap(),
                QubitChannel::dephasing(t, gamma).unwrap(),
            ),
            (
                QubitChannel::from_generator(&lit, t).unwrap(),
                QubitChannel::dephasing_literal(t, tau).unwrap(),
            ),
        ];
        for (from_gen, closed) in pairs {
            assert!(from_gen.max_abs_diff(&closed) < 1e-10, "t={t}");
        }
    }
}

#[test]
fn depolarizer_verdict_flips_once_at_ln3() {
    let tau = 1.0;
    let mut previous = false;
    for i in 0..200 {
        let t = 10.0 * tau * i as f64 / 199.0;
        let eb = is_entanglement_breaking(&QubitChannel::depolarizing(t, tau).unwrap())
            .unwrap()
            .is_entanglement_breaking;
        assert_eq!(eb, t >= LN3, "t={t}");
        assert!(eb || !previous, "verdict reverted at t={t}");
        previous = eb;
    }
}

#[test]
fn dephasing_is_never_eb() {
    for i in 0..200 {
        let t = 50.0 * i as f64 / 199.0;
        for ch in [
            QubitChannel::dephasing(t, 1.0).unwrap(),
            QubitChannel::dephasing_literal(t, 1.0).unwrap(),
        ] {
            assert!(
                !is_entanglement_breaking(&ch)
                    .unwrap()
                    .is_entanglement_breaking,
                "t={t}"
            );
        }
    }
}

#[test]
fn holevo_form_on_grid_and_below_threshold() {
    for i in 0..20 {
        let t = LN3 + (5.0 - LN3) * i as f64 / 19.0;
        let form = holevo_form_depolarizing(t, 1.0).unwrap();
        assert!(form.completeness_defect() <= 1e-13);
        for e in form.entries() {
            let eig = hermitian_eigenvalues(&e.povm_element, false).unwrap();
            assert!(eig.min() >= -1e-13);
        }
        let residual =
            verify_holevo_form(&form, &QubitChannel::depolarizing(t, 1.0).unwrap(), 100).unwrap();
        assert!(residual <= 1e-12, "t={t} residual={residual}");
    }
    match holevo_form_depolarizing(0.9 * LN3, 1.0) {
        Err(Error::HolevoStatesDoNotExist { coefficient }) => assert!(coefficient > 1.0),
        other => panic!("expected nonexistence, got {other:?}"),
    }
}

#[test]
fn ppt_verdict_agrees_with_negativity_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut entangled = 0;
    for _ in 0..1000 {
        let rho = random_density_matrix(4, &mut rng);
        let v = ppt_verdict(&rho).unwrap();
        assert_eq!(v.negativity < 1e-10, v.min_pt_eigenvalue >= -1e-10);
        let from_trace_norm = (trace_norm(&rho.partial_transpose().unwrap()).unwrap() - 1.0) / 2.0;
        assert!((v.negativity - from_trace_norm).abs() < 1e-10);
        if !v.is_entanglement_breaking {
            entangled += 1;
        }
    }
    // Gaussian-induced two-qubit states are entangled most of the time.
    assert!(entangled > 500, "{entangled}");
}

#[test]
fn evolved_singlet_matches_local_channel_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..50 {
        let t = rng.random_range(0.0..6.0);
        let ch = QubitChannel::depolarizing(t, 1.0).unwrap();
        let by_channel = apply_local(&ch, &singlet(), Factor::First).unwrap();
        let w = evolve_singlet(t, 1.0).unwrap();
        assert!(by_channel.max_abs_diff(w.matrix()) < 1e-14);
        // Partial-transpose spectrum of a Werner state: (1 − 3f)/4 once, (1 + f)/4 three times.
        let f = w.f();
        let eig = w
            .matrix()
            .partial_transpose()
            .unwrap()
            .hermitian_eigenvalues(false)
            .unwrap();
        let mut expected = [
            (1.0 - 3.0 * f) / 4.0,
            (1.0 + f) / 4.0,
            (1.0 + f) / 4.0,
            (1.0 + f) / 4.0,
        ];
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn eigensolver_reconstructs_random_hermitian_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for dim in [2, 3, 4, 6] {
        for _ in 0..100 {
            let mut m = ComplexMatrix::zeros(dim);
            for i in 0..dim {
                m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
                for j in i + 1..dim {
                    let z =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            let spec = hermitian_eigenvalues(&m, true).unwrap();
            assert!(spec.reconstruct().unwrap().max_abs_diff(&m) < 1e-12);
            assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
