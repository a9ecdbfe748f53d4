use proptest::prelude::*;
use qibench_core::gaussian::{apply_beamsplitter, make_thermal, williamson};
use qibench_core::protocols::{Scenario, SourceKind};
use qibench_core::qht_asymmetric::{roc_from_dv, RocMeta};
use qibench_core::qht_symmetric::{qcb, s_overlap};
use qibench_core::{GaussianState, Mat};

/// Random symplectic matrix built from squeezers, phase shifts and
/// beamsplitters.
fn random_symplectic(modes: usize, params: &[f64]) -> Mat<f64> {
    let n = 2 * modes;
    let mut s = Mat::<f64>::identity(n);
    for (k, chunk) in params.chunks(3).enumerate() {
        let (r, th, t) = (chunk[0], chunk[1], chunk[2]);
        let i = k % modes;
        let mut e = Mat::<f64>::identity(n);
        // squeezer then rotation on mode i
        let (c, sn) = (th.cos(), th.sin());
        let (a, b) = (r.exp(), (-r).exp());
        e[(2 * i, 2 * i)] = c * a;
        e[(2 * i, 2 * i + 1)] = -sn * b;
        e[(2 * i + 1, 2 * i)] = sn * a;
        e[(2 * i + 1, 2 * i + 1)] = c * b;
        s = &e * &s;
        if modes > 1 {
            let j = (i + 1) % modes;
            let (ct, st) = (t.cos(), t.sin());
            let mut bs = Mat::<f64>::identity(n);
            for q in 0..2 {
                bs[(2 * i + q, 2 * i + q)] = ct;
                bs[(2 * i + q, 2 * j + q)] = st;
                bs[(2 * j + q, 2 * i + q)] = -st;
                bs[(2 * j + q, 2 * j + q)] = ct;
            }
            s = &bs * &s;
        }
    }
    s
}

fn covariance(s: &Mat<f64>, nus: &[f64]) -> Mat<f64> {
    let d: Vec<f64> = nus.iter().flat_map(|&n| [n, n]).collect();
    let v = &(s * &Mat::diag(&d)) * &s.transpose();
    // exact symmetry
    Mat::from_fn(v.dim(), |i, j| 0.5 * (v[(i, j)] + v[(j, i)]))
}

fn single_mode(mean: (f64, f64), nu: f64, r: f64, th: f64) -> GaussianState {
    let s = random_symplectic(1, &[r, th, 0.0]);
    GaussianState::new(vec![mean.0, mean.1], covariance(&s, &[nu])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn williamson_round_trip(
        modes in 1usize..=3,
        nus in prop::collection::vec(0.5f64..50.0, 3),
        params in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let s = random_symplectic(modes, &params);
        let v = covariance(&s, &nus[..modes]);
        let w = williamson(&v).unwrap();
        let err = (&w.reconstruct() - &v).max_abs() / v.max_abs();
        prop_assert!(err < 1e-10, "reconstruction error {err:e}");

        let omega = Mat::<f64>::symplectic_form(modes);
        let sym = (&(&(&w.s * &omega) * &w.s.transpose()) - &omega).max_abs();
        prop_assert!(sym < 1e-9 * w.s.max_abs().powi(2), "symplecticity {sym:e}");

        let mut expect = nus[..modes].to_vec();
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in w.nus.iter().zip(&expect) {
            prop_assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn chernoff_bound_is_symmetric(
        m0 in (-3.0f64..3.0, -3.0f64..3.0),
        m1 in (-3.0f64..3.0, -3.0f64..3.0),
        nu0 in 0.6f64..20.0,
        nu1 in 0.6f64..20.0,
        r0 in -0.8f64..0.8,
        r1 in -0.8f64..0.8,
        th in 0.0f64..3.0,
    ) {
        let a = single_mode(m0, nu0, r0, th);
        let b = single_mode(m1, nu1, r1, 0.0);
        let ab = qcb(&a, &b, 1.0).unwrap();
        let ba = qcb(&b, &a, 1.0).unwrap();
        prop_assert!((ab.exponent - ba.exponent).abs() <= 1e-9 * ab.exponent.max(1e-300));
        let (sa, sb) = (ab.s_star.unwrap(), ba.s_star.unwrap());
        // the minimiser is only sharp when the exponent is not flat
        if ab.exponent > 1e-6 {
            prop_assert!((sa + sb - 1.0).abs() < 1e-4, "s* {sa} and {sb}");
        }
    }

    #[test]
    fn overlap_is_quadratic_in_the_mean_difference(
        d in (-2.0f64..2.0, -2.0f64..2.0),
        k in 0.1f64..4.0,
        nu0 in 0.6f64..10.0,
        nu1 in 0.6f64..10.0,
        s in 0.05f64..0.95,
    ) {
        let rho0 = single_mode((0.0, 0.0), nu0, 0.3, 0.4);
        let ln_c = |scale: f64| {
            let rho1 = single_mode((scale * d.0, scale * d.1), nu1, -0.2, 1.1);
            s_overlap(&rho0, &rho1, s).unwrap().ln_c_s
        };
        let base = ln_c(0.0);
        let lhs = ln_c(k) - base;
        let rhs = k * k * (ln_c(1.0) - base);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn bound_decreases_with_copies(
        mu in 1e-6f64..1.0,
        n_b in 0.0f64..100.0,
        m in 1.0f64..1e6,
        factor in 1.0f64..100.0,
    ) {
        let rho0 = make_thermal(n_b).unwrap();
        let rho1 = GaussianState::displaced_thermal(mu, n_b).unwrap();
        let a = qcb(&rho0, &rho1, m).unwrap();
        let b = a.with_copies(m * factor);
        prop_assert!(b.ln_value <= a.ln_value);
        prop_assert!(a.value <= 0.5);
    }

    #[test]
    fn roc_is_monotone(
        d in 1e-9f64..1.0,
        v in 1e-9f64..10.0,
        m in 1.0f64..1e8,
    ) {
        let grid = qibench_core::qht_asymmetric::log_grid(1e-4, 0.9, 60).unwrap();
        let roc = roc_from_dv(d, v, m, &grid, RocMeta::default()).unwrap();
        prop_assert!(roc.is_monotone());
    }

    #[test]
    fn beamsplitter_conserves_photons(
        n_in in 0.0f64..1e4,
        n_env in 0.0f64..1e4,
        mean in -10.0f64..10.0,
        tau in 0.0f64..=1.0,
    ) {
        let input = GaussianState::new(
            vec![mean, 0.0],
            Mat::identity(2).scale(n_in + 0.5),
        ).unwrap();
        let env = make_thermal(n_env).unwrap();
        let out = apply_beamsplitter(&input, tau, &env).unwrap();
        let expect = tau * input.mean_photons() + (1.0 - tau) * env.mean_photons();
        let got = out.mean_photons();
        prop_assert!((got - expect).abs() <= 1e-12 * expect.max(1.0), "{got} vs {expect}");
    }

    #[test]
    fn pair_constructions_agree(
        kind in prop_oneof![
            Just(SourceKind::Amplified),
            Just(SourceKind::Maser),
            Just(SourceKind::Optical),
        ],
        n_s in 1e-4f64..10.0,
        noise in 0.0f64..1e6,
        n_b in 0.0f64..1e4,
        eta in 1e-9f64..0.5,
    ) {
        let scenario = Scenario {
            id: "p".into(),
            kind,
            n_s,
            n_a: Some(noise),
            phi: Some(1.0),
            t_fridge: Some(300.0),
            freq: None,
            t_target: 300.0,
            n_b: Some(n_b),
            eta,
            copies: 1,
            energy_matched: false,
        };
        let r = scenario.resolve().unwrap();
        let a = r.hypothesis_pair::<f64>().unwrap();
        let b = r.hypothesis_pair_via_channels::<f64>().unwrap();
        let cov = (a.rho1.cov() - b.rho1.cov()).max_abs() / a.rho1.cov().max_abs();
        prop_assert!(cov <= 1e-12, "covariance deviation {cov:e}");
        let mean = (a.rho1.mean()[0] - b.rho1.mean()[0]).abs() / a.rho1.mean()[0];
        prop_assert!(mean <= 1e-12, "mean deviation {mean:e}");
    }
}
