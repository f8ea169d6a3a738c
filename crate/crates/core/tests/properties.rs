use std::f64::consts::PI;

use jacobi_weyl::dynamics::{apply_response, response_vector, simulate, ControlSequence, Geometry};
use jacobi_weyl::recursion::{phi_plus_finite, solve_pq, weyl_resolvent, wronskian, ResolventMode};
use jacobi_weyl::series::{series_partial_sum, tail_bound, weyl_series, GrowthEnvelope};
use jacobi_weyl::takagi::{moments, spectral_data, takagi_factorize};
use jacobi_weyl::transform::RegionD;
use jacobi_weyl::{assemble_finite, Complex, Error, JacobiCoefficients, TailRule};
use proptest::prelude::*;

fn complex(modulus: f64, phase: f64) -> Complex {
    Complex::from_polar(modulus, phase)
}

/// Coefficient lists with `|a| ∈ [0.3, 1]`, `|b| ∈ [0, 1]`.
fn coeffs(len: usize) -> impl Strategy<Value = JacobiCoefficients> {
    let a = prop::collection::vec((0.3f64..1.0, -PI..PI), len);
    let b = prop::collection::vec((0.0f64..1.0, -PI..PI), len);
    (a, b).prop_map(|(a, b)| {
        JacobiCoefficients::new(
            a.into_iter().map(|(r, p)| complex(r, p)).collect(),
            b.into_iter().map(|(r, p)| complex(r, p)).collect(),
            Complex::new(1.0, 0.0),
            TailRule::None,
        )
        .unwrap()
    })
}

fn real_coeffs(len: usize) -> impl Strategy<Value = JacobiCoefficients> {
    let a = prop::collection::vec(prop_oneof![0.3f64..1.0, -1.0f64..-0.3], len);
    let b = prop::collection::vec(-1.0f64..1.0, len);
    (a, b).prop_map(|(a, b)| {
        JacobiCoefficients::new(
            a.into_iter().map(|x| Complex::new(x, 0.0)).collect(),
            b.into_iter().map(|x| Complex::new(x, 0.0)).collect(),
            Complex::new(1.0, 0.0),
            TailRule::None,
        )
        .unwrap()
    })
}

fn control(horizon: usize) -> impl Strategy<Value = ControlSequence> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), horizon)
        .prop_map(|v| ControlSequence::new(v.into_iter().map(|(x, y)| Complex::new(x, y)).collect()).unwrap())
}

/// `lambda = z + 1/z` with `|z| R ∈ [0.02, 0.9]`, `R = 4` (`B = 1`).
fn lambda_in_d() -> impl Strategy<Value = Complex> {
    (0.02f64..0.9, -PI..PI).prop_map(|(q, phi)| {
        let z = complex(q / 4.0, phi);
        z + z.inv()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn causality(k in coeffs(30), f in control(25)) {
        let u = simulate(&k, &f, Geometry::HalfLine).unwrap();
        for t in 0..=25isize {
            for n in (t as usize + 1)..=u.n_max() {
                prop_assert_eq!(u.get(n, t), Complex::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn delta_field_is_linear_in_a0(k in coeffs(20), re in -2.0f64..2.0, im in 0.1f64..2.0) {
        let a0 = Complex::new(re, im);
        let k2 = k.with_a0(a0).unwrap();
        let r1 = response_vector(&k, 15, Geometry::HalfLine).unwrap();
        let r2 = response_vector(&k2, 15, Geometry::HalfLine).unwrap();
        prop_assert_eq!(r2.r[0], a0);
        for t in 0..15 {
            prop_assert!((r2.r[t] - a0 * r1.r[t]).norm() <= 1e-12 * (1.0 + r2.r[t].norm()));
        }
    }

    #[test]
    fn response_operator_is_boundary_trace(k in coeffs(20), f in control(15)) {
        let r = response_vector(&k, 15, Geometry::HalfLine).unwrap();
        let u = simulate(&k, &f, Geometry::HalfLine).unwrap();
        let out = apply_response(&r, &f).unwrap();
        for (i, y) in out.iter().enumerate() {
            let want = u.get(1, i as isize + 1);
            prop_assert!((y - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn finite_speed_half_line_vs_interval(k in coeffs(30), n in 1usize..10) {
        let horizon = 2 * n + 3;
        let half = response_vector(&k, horizon, Geometry::HalfLine).unwrap();
        let inter = response_vector(&k, horizon, Geometry::Interval(n)).unwrap();
        for t in 0..2 * n {
            prop_assert!((half.r[t] - inter.r[t]).norm() <= 1e-13, "t={}", t);
        }
    }

    #[test]
    fn wronskian_with_phi_plus_is_constant(k in coeffs(14), n in 1usize..12, re in -3.0f64..3.0, im in 0.2f64..3.0) {
        let lambda = Complex::new(re, im);
        let phi = phi_plus_finite(&k, lambda, n).unwrap();
        let (p, _) = solve_pq(&k, lambda, n + 1).unwrap();
        let w0 = wronskian(&k, &p, &phi, 0).unwrap();
        for j in 1..=n {
            let w = wronskian(&k, &p, &phi, j).unwrap();
            prop_assert!((w - w0).norm() <= 1e-10 * w0.norm());
        }
    }

    #[test]
    fn series_equals_resolvent(k in coeffs(10), n in 1usize..10, lambda in lambda_in_d()) {
        let region = RegionD::new(1.0).unwrap();
        let r = response_vector(&k, 350, Geometry::Interval(n)).unwrap();
        let s = weyl_series(&r, lambda, &region, 1e-13).unwrap();
        let m = weyl_resolvent(&k, lambda, ResolventMode::Finite(n)).unwrap();
        prop_assert!((s.value - m).norm() <= 1e-8 * (1.0 + m.norm()));
    }

    #[test]
    fn tail_bound_dominates(k in coeffs(320), lambda in lambda_in_d(), t in 1usize..60) {
        let region = RegionD::new(1.0).unwrap();
        let r = response_vector(&k, 300, Geometry::HalfLine).unwrap();
        let dropped = (series_partial_sum(&r, lambda, 300) - series_partial_sum(&r, lambda, t)).norm();
        prop_assert!(dropped <= tail_bound(&region, lambda, t).unwrap());
    }

    #[test]
    fn amplitudes_within_envelope(k in coeffs(45)) {
        let u = simulate(&k, &ControlSequence::delta(40).unwrap(), Geometry::HalfLine).unwrap();
        prop_assert_eq!(GrowthEnvelope::new(1.0).first_violation(&u.growth_profile(), k.a0()), None);
    }

    #[test]
    fn region_predicates_agree(re in -12.0f64..12.0, im in -12.0f64..12.0, big in 1.2f64..10.0) {
        let region = RegionD::from_r(big).unwrap();
        let lambda = Complex::new(re, im);
        let q = region.contraction(lambda);
        prop_assume!((q - 1.0).abs() > 1e-9);
        prop_assert_eq!(q < 1.0, region.outside_ellipse(lambda));
    }

    #[test]
    fn takagi_contracts(k in coeffs(10), n in 1usize..10) {
        let m = assemble_finite(&k, n).unwrap();
        match takagi_factorize(&m) {
            Ok(f) => {
                prop_assert!(f.residual_unitary <= 1e-10);
                prop_assert!(f.residual_diag <= 1e-8);
                prop_assert!(f.residual_coneigen <= 1e-8);
                let data = spectral_data(&f, k.a0()).unwrap();
                let total: f64 = data.weights().iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-10);
                prop_assert!(data.quasi_orthogonality_residual() <= 1e-10);
            }
            Err(Error::DegenerateSpectrum(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn real_moments_stabilize(k in real_coeffs(12), n in 1usize..9) {
        let build = |size| {
            assemble_finite(&k, size)
                .and_then(|m| takagi_factorize(&m))
                .and_then(|f| spectral_data(&f, k.a0()))
        };
        let (Ok(small), Ok(large)) = (build(n), build(n + 2)) else {
            return Ok(());
        };
        for kk in 0..(2 * n) as u32 {
            let scale = 1.0 + small.omega.iter().zip(&small.rho).map(|(w, r)| w.norm().powi(kk as i32) / r).sum::<f64>();
            prop_assert!((moments(&small, kk) - moments(&large, kk)).norm() <= 1e-8 * scale, "k={}", kk);
        }
    }
}
