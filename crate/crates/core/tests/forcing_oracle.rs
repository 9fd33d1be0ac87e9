mod common;

use common::{oracle_f_p, oracle_f_u, oracle_g_abs, oracle_g_in, Coefficients, ACADEMIC};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use westervelt_dg::acoustics::AcousticParams;
use westervelt_dg::mms::{
    boundary_forcing_pressure, forcing_concentration, forcing_pressure, inflow_data, inflow_value,
    ExactSolution,
};
use westervelt_dg::transport::TransportParams;

fn params(k: &Coefficients) -> (AcousticParams, TransportParams) {
    (
        AcousticParams {
            c: k.c,
            beta: k.beta,
            kappa: k.kappa,
            alpha: k.alpha,
        },
        TransportParams {
            d0: k.d0,
            d1: k.d1,
            abs_pressure: false,
            v: k.v,
        },
    )
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

#[test]
fn dual_numbers_differentiate_polynomials() {
    struct Cubic;
    impl common::Field for Cubic {
        fn at<S: common::Scalar>(&self, x: S, y: S, t: S) -> S {
            x * x * y + t * t * t + S::cst(2.0) * x * t
        }
    }
    let p = [0.7, -1.3, 0.4];
    assert!((common::partial(&Cubic, p, &[0]) - (2.0 * 0.7 * -1.3 + 0.8)).abs() < 1e-15);
    assert!((common::partial(&Cubic, p, &[0, 1]) - 1.4).abs() < 1e-15);
    assert!((common::partial(&Cubic, p, &[2, 2, 2]) - 6.0).abs() < 1e-15);
    assert!((common::partial(&Cubic, p, &[0, 0, 1]) - 2.0).abs() < 1e-15);
    assert_eq!(common::partial(&Cubic, p, &[1, 1]), 0.0);
}

#[test]
fn oracle_reproduces_symbolic_values() {
    for (x, y, t, fp, fu) in common::frozen::VOLUME {
        assert!(close(oracle_f_p(&ACADEMIC, [x, y, t]), fp, 1e-13));
        assert!(close(oracle_f_u(&ACADEMIC, [x, y, t]), fu, 1e-13));
    }
    for (x, y, t, n, g) in common::frozen::ABSORBING {
        assert!(close(oracle_g_abs(&ACADEMIC, [x, y, t], n), g, 1e-13));
    }
    for (x, y, t, n, g) in common::frozen::INFLOW {
        assert!(close(oracle_g_in(&ACADEMIC, [x, y, t], n), g, 1e-13));
    }
}

#[test]
fn closures_reproduce_symbolic_values() {
    let exact = ExactSolution::academic();
    let (ap, tp) = params(&ACADEMIC);
    let (fp, fu) = (
        forcing_pressure(&exact, &ap),
        forcing_concentration(&exact, &tp),
    );
    let (ga, gi) = (
        boundary_forcing_pressure(&exact, &ap),
        inflow_data(&exact, &tp),
    );
    for (x, y, t, p_ref, u_ref) in common::frozen::VOLUME {
        assert!(close(fp([x, y], t), p_ref, 1e-12), "f_p at ({x}, {y}, {t})");
        assert!(close(fu([x, y], t), u_ref, 1e-12), "f_u at ({x}, {y}, {t})");
    }
    for (x, y, t, n, g) in common::frozen::ABSORBING {
        assert!(close(ga([x, y], n, t), g, 1e-12));
    }
    for (x, y, t, n, g) in common::frozen::INFLOW {
        assert!(close(gi([x, y], n, t), g, 1e-12));
    }
}

#[test]
fn closures_match_oracle_for_random_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let exact = ExactSolution::academic();
    for _ in 0..50 {
        let k = Coefficients {
            c: rng.random_range(0.5..3.0),
            beta: rng.random_range(0.0..1.0),
            kappa: rng.random_range(-0.5..0.5),
            alpha: rng.random_range(0.0..2.0),
            d0: rng.random_range(0.1..5.0),
            d1: rng.random_range(0.0..0.9),
            v: [rng.random_range(-1.0..1.0), rng.random_range(0.2..1.0)],
        };
        let (ap, tp) = params(&k);
        let (fp, fu) = (
            forcing_pressure(&exact, &ap),
            forcing_concentration(&exact, &tp),
        );
        let (ga, gi) = (
            boundary_forcing_pressure(&exact, &ap),
            inflow_data(&exact, &tp),
        );
        for _ in 0..20 {
            let q = [
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..0.5),
            ];
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let n = [th.cos(), th.sin()];
            let x = [q[0], q[1]];
            assert!(close(fp(x, q[2]), oracle_f_p(&k, q), 1e-10));
            assert!(close(fu(x, q[2]), oracle_f_u(&k, q), 1e-10));
            assert!(close(ga(x, n, q[2]), oracle_g_abs(&k, q, n), 1e-10));
            if (k.v[0] * n[0] + k.v[1] * n[1]).abs() > 0.1 {
                assert!(close(gi(x, n, q[2]), oracle_g_in(&k, q, n), 1e-10));
            }
        }
    }
}

#[test]
fn inflow_datum_rejects_tangential_faces() {
    let exact = ExactSolution::academic();
    let (_, tp) = params(&ACADEMIC);
    assert!(inflow_value(&exact, &tp, [0.0, 0.5], [-1.0, 0.0], 0.1).is_err());
    assert!(inflow_value(&exact, &tp, [0.5, 0.0], [0.0, -1.0], 0.1).is_ok());
}
