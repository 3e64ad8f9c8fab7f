use dynrmat::dynfield::TensorField;
use dynrmat::liealg::Automorphism;
use dynrmat::matfun::ScalarFun;
use dynrmat::rmat::{full_base, rho_cartan, rmat_es, rmat_fm, rmat_levi, z_element};
use dynrmat::verify::{cdybe_pl, w_residual};
use dynrmat::{build_sl, C64};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn cartan_point(rd: &dynrmat::RootDatum<C64>, coeffs: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0); rd.cartan[0].len()];
    for (h, a) in rd.cartan.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(h) {
            *o += a * x;
        }
    }
    out
}

#[test]
fn levi_restricts_to_the_cartan_difference() {
    let (g, rd) = build_sl::<C64>(3).unwrap();
    for eps in [c(0.5), c(2.0), C64::new(1.0, 0.3)] {
        let lv = rmat_levi(&g, &rd, &[0], eps).unwrap();
        let lambda = cartan_point(&rd, &[C64::new(0.31, 0.07), C64::new(-0.12, 0.2)]);
        let r = lv.r.eval(&lambda).unwrap();
        let rho_l = dynrmat::rmat::CartanRho::new(&g, &lv.roots_l, c(1.0))
            .eval(&lambda)
            .unwrap();
        let rho_g = rho_cartan(&g, &rd, eps, &lambda).unwrap();
        assert!(r.add(&lv.base.r_l).add(&rho_l).sub(&rho_g).max_abs() < 1e-9);
    }
}

#[test]
fn graded_profile_at_identity_is_a_difference_of_cartan_tensors() {
    // on h the degree-zero profile ½coth(s/2) − (ε/2)coth(εs/2) gives ρ(ε) − ρ(1)
    let (g, rd) = build_sl::<C64>(2).unwrap();
    let eps = c(0.5);
    let fm = rmat_fm(
        &g,
        &Automorphism::identity(&g).unwrap(),
        full_base(&g, &rd).unwrap(),
        eps,
    )
    .unwrap();
    let lambda = cartan_point(&rd, &[C64::new(0.23, -0.11)]);
    let r_prime = fm.r_prime.eval(&lambda).unwrap();
    let expected = rho_cartan(&g, &rd, eps, &lambda)
        .unwrap()
        .sub(&rho_cartan(&g, &rd, c(1.0), &lambda).unwrap());
    assert!(r_prime.sub(&expected).max_abs() < 1e-12);
}

#[test]
fn rational_trigonometric_profile_is_coth_plus_a_homogeneous_part() {
    // f₀ = 1/s − ½coth(s/2): removing the ρ(1) part leaves a tensor of degree −1
    let (g, rd) = build_sl::<C64>(2).unwrap();
    let es = rmat_es(&g, &Automorphism::identity(&g).unwrap()).unwrap();
    let lambda = cartan_point(&rd, &[C64::new(0.2, 0.05)]);
    let part = |t: f64| {
        let p: Vec<C64> = lambda.iter().map(|x| x * t).collect();
        es.eval(&p)
            .unwrap()
            .sub(&rho_cartan(&g, &rd, c(1.0), &p).unwrap())
    };
    let a = part(1.0);
    let b = part(1.7);
    assert!(a.max_abs() > 1.0);
    assert!(a.sub(&b.scale(c(1.7))).max_abs() < 1e-12);
}

#[test]
fn profile_values() {
    let f0 = ScalarFun::rational_trig_f0();
    assert!((f0.eval(c(1.0)).unwrap() - c(1.0 - 0.5 / 0.5f64.tanh())).norm() < 1e-14);
    assert_eq!(f0.eval(c(0.0)).unwrap(), c(0.0));
    let trig = ScalarFun::trig_f0(c(2.0));
    let s = C64::new(0.4, 0.3);
    let closed = 0.5 / (s / 2.0).tanh() - 1.0 / s.tanh();
    assert!((trig.eval(s).unwrap() - closed).norm() < 1e-13);
    let shifted = ScalarFun::shifted_coth(c(1.0), 1, 3);
    let arg = s / 2.0 + C64::new(0.0, std::f64::consts::PI / 3.0);
    assert!((shifted.eval(s).unwrap() + 0.5 / arg.tanh()).norm() < 1e-13);
}

#[test]
fn w_as_printed_with_omega_13_does_not_vanish() {
    let (g, rd) = build_sl::<C64>(2).unwrap();
    let eps = c(0.5);
    let fm = rmat_fm(
        &g,
        &Automorphism::identity(&g).unwrap(),
        full_base(&g, &rd).unwrap(),
        eps,
    )
    .unwrap();
    let z = z_element(&g, eps).unwrap();
    let lambda = vec![
        C64::new(0.21, 0.03),
        C64::new(0.1, -0.05),
        C64::new(-0.07, 0.12),
    ];
    let w = w_residual(&fm.r_prime, &fm.base, &lambda, &z).unwrap();
    assert!(w.passed());
    assert!(w.metadata["w_alternative"].as_f64().unwrap() > 0.1);
}

#[test]
fn eta_sign_is_determined() {
    let (g, rd) = build_sl::<C64>(2).unwrap();
    let eps = c(2.0);
    let fm = rmat_fm(
        &g,
        &Automorphism::identity(&g).unwrap(),
        full_base(&g, &rd).unwrap(),
        eps,
    )
    .unwrap();
    let z = z_element(&g, eps).unwrap();
    let lambda = vec![
        C64::new(0.25, -0.1),
        C64::new(0.08, 0.02),
        C64::new(0.1, 0.1),
    ];
    assert!(cdybe_pl(&fm.r, &fm.base, &lambda, &z, 1.0)
        .unwrap()
        .passed());
    assert!(!cdybe_pl(&fm.r, &fm.base, &lambda, &z, -1.0)
        .unwrap()
        .passed());
}
