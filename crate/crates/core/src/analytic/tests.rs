use super::*;
use crate::channel::dbm_to_linear;
use approx::assert_relative_eq;

fn quadspec() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

fn fig3_params(kappa: bool, p_s_dbm: f64) -> SystemParams<f64> {
    let mut p = SystemParams::baseline();
    p.kappa = kappa;
    p.p_s = dbm_to_linear(p_s_dbm);
    p
}

fn theta_db(p: &mut SystemParams<f64>, db: f64) {
    p.theta = 10f64.powf(db / 10.0);
}

#[test]
fn rho_kernel_closed_form_alpha4() {
    let q = quadspec();
    for &theta in &[0.01, 0.1, 1.0, 10.0] {
        let num = rho_kernel(theta, 4.0, &q).unwrap();
        assert_relative_eq!(num, rho4_closed(theta), epsilon = 1e-9);
    }
    // frozen closed-form anchors
    assert_relative_eq!(rho4_closed(0.1), 0.096_853_408_234_039, epsilon = 1e-12);
    assert_relative_eq!(
        rho4_closed(1.0),
        std::f64::consts::FRAC_PI_4,
        epsilon = 1e-15
    );
    assert_relative_eq!(rho4_closed(10.0), 3.998_760_050_557_661, epsilon = 1e-12);
}

#[test]
fn rho_kernel_vanishes_at_small_theta() {
    let q = quadspec();
    let v = rho_kernel(1e-12, 4.0, &q).unwrap();
    assert!(v < 1e-5, "{v}");
    assert!(rho_kernel(-1.0, 4.0, &q).is_err());
    assert!(rho_kernel(1.0, 2.0, &q).is_err());
}

#[test]
fn rho_kernel_general_alpha() {
    // alpha = 3.5 exercises the integrable endpoint singularity of the
    // transformed integrand; the anchor comes from integrating the
    // original semi-infinite form at 30-digit precision.
    let q = quadspec();
    let v = rho_kernel(0.4, 3.5, &q).unwrap();
    assert_relative_eq!(v, 0.481_123_948_005, max_relative = 1e-7);
}

#[test]
fn beta_kernel_values() {
    assert_relative_eq!(beta_kernel(4.0).unwrap(), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    assert_relative_eq!(beta_kernel(3.5).unwrap(), 1.841_362_607_040_126_6, epsilon = 1e-12);
    assert!(matches!(
        beta_kernel(2.0),
        Err(Error::DivergentInterference { .. })
    ));
    assert!(beta_kernel(1.5).is_err());
    // approaching the pole from above blows up
    assert!(beta_kernel(2.0001).unwrap() > 1e3);
}

#[test]
fn p_bh_matches_independent_quadrature() {
    // anchors computed with an independent adaptive quadrature of the same
    // theorem integrands (scipy quad on the substituted forms)
    let q = quadspec();
    let mut p = fig3_params(false, 3.0);
    theta_db(&mut p, -20.0);
    assert_relative_eq!(p_bh_kappa0(&p, &q).unwrap().value, 0.583_736, epsilon = 2e-5);
    theta_db(&mut p, 0.0);
    assert_relative_eq!(p_bh_kappa0(&p, &q).unwrap().value, 0.105_589, epsilon = 2e-5);
    theta_db(&mut p, 20.0);
    assert_relative_eq!(p_bh_kappa0(&p, &q).unwrap().value, 0.010_815, epsilon = 2e-5);

    let mut p = fig3_params(true, 3.0);
    theta_db(&mut p, -10.0);
    assert_relative_eq!(p_bh_kappa1(&p, &q).unwrap().value, 0.281_182, epsilon = 2e-5);
    let mut p = fig3_params(true, 23.0);
    theta_db(&mut p, 0.0);
    assert_relative_eq!(p_bh_kappa1(&p, &q).unwrap().value, 0.093_352, epsilon = 2e-5);
}

#[test]
fn p_bh_limits_and_monotonicity() {
    let q = quadspec();
    // theta -> 0 drives success to 1
    let mut p = fig3_params(true, 3.0);
    p.theta = 1e-9;
    assert!(p_bh_kappa1(&p, &q).unwrap().value > 0.999);
    let mut p = fig3_params(false, 3.0);
    p.theta = 1e-9;
    assert!(p_bh_kappa0(&p, &q).unwrap().value > 0.999);

    // nonincreasing in theta across the grid
    let mut prev = 1.0f64;
    for i in 0..41 {
        let mut p = fig3_params(false, 3.0);
        theta_db(&mut p, -20.0 + i as f64);
        let v = p_bh_kappa0(&p, &q).unwrap().value;
        assert!(v <= prev + 1e-9);
        prev = v;
    }
}

#[test]
fn p_bh_ideal_sic_dominates_no_sic() {
    let q = quadspec();
    for i in 0..41 {
        let mut a = fig3_params(true, 3.0);
        theta_db(&mut a, -20.0 + i as f64);
        let mut b = a;
        a.gamma = 0.0;
        b.gamma = 1.0;
        assert!(
            p_bh_kappa1(&a, &q).unwrap().value >= p_bh_kappa1(&b, &q).unwrap().value - 1e-12
        );
    }
}

#[test]
fn p_bh_kappa0_reduces_to_rho_form_without_al_term() {
    // with Y2 = 0 the integral collapses to 1/(1 + rho(theta, 4))
    let q = quadspec();
    for &db in &[-20.0, -10.0, 0.0, 10.0, 20.0] {
        let mut p = fig3_params(false, 3.0);
        theta_db(&mut p, db);
        let v = p_bh_kappa0_with_y2(&p, 0.0, &q).unwrap().value;
        let closed = 1.0 / (1.0 + rho4_closed(p.theta));
        assert_relative_eq!(v, closed, epsilon = 1e-6);
    }
}

#[test]
fn p_bh_kappa_cases_agree_when_senbs_vanish() {
    // the kappa = 1 integral with lambda_s -> 0 is the kappa = 0 integral in
    // a different substitution
    let q = quadspec();
    let mut a = fig3_params(true, 3.0);
    a.lambda_s = 1e-300;
    let mut b = fig3_params(false, 3.0);
    b.lambda_s = 1e-300;
    for &db in &[-15.0, -5.0, 5.0, 15.0] {
        theta_db(&mut a, db);
        theta_db(&mut b, db);
        let k1 = p_bh_kappa1(&a, &q).unwrap().value;
        let k0 = p_bh_kappa0(&b, &q).unwrap().value;
        assert_relative_eq!(k1, k0, epsilon = 1e-7);
    }
}

#[test]
fn p_bh_rejects_wrong_exponent_and_kappa() {
    let q = quadspec();
    let mut p = fig3_params(true, 3.0);
    p.alpha_i = 3.5;
    assert!(matches!(
        p_bh_kappa1(&p, &q),
        Err(Error::UnsupportedExponent { .. })
    ));
    let p = fig3_params(false, 3.0);
    assert!(p_bh_kappa1(&p, &q).is_err());
    let p = fig3_params(true, 3.0);
    assert!(p_bh_kappa0(&p, &q).is_err());
}

#[test]
fn p_dl_closed_form() {
    // Fig. 4 configuration at theta = -10 dB: frozen against direct
    // evaluation of the closed form
    let mut p = SystemParams::baseline();
    p.lambda_m = 4e-6;
    p.lambda_s = 4e-5;
    p.kappa = true;
    theta_db(&mut p, -10.0);
    let v = p_dl(&p).unwrap().value;
    assert_relative_eq!(v, 0.994_652, epsilon = 2e-6);

    // no interference limit
    let mut p0 = p;
    p0.lambda_m = 1e-300;
    p0.lambda_s = 1e-300;
    p0.epsilon = 1e-300;
    assert_relative_eq!(p_dl(&p0).unwrap().value, 1.0, epsilon = 1e-9);
}

#[test]
fn p_dl_strictly_increasing_in_r_mu() {
    let mut p = SystemParams::baseline();
    p.lambda_m = 4e-6;
    p.lambda_s = 4e-5;
    p.kappa = true;
    theta_db(&mut p, -10.0);
    let mut prev = 0.0;
    for &r_mu in &[60.0, 100.0, 200.0, 350.0, 500.0] {
        p.r_mu = r_mu;
        let v = p_dl(&p).unwrap().value;
        assert!(v > prev, "r_mu {r_mu}: {v} <= {prev}");
        prev = v;
    }
}

#[test]
fn p_al_series_values() {
    // kappa = 0 baseline at theta = -10 dB (frozen against the vectorized
    // reference implementation of the same series)
    let p = SystemParams::<f64>::baseline();
    let r = p_al(&p).unwrap();
    assert_relative_eq!(r.value, 0.996_487_104_908, epsilon = 1e-9);
    assert!(r.warnings.is_empty());

    // kappa = 1 variant
    let mut p1 = p;
    p1.kappa = true;
    assert_relative_eq!(p_al(&p1).unwrap().value, 0.996_208_457_722, epsilon = 1e-9);
}

#[test]
fn p_al_degenerate_and_stability() {
    // K = 0 with vanishing interference -> 1
    let mut p = SystemParams::<f64>::baseline();
    p.k_factor = 0.0;
    p.gamma = 1e-30;
    assert_relative_eq!(p_al(&p).unwrap().value, 1.0, epsilon = 1e-9);

    // truncation stability: (70, 70) vs (90, 90)
    let p70 = SystemParams::<f64>::baseline();
    let mut p90 = p70;
    p90.j_max = 90;
    p90.q_max = 90;
    let d = (p_al(&p70).unwrap().value - p_al(&p90).unwrap().value).abs();
    assert!(d < 1e-6, "truncation drift {d}");
}

#[test]
fn p_al_k0_equals_laplace_exponential() {
    // at K = 0 the series is exactly exp(-Omega sqrt(theta)/P_a)
    let mut p = SystemParams::<f64>::baseline();
    p.k_factor = 0.0;
    for &db in &[-20.0, -10.0, 0.0, 10.0, 20.0] {
        theta_db(&mut p, db);
        let om = omega_kappa(&p).unwrap();
        let expect = (-om * p.theta.sqrt() / p.p_a.mw()).exp();
        assert_relative_eq!(p_al(&p).unwrap().value, expect, epsilon = 1e-10);
    }
}

#[test]
fn p_al_sum_order_invariance() {
    // canonical (j outer, m middle, q inner) Kahan sum vs fully reversed
    // accumulation of the same terms
    let p = SystemParams::<f64>::baseline();
    let om = omega_kappa(&p).unwrap();
    let series = AlSeries::new(p.k_factor, p.alpha_i, p.j_max, p.q_max);
    let x = om * p.theta.powf(0.5) / p.p_a.mw();
    let canonical = series.eval(x).value;

    let mut reversed = KahanSum::new();
    for j in (0..=p.j_max).rev() {
        for m in (0..=j).rev() {
            let n = j - m;
            let mut c = series.poisson[j] * series.inv_factorial[n];
            if n % 2 == 1 {
                c = -c;
            }
            let mut vq = vec![1.0f64];
            for q in 0..p.q_max {
                let last = vq[q];
                vq.push(last * -x / (q as f64 + 1.0));
            }
            for q in (0..=p.q_max).rev() {
                reversed.add(c * vq[q] * series.psi[n][q]);
            }
        }
    }
    assert!(
        (canonical - reversed.value()).abs() < 1e-12,
        "order drift {}",
        (canonical - reversed.value()).abs()
    );
}

#[test]
fn omega_kappa_values() {
    // frozen against direct evaluation
    let p = SystemParams::<f64>::baseline();
    assert_relative_eq!(omega_kappa(&p).unwrap(), 0.021_120_647_222_979_63, epsilon = 1e-12);
    let mut p1 = p;
    p1.kappa = true;
    assert_relative_eq!(omega_kappa(&p1).unwrap(), 0.022_798_319_865_466, max_relative = 1e-10);
    // gamma = 0 kills it
    let mut p0 = p;
    p0.gamma = 0.0;
    assert_eq!(omega_kappa(&p0).unwrap(), 0.0);
}

#[test]
fn xi_is_truncation_bound_but_finite_and_positive() {
    let p = SystemParams::<f64>::baseline();
    let xi = xi_value(&p).unwrap();
    assert_relative_eq!(xi, 2.237_310_118_101, max_relative = 1e-9);
    let mut p90 = p;
    p90.j_max = 90;
    p90.q_max = 90;
    let xi90 = xi_value(&p90).unwrap();
    assert!(xi90 > 1.0 && xi90 < 3.0, "{xi90}");
}

#[test]
fn power_control_round_trip() {
    let p = SystemParams::<f64>::baseline();
    let xi = xi_value(&p).unwrap();
    let mut prev_power = 0.0;
    for &target in &[0.3, 0.5, 0.7, 0.9] {
        assert!(target < xi);
        let pa = al_transmit_power(target, &p).unwrap();
        assert!(pa.mw() > prev_power, "power not increasing at {target}");
        prev_power = pa.mw();
        let back = p_al_exponential_form(pa, &p).unwrap();
        assert!((back - target).abs() < 1e-4, "round trip {back} vs {target}");
    }
    // limits
    assert!(al_transmit_power(0.0, &p).is_err());
    assert!(matches!(
        al_transmit_power(xi + 0.1, &p),
        Err(Error::Infeasible { .. })
    ));
    // target -> 0+ drives the power to 0+
    let tiny = al_transmit_power(1e-12, &p).unwrap().mw();
    assert!(tiny > 0.0 && tiny < al_transmit_power(0.5, &p).unwrap().mw() / 10.0);
}

#[test]
fn success_link_params_structure() {
    let p = SystemParams::<f64>::baseline();
    let (y1, y2) = success_link_params(&p, 0.9).unwrap();
    assert!(y1 > 0.0 && y2 > 0.0);
    // Y1/Y2 = 1/(pi^2 lambda_m^2) identically
    let expect = 1.0 / (std::f64::consts::PI.powi(2) * p.lambda_m * p.lambda_m);
    assert_relative_eq!(y1 / y2, expect, max_relative = 1e-12);

    // gamma = 0 zeroes both... (the power law itself degenerates, so build
    // the coefficients directly)
    let mut p0 = p;
    p0.gamma = 0.0;
    assert_eq!(y1_coefficient(&p0, 1.0), 0.0);
    assert_eq!(y2_coefficient(&p0, 1.0), 0.0);
}

#[test]
fn power_control_consistency_with_direct_substitution() {
    // feeding Y1/Y2 from the power law into Theorem 1 must equal evaluating
    // Theorem 1 with P_a from the power law
    let q = quadspec();
    let mut p = SystemParams::<f64>::baseline();
    theta_db(&mut p, -10.0);
    let target = 0.9;
    let pa = al_transmit_power(target, &p).unwrap();
    let (y1, y2) = success_link_params(&p, target).unwrap();
    assert_relative_eq!(y1, y1_coefficient(&p, pa.mw()), max_relative = 1e-12);

    let direct = p_bh_kappa0_with_y2(&p, y2_coefficient(&p, pa.mw()), &q).unwrap();
    let via_params = p_bh_kappa0_with_y2(&p, y2, &q).unwrap();
    assert_relative_eq!(direct.value, via_params.value, epsilon = 1e-9);

    let mut p1 = p;
    p1.kappa = true;
    let direct = p_bh_kappa1_with_y1(&p1, y1_coefficient(&p1, pa.mw()), &q).unwrap();
    let via = p_bh_kappa1_with_y1(&p1, y1, &q).unwrap();
    assert_relative_eq!(direct.value, via.value, epsilon = 1e-9);
}

#[test]
fn ergodic_bh_rate_anchors() {
    // anchors from 30-digit quadrature of the same double integral (inner
    // sigma integral carried out on the u = 1/sigma - 1 half-line)
    let q = quadspec();
    let mut p = SystemParams::<f64>::baseline();
    p.gamma = 0.0;
    let r = ergodic_rate_bh(&p, &q).unwrap();
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert_relative_eq!(r.value, 1.488_987_624_67, max_relative = 1e-6);
    p.gamma = 1.0;
    assert_relative_eq!(
        ergodic_rate_bh(&p, &q).unwrap().value,
        0.303_982_950_233,
        max_relative = 1e-6
    );
    p.lambda_m = 4e-6;
    assert_relative_eq!(
        ergodic_rate_bh(&p, &q).unwrap().value,
        0.501_005_671_696,
        max_relative = 1e-6
    );
    // small cells active
    let mut pk = SystemParams::<f64>::baseline();
    pk.kappa = true;
    assert_relative_eq!(
        ergodic_rate_bh(&pk, &q).unwrap().value,
        0.300_135_659_725,
        max_relative = 1e-6
    );
}

#[test]
fn ergodic_bh_rate_nonincreasing_in_al_coupling() {
    let q = quadspec();
    let mut vals = vec![];
    for &gamma in &[0.0, 0.3, 1.0] {
        let mut p = SystemParams::<f64>::baseline();
        p.gamma = gamma;
        vals.push(ergodic_rate_bh(&p, &q).unwrap().value);
    }
    assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
}

#[test]
fn ergodic_dl_rate_anchor_and_blowup_flag() {
    let q = quadspec();
    let mut p = SystemParams::<f64>::baseline();
    p.lambda_m = 4e-6;
    p.lambda_s = 4e-5;
    p.kappa = true;
    let r = ergodic_rate_dl(&p, &q).unwrap();
    assert_relative_eq!(r.value, 4.861_297_720_89, max_relative = 1e-6);
    assert!(r.warnings.is_empty());

    // nondecreasing in r_mu
    let mut prev = 0.0;
    for &r_mu in &[60.0, 150.0, 500.0] {
        p.r_mu = r_mu;
        let v = ergodic_rate_dl(&p, &q).unwrap().value;
        assert!(v >= prev);
        prev = v;
    }

    // near-interference-free input produces a finite large value with the
    // warning raised
    let mut p0 = SystemParams::<f64>::baseline();
    p0.lambda_m = 1e-9;
    p0.lambda_s = 1e-8;
    let r = ergodic_rate_dl(&p0, &q).unwrap();
    assert!(r.value.is_finite() && r.value > 10.0, "{}", r.value);
    assert!(r.warnings.contains(&Warning::NearInterferenceFree));
    assert_relative_eq!(r.value, 11.734_396_676_8, max_relative = 1e-6);
}

#[test]
fn ergodic_al_rate_anchors() {
    let q = quadspec();
    let p = SystemParams::<f64>::baseline();
    let r = ergodic_rate_al(&p, &q).unwrap();
    assert_relative_eq!(r.value, 7.720_937, max_relative = 5e-5);

    // K = 0 equals direct quadrature of the Laplace survival (anchor from
    // 30-digit integration of exp(-Omega sqrt(e^psi - 1)))
    let mut p0 = p;
    p0.k_factor = 0.0;
    let r0 = ergodic_rate_al(&p0, &q).unwrap();
    assert_relative_eq!(r0.value, 6.624_792_248_06, max_relative = 1e-5);

    // gamma -> 0 diverges: exact zero is an error, tiny gamma is a flagged
    // large value
    let mut pg = p;
    pg.gamma = 0.0;
    assert!(ergodic_rate_al(&pg, &q).is_err());
    pg.gamma = 1e-6;
    let r = ergodic_rate_al(&pg, &q).unwrap();
    assert!(r.value > 10.0);
    assert!(r.warnings.contains(&Warning::NearInterferenceFree));
}

#[test]
fn quadrature_spec_defaults() {
    let q = QuadratureSpec::<f64>::default();
    assert_eq!(q.abs_tol, 1e-9);
    assert_eq!(q.rel_tol, 1e-7);
    assert_eq!(q.max_subdivisions, 2000);
}

#[test]
fn analytic_works_in_f32_at_reduced_truncation() {
    // the gamma-ratio magnitudes at j_max = 70 need f64 range; a reduced
    // truncation keeps everything inside f32
    let mut p = SystemParams::<f32>::baseline();
    p.j_max = 20;
    p.q_max = 20;
    let q = QuadratureSpec::<f32> {
        abs_tol: 1e-5,
        rel_tol: 1e-4,
        max_subdivisions: 500,
    };
    let v = p_bh_kappa0(&p, &q).unwrap().value;
    assert!((v - 0.2842).abs() < 1e-2, "{v}");
    let v = p_al(&p).unwrap().value;
    assert!((v - 0.9965).abs() < 1e-2, "{v}");
}
