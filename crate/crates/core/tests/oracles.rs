//! Oracle and demo checks against reference values computed independently
//! (50-digit mpmath evaluations of log-gamma and the θ integrals), frozen
//! here as decimal strings.

use envelope::demo::{find_envelope_violation, linear_grid, scan_envelope_violations, ViolationMode};
use envelope::oracle::{
    binet_j, binet_j_tilde, coefficient_quadrature, exact_ln_gamma_half, integrate_half_line, remainder_quadrature,
    theta_ratio, QuadratureSpec, ThetaFamily,
};
use envelope::series::{Evaluator, SeriesKind, Truncation};
use envelope::{Error, Real};

const P: u32 = 256;

fn real(s: &str) -> Real {
    Real::with_val(P, Real::parse(s).unwrap())
}

fn close(a: &Real, reference: &str, tol: f64) -> bool {
    let r = real(reference);
    let diff = Real::with_val(P, a - &r).abs();
    diff <= Real::with_val(P, r.abs()) * tol
}

#[test]
fn binet_function_reference_values() {
    let spec = QuadratureSpec::new(P).unwrap();
    for (z, reference) in [
        ("1", "0.081061466795327258219670263594382360138602526362216"),
        ("10", "0.0083305634333628712564693186596285522092876400520223"),
        ("0.5", "0.15342640972002734529138393927091171596224993281987"),
    ] {
        let j = binet_j(&real(z), &spec).unwrap();
        assert!(close(&j.value, reference, 1e-45), "J({z}) = {}", j.value);
        assert!(j.error < 1e-40);
    }
}

#[test]
fn binet_tilde_reference_values() {
    let spec = QuadratureSpec::new(P).unwrap();
    for (z, reference) in [
        ("1", "-0.1207822376352452223455184457816472122518527279026"),
        ("5", "-0.024958818946279513069920412087558230085487146062777"),
    ] {
        let j = binet_j_tilde(&real(z), &spec).unwrap();
        assert!(close(&j.value, reference, 1e-45), "J̃({z}) = {}", j.value);
    }
}

#[test]
fn theta_reference_values() {
    let spec = QuadratureSpec::new(P).unwrap();
    let t = theta_ratio(ThetaFamily::Theta, 0, &real("1"), &spec).unwrap();
    assert!(close(&t.value, "0.9727376015439270986360431631325883216632303163466", 1e-45));
    let t = theta_ratio(ThetaFamily::Theta, 1, &real("5"), &spec).unwrap();
    assert!(close(&t.value, "0.98889645804635265623105818829739836756731241690763", 1e-45));
}

#[test]
fn theta_ratio_tends_to_one_for_large_z() {
    let spec = QuadratureSpec::new(P).unwrap();
    for family in ThetaFamily::ALL {
        let near = theta_ratio(family, 1, &real("100"), &spec).unwrap();
        let far = theta_ratio(family, 1, &real("0.5"), &spec).unwrap();
        assert!(near.value > far.value, "{family}");
        assert!(near.value > 0.999 && near.value < 1);
    }
}

#[test]
fn remainder_quadrature_matches_series_remainder() {
    // r_k(z) = J(z) - S_k(z); both sides independent of each other.
    let spec = QuadratureSpec::new(P).unwrap();
    let ev = Evaluator::new(P).unwrap();
    let z = real("3");
    let j = binet_j(&z, &spec).unwrap();
    for k in 0..6 {
        let r = remainder_quadrature(ThetaFamily::Theta, k, &z, &spec).unwrap();
        let direct = Real::with_val(P, &j.value - ev.partial_sum(SeriesKind::BinetJ, &z, k).unwrap());
        let diff = Real::with_val(P, &r.value - &direct).abs();
        assert!(diff < 1e-60, "k = {k}: {diff}");
    }
}

#[test]
fn coefficient_quadrature_at_higher_precision() {
    let spec = QuadratureSpec::new(512).unwrap();
    let e = coefficient_quadrature(ThetaFamily::ThetaHat, 6, &spec).unwrap();
    let exact = Real::with_val(600, 8191) / 1277952u32;
    let rel = Real::with_val(600, &e.value - &exact).abs() / &exact;
    assert!(rel < 1e-60, "{rel}");
}

#[test]
fn quadrature_rejects_target_below_working_floor() {
    assert!(QuadratureSpec::with_target(P, Real::with_val(P, 1) >> 300u32).is_err());
    let spec = QuadratureSpec::with_target(P, real("1e-20")).unwrap();
    let e = integrate_half_line(&spec, |x| (-x.clone()).exp()).unwrap();
    assert!(Real::with_val(P, &e.value - 1u32).abs() < 1e-20);
}

#[test]
fn ln_gamma_examples() {
    let ev = Evaluator::new(P).unwrap();
    let tol = Truncation::Tolerance(real("1e-12"));
    // ln Γ(6) = ln 120
    let v = ev.ln_gamma(&real("6"), &Truncation::Terms(4)).unwrap();
    assert!(v.contains(&Real::with_val(P, 120).ln()));
    // ln Γ(20.5), exact from (39)!! √π / 2^20
    let v = ev.ln_gamma_plus_half(&real("20"), &tol).unwrap();
    assert!(v.contains(&exact_ln_gamma_half(20, P + 64)));
    assert!(v.error_bound <= 1e-12);
    let v = ev.ln_gamma(&real("20.5"), &tol).unwrap();
    assert!(v.contains(&exact_ln_gamma_half(20, P + 64)));
    assert!(close(&v.value, "40.83150097453079810977608746076652040769425287526", 1e-13));
}

#[test]
fn central_binomial_small_n() {
    let ev = Evaluator::new(P).unwrap();
    // ln C(2, 1) = ln 2 from two terms.
    let v = ev.ln_central_binomial(1, &Truncation::Terms(2)).unwrap();
    assert!(v.contains(&Real::with_val(P, 2).ln()));
    assert!(ev.ln_central_binomial(0, &Truncation::Terms(2)).is_err());
}

#[test]
fn binet_envelope_example() {
    let ev = Evaluator::new(P).unwrap();
    let iv = ev.envelope_interval(SeriesKind::BinetJ, &real("1"), 0).unwrap();
    assert_eq!(iv.lo, 0);
    assert!(iv.hi >= Real::with_val(P, 1) / 12u32);
    assert!(iv.contains(&real("0.081061466795327258219670263594382360138602526362216")));
}

#[test]
fn witness_near_ten_and_control_is_clean() {
    let spec = QuadratureSpec::new(P).unwrap();
    let grid = linear_grid(&real("5"), &real("20"), 15, P);
    assert_eq!(grid.len(), 16);
    let b = real("1");
    let first = find_envelope_violation(&b, &grid, 5, &spec).unwrap().expect("a witness");
    assert_eq!(first.mode, ViolationMode::MagnitudeExceeded);

    let all = scan_envelope_violations(Some(&b), &grid, 5, &spec).unwrap();
    let at_ten = all.iter().find(|w| w.x == 10 && w.k == 1).expect("witness at x = 10, k = 1");
    // e^{-10} - remainder of J is what the witness sees.
    assert!(close(&at_ten.remainder, "0.000042630029792022774671576841855769486192224807555483", 1e-40));
    assert!(at_ten.remainder > at_ten.next_term_bound);

    assert!(scan_envelope_violations(None, &grid, 5, &spec).unwrap().is_empty());
}

#[test]
fn witnesses_survive_doubled_precision() {
    let b = real("1");
    let grid = linear_grid(&real("6"), &real("18"), 4, P);
    let found = scan_envelope_violations(Some(&b), &grid, 4, &QuadratureSpec::new(P).unwrap()).unwrap();
    assert!(!found.is_empty());

    let p2 = 2 * P;
    let spec2 = QuadratureSpec::new(p2).unwrap();
    let b2 = Real::with_val(p2, &b);
    for w in &found {
        let x2 = [Real::with_val(p2, &w.x)];
        let again = scan_envelope_violations(Some(&b2), &x2, w.k.max(1), &spec2).unwrap();
        let same = again.iter().find(|v| v.k == w.k).expect("witness reappears");
        assert_eq!(same.mode, w.mode);
        let drift = Real::with_val(p2, &same.remainder - &w.remainder).abs();
        assert!(drift <= Real::with_val(p2, &w.error * 10u32), "x = {}, k = {}", w.x, w.k);
    }
}

#[test]
fn demo_rate_must_stay_below_two_pi() {
    let spec = QuadratureSpec::new(P).unwrap();
    let grid = linear_grid(&real("5"), &real("6"), 1, P);
    for b in ["0", "6.3", "-1"] {
        assert!(matches!(
            find_envelope_violation(&real(b), &grid, 2, &spec),
            Err(Error::Domain(_))
        ));
    }
}
