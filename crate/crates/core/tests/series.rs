use borel_core::series::{bender_wu_expand, excited_expand, extend_w_series, ode_residual, semiclassical_expand, ScalarSeries};
use borel_core::spectrum::{b2_series, b3_series, energy_series};
use borel_core::ExactRational;

fn rationals(v: &[&str]) -> Vec<ExactRational> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn energy_series_through_sixth_order() {
    let e = energy_series(6).unwrap();
    let want = rationals(&["1", "3/4", "-21/16", "333/64", "-30885/1024", "916731/4096", "-65518401/32768"]);
    assert_eq!(e.coeffs[..7], want[..]);
}

#[test]
fn b2_series_through_sixth_order() {
    let b = b2_series(6).unwrap();
    let want = rationals(&["1", "5/8", "-35/32", "2555/512", "-69545/2048", "4849705/16384", "-202337485/65536"]);
    assert_eq!(b.coeffs[..7], want[..]);
}

#[test]
fn b2_signs_alternate_after_leading_pair() {
    let b = b2_series(100).unwrap();
    for n in 1..=100 {
        let want = if n % 2 == 1 { 1 } else { -1 };
        assert_eq!(b.coeffs[n].signum(), want, "order {n}");
    }
}

#[test]
fn ground_state_has_no_b3() {
    let (_, b3) = excited_expand(0, 1, 10).unwrap();
    assert!(b3.coeffs.iter().all(ExactRational::is_zero));
}

#[test]
fn first_excited_b3_leading_coefficient() {
    let b3 = b3_series(1, 4).unwrap();
    assert_eq!(b3.coeffs[1].abs(), ExactRational::from_int(2));
}

#[test]
fn excited_leading_coefficient_scales_with_level() {
    for q in 1..=5usize {
        let b3 = b3_series(q, 3).unwrap();
        assert_eq!(b3.coeffs[1].abs(), ExactRational::from_int(2 * q as i64), "q = {q}");
    }
}

#[test]
fn harmonic_w_series_truncates() {
    let w = extend_w_series(&ExactRational::new(-1, 2), &ExactRational::zero(), &ExactRational::zero(), 10).unwrap();
    assert!(w.coeffs[1..].iter().all(ExactRational::is_zero));
    assert_eq!(w.energy(), ExactRational::one());
    let r = ode_residual(&w, &w.energy(), &w.rho(), &w.coupling());
    assert!(r.iter().all(ExactRational::is_zero));
}

#[test]
fn bender_wu_and_semiclassical_agree_on_json_round_trip() {
    let (_, e) = bender_wu_expand(7, 6).unwrap();
    let back = ScalarSeries::from_json(&e.to_json()).unwrap();
    assert_eq!(back, e);
    let (_, b) = semiclassical_expand(3, 6).unwrap();
    assert_eq!(ScalarSeries::from_json(&b.to_json()).unwrap(), b);
}
