use serde::Deserialize;

use steinlab::bounds::bound_thm_i;
use steinlab::coupling::{nd_condition_p, validate_coupling, SizeBiasCoupling};
use steinlab::dist::{make_pmf, tv_distance, Pmf, TruncationPolicy};

#[derive(Deserialize)]
struct Case {
    name: String,
    base: Vec<f64>,
    #[serde(flatten)]
    coupling: SizeBiasCoupling,
    p_max: f64,
}

fn cases() -> Vec<Case> {
    serde_json::from_str(include_str!("fixtures/three_point_couplings.json")).unwrap()
}

#[test]
fn fixture_tables_are_valid_couplings() {
    for c in cases() {
        let base = make_pmf(&c.base).unwrap();
        let r = validate_coupling(&c.coupling, &base).unwrap();
        assert!(r.passes, "{}: {r:?}", c.name);
    }
}

#[test]
fn fixture_p_values() {
    for c in cases() {
        let p = nd_condition_p(&c.coupling);
        assert!((p - c.p_max).abs() <= 1e-15, "{}: {p}", c.name);
    }
}

#[test]
fn fixture_bounds_dominate_exact_distance() {
    for c in cases() {
        let base = make_pmf(&c.base).unwrap();
        let (mu, var) = base.moments();
        let b = bound_thm_i(mu, var, c.p_max, mu).unwrap();
        let target = Pmf::poisson(mu, TruncationPolicy::default()).unwrap();
        let tv = tv_distance(&base, &target);
        assert!(tv.value <= b.total + tv.error, "{}", c.name);
    }
}

#[test]
fn coupling_roundtrips_through_json() {
    for c in cases() {
        let text = serde_json::to_string(&c.coupling).unwrap();
        let back: SizeBiasCoupling = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c.coupling);
    }
}
