use lrgeom::chern::{transgression_check, TraceCarrier};
use lrgeom::examples;
use lrgeom::gauge::gauge_certificates;
use lrgeom::lie::{Form, Mat};
use lrgeom::random::Sampler;
use lrgeom::scenario::{load, MainConnection, Scenario};

fn scenario(name: &str) -> Scenario {
    load(examples::build(name).unwrap(), None).unwrap()
}

#[test]
fn gauge_identities_for_twenty_unipotent_elements() {
    let sc = scenario("gauge-cone");
    let Some(MainConnection::Given(conn)) = &sc.connection else { panic!("gauge-cone has a given connection") };
    let pres = &sc.pres;
    let mut s = Sampler::new(20240607, pres.vars().n_coords());
    s.max_degree = 1;
    for round in 0..20 {
        let g = s.unipotent(2, &pres.ring);
        let h = s.unipotent(2, &pres.ring);
        let eta = s.one_form(pres.len(), 2);
        let entries = gauge_certificates(&g, &h, conn, pres, &eta).unwrap();
        assert_eq!(entries.len(), 6);
        for e in entries {
            assert!(e.passed(), "round {round}: {} failed: {:?}", e.task, e.witnesses);
        }
    }
}

#[test]
fn gauge_suite_refuses_non_free_carriers() {
    let sc = scenario("double-cone");
    let Some(MainConnection::Given(conn)) = &sc.connection else { panic!() };
    let g = lrgeom::gauge::GaugeElement::identity(4);
    let eta = Form::zero(1, sc.pres.len(), (4, 4));
    assert!(gauge_certificates(&g, &g, conn, &sc.pres, &eta).is_err());
}

#[test]
fn transgression_for_squares_on_the_sphere_with_random_eta() {
    let sc = scenario("sphere-idempotent");
    let theta = sc.idempotent.clone().unwrap();
    let pres = &sc.pres;
    let mut s = Sampler::new(7, pres.vars().n_coords());
    s.max_degree = 1;
    s.max_terms = 2;
    for _ in 0..3 {
        let t = theta.matrix();
        let mats: Vec<Mat> = (0..pres.len()).map(|_| (&(t * &s.matrix(3, 3)) * t).nf(&pres.ring)).collect();
        let eta = Form::from_fn(1, pres.len(), (3, 3), |k| mats[k[0]].clone());
        let entries = transgression_check(&TraceCarrier::Projective(theta.clone()), pres, &eta, 2).unwrap();
        assert!(entries.iter().all(|e| e.passed()), "{entries:?}");
    }
}

#[test]
fn transgression_on_a_free_module() {
    let sc = scenario("gauge-cone");
    let Some(MainConnection::Given(conn)) = &sc.connection else { panic!() };
    let pres = &sc.pres;
    let mut s = Sampler::new(99, pres.vars().n_coords());
    s.max_degree = 1;
    for m in 1..=2 {
        let eta = s.one_form(pres.len(), 2);
        let entries = transgression_check(&TraceCarrier::Free(conn.clone()), pres, &eta, m).unwrap();
        assert!(entries.iter().all(|e| e.passed()), "{entries:?}");
    }
}

#[test]
fn sampler_is_deterministic() {
    let mut a = Sampler::new(5, 3);
    let mut b = Sampler::new(5, 3);
    for _ in 0..10 {
        assert_eq!(a.poly(), b.poly());
    }
}
