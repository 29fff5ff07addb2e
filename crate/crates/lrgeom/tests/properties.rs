use std::sync::OnceLock;

use lrgeom::connection::{
    curvature_matrix, perturbation_defect, second_derivative_defect, Connection, ModuleCarrier, Valued,
};
use lrgeom::examples;
use lrgeom::lie::{cup, ddr, Form, Mat};
use lrgeom::poly::{Frac, Poly};
use lrgeom::random::Sampler;
use lrgeom::scenario::{load, Scenario};
use proptest::prelude::*;

/// Presentations whose generators close into a Lie algebra, some with syzygies.
fn scenarios() -> &'static [Scenario] {
    static CELL: OnceLock<Vec<Scenario>> = OnceLock::new();
    CELL.get_or_init(|| {
        ["cone-flat-families", "sphere-idempotent", "a2-orbit-flat", "two-dim-metric"]
            .iter()
            .map(|n| load(examples::build(n).unwrap(), None).unwrap())
            .collect()
    })
}

fn pick(index: usize, seed: u64) -> (&'static Scenario, Sampler) {
    let sc = &scenarios()[index % scenarios().len()];
    let mut s = Sampler::new(seed, sc.pres.vars().n_coords());
    s.max_degree = 2;
    s.max_terms = 2;
    (sc, s)
}

fn scalar_form(s: &mut Sampler, arity: usize, gens: usize) -> Form {
    let mut f = Form::zero(arity, gens, (1, 1));
    for t in lrgeom::lie::combinations(gens, arity) {
        f.set(&t, Mat::scalar(Frac::from(s.poly())));
    }
    f
}

fn random_connection(s: &mut Sampler, gens: usize, rank: usize) -> Connection {
    let gamma = (0..gens).map(|_| s.matrix(rank, rank)).collect();
    Connection::new(ModuleCarrier::free(rank), gamma, Vec::new()).unwrap()
}

/// `∇_i∇_j − ∇_j∇_i − ∇_[X_i,X_j]` on the identity frame, computed directly.
fn explicit_curvature(conn: &Connection, sc: &Scenario, i: usize, j: usize) -> Mat {
    let pres = &sc.pres;
    let id = Mat::identity(conn.rank());
    let nab = |k: usize, m: &Mat| conn.act(pres, k, m, Valued::Section);
    let mut r = &nab(i, &nab(j, &id)) - &nab(j, &nab(i, &id));
    for k in 0..pres.len() {
        let c = Frac::from(pres.c(i, j, k).clone());
        r = &r - &nab(k, &id).scale(&c);
    }
    r.nf(&pres.ring)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn de_rham_differential_squares_to_zero(which in 0usize..4, seed in any::<u64>(), arity in 0usize..2) {
        let (sc, mut s) = pick(which, seed);
        let omega = scalar_form(&mut s, arity, sc.pres.len());
        prop_assert!(ddr(&ddr(&omega, &sc.pres), &sc.pres).is_zero_mod(&sc.pres.ring));
    }

    #[test]
    fn cup_product_is_graded_commutative(which in 0usize..4, seed in any::<u64>(), k in 0usize..3, m in 0usize..2) {
        let (sc, mut s) = pick(which, seed);
        let l = sc.pres.len();
        prop_assume!(k + m <= l);
        let a = scalar_form(&mut s, k, l);
        let b = scalar_form(&mut s, m, l);
        let ab = cup(&a, &b, &sc.pres.ring);
        let ba = cup(&b, &a, &sc.pres.ring);
        let expected = if (k * m) % 2 == 0 { ba } else { ba.scale(&-Frac::one()) };
        prop_assert!(ab.sub(&expected).is_zero_mod(&sc.pres.ring));
    }

    #[test]
    fn leibniz_rule_for_cup(which in 0usize..4, seed in any::<u64>(), k in 0usize..2) {
        let (sc, mut s) = pick(which, seed);
        let l = sc.pres.len();
        let (ring, pres) = (&sc.pres.ring, &sc.pres);
        let a = scalar_form(&mut s, k, l);
        let b = scalar_form(&mut s, 0, l);
        let lhs = ddr(&cup(&a, &b, ring), pres);
        let sign = if k % 2 == 0 { Frac::one() } else { -Frac::one() };
        let rhs = cup(&ddr(&a, pres), &b, ring).add(&cup(&a, &ddr(&b, pres), ring).scale(&sign));
        prop_assert!(lhs.sub(&rhs).is_zero_mod(ring));
    }

    #[test]
    fn curvature_is_antisymmetric(which in 0usize..4, seed in any::<u64>(), rank in 1usize..3) {
        let (sc, mut s) = pick(which, seed);
        let l = sc.pres.len();
        let conn = random_connection(&mut s, l, rank);
        let r = curvature_matrix(&conn, &sc.pres);
        for i in 0..l {
            for j in 0..l {
                let direct = explicit_curvature(&conn, sc, i, j);
                let swapped = explicit_curvature(&conn, sc, j, i);
                prop_assert!((&direct + &swapped).is_zero_mod(&sc.pres.ring));
                if i != j {
                    prop_assert!((&direct - &r.get(&[i, j])).is_zero_mod(&sc.pres.ring));
                } else {
                    prop_assert!(direct.is_zero_mod(&sc.pres.ring));
                }
            }
        }
    }

    #[test]
    fn second_covariant_derivative_is_curvature(which in 0usize..4, seed in any::<u64>(), rank in 1usize..3) {
        let (sc, mut s) = pick(which, seed);
        let conn = random_connection(&mut s, sc.pres.len(), rank);
        let v = s.matrix(1, rank);
        prop_assert!(second_derivative_defect(&conn, &sc.pres, &v).is_zero_mod(&sc.pres.ring));
    }

    #[test]
    fn perturbed_curvature_formula(which in 0usize..4, seed in any::<u64>(), rank in 1usize..3) {
        let (sc, mut s) = pick(which, seed);
        let l = sc.pres.len();
        let conn = random_connection(&mut s, l, rank);
        let eta = s.one_form(l, rank);
        prop_assert!(perturbation_defect(&conn, &sc.pres, &eta).is_zero_mod(&sc.pres.ring));
    }

    #[test]
    fn normal_form_is_confluent(which in 0usize..4, seed in any::<u64>(), rotate in 0usize..4) {
        let (sc, mut s) = pick(which, seed);
        let ideal = &sc.pres.ring.ideal;
        let p = s.poly();
        let mut shifted = p.clone();
        for g in ideal.generators() {
            shifted = &shifted + &(&s.poly() * g);
        }
        let nf = ideal.normal_form(&p);
        prop_assert_eq!(&ideal.normal_form(&shifted), &nf);
        prop_assert_eq!(&ideal.normal_form(&nf), &nf);
        let n = ideal.basis().len();
        let perm: Vec<usize> = (0..n).map(|i| (i + rotate) % n.max(1)).collect();
        prop_assert_eq!(&ideal.normal_form_with_permutation(&shifted, &perm), &nf);
        prop_assert!(ideal.contains(&(&shifted - &p)));
    }
}

#[test]
fn product_of_polynomials_never_leaves_the_ideal_class() {
    let sc = &scenarios()[0];
    let ideal = &sc.pres.ring.ideal;
    let g = &ideal.generators()[0];
    let p = Poly::coord(0);
    assert!(ideal.contains(&(&p * g)));
    assert!(!ideal.contains(&p));
}
