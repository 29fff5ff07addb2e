//! Buchberger bases and normal forms.

use std::sync::OnceLock;

use num::One;
use thiserror::Error;

use crate::linsolve::solve_combination;
use crate::poly::{Coeff, Frac, Monomial, MonomialOrder, Poly, VarTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("no generator combination found up to degree {bound}")]
    CofactorBound { bound: u32 },
}

/// Leading term of `p` under `order`.
pub fn leading(p: &Poly, order: MonomialOrder) -> Option<(&Monomial, &Coeff)> {
    match order {
        MonomialOrder::Grevlex => p.leading(),
        MonomialOrder::Lex => p.terms().max_by(|a, b| a.0.lex_cmp(b.0)),
    }
}

fn make_monic(p: &Poly, order: MonomialOrder) -> Poly {
    match leading(p, order) {
        Some((_, c)) if !c.is_one() => p.scale(&c.recip()),
        _ => p.clone(),
    }
}

fn s_polynomial(f: &Poly, g: &Poly, order: MonomialOrder) -> Poly {
    let (mf, cf) = leading(f, order).expect("nonzero");
    let (mg, cg) = leading(g, order).expect("nonzero");
    let l = mf.lcm(mg);
    let mut s = f.mul_monomial(&mf.quotient_of(&l)).scale(&cf.recip());
    s.add_scaled(g, &(-cg.recip()), &mg.quotient_of(&l));
    s
}

/// Full reduction of `p` by `basis`. `leads` caches the leading monomials and coefficients.
fn reduce(p: &Poly, basis: &[Poly], leads: &[(Monomial, Coeff)], order: MonomialOrder) -> Poly {
    let mut rest = p.clone();
    let mut rem = Poly::zero();
    while let Some((m, c)) = leading(&rest, order).map(|(m, c)| (m.clone(), c.clone())) {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let q = leads[k].0.quotient_of(&m);
                let f = &c / &leads[k].1;
                rest.add_scaled(&basis[k], &(-f), &q);
            }
            None => {
                rest.add_term(m.clone(), -c.clone());
                rem.add_term(m, c);
            }
        }
    }
    rem
}

/// Division with quotient tracking against an ordered list of divisors.
pub fn divide(p: &Poly, divisors: &[Poly], order: MonomialOrder) -> (Vec<Poly>, Poly) {
    let leads: Vec<Option<(Monomial, Coeff)>> =
        divisors.iter().map(|d| leading(d, order).map(|(m, c)| (m.clone(), c.clone()))).collect();
    let mut quots = vec![Poly::zero(); divisors.len()];
    let mut rest = p.clone();
    let mut rem = Poly::zero();
    while let Some((m, c)) = leading(&rest, order).map(|(m, c)| (m.clone(), c.clone())) {
        let hit = leads.iter().position(|l| l.as_ref().is_some_and(|(lm, _)| lm.divides(&m)));
        match hit {
            Some(k) => {
                let (lm, lc) = leads[k].as_ref().unwrap();
                let q = lm.quotient_of(&m);
                let f = &c / lc;
                rest.add_scaled(&divisors[k], &(-f.clone()), &q);
                quots[k].add_term(q, f);
            }
            None => {
                rest.add_term(m.clone(), -c.clone());
                rem.add_term(m, c);
            }
        }
    }
    (quots, rem)
}

/// Reduced Gröbner basis by Buchberger's algorithm with normal selection and
/// the product and chain criteria. The result is monic and sorted by leading monomial.
pub fn buchberger(gens: &[Poly], order: MonomialOrder) -> Vec<Poly> {
    let mut basis: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).map(|g| make_monic(g, order)).collect();
    if basis.iter().any(|g| g.as_constant().is_some()) {
        return vec![Poly::one()];
    }
    let lm = |p: &Poly| leading(p, order).unwrap().0.clone();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut done: std::collections::HashSet<(usize, usize)> = Default::default();
    while !pairs.is_empty() {
        // normal selection: smallest lcm first, ties by index for determinism
        let (best, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = lm(&basis[a.0]).lcm(&lm(&basis[a.1]));
                let lb = lm(&basis[b.0]).lcm(&lm(&basis[b.1]));
                order.cmp(&la, &lb).then(a.cmp(b))
            })
            .unwrap();
        let (i, j) = pairs.remove(best);
        done.insert((i, j));
        let (li, lj) = (lm(&basis[i]), lm(&basis[j]));
        if li.coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(&basis[k]).divides(&l)
                && done.contains(&key(i, k))
                && done.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j], order);
        let leads: Vec<(Monomial, Coeff)> =
            basis.iter().map(|b| leading(b, order).map(|(m, c)| (m.clone(), c.clone())).unwrap()).collect();
        let r = reduce(&s, &basis, &leads, order);
        if r.is_zero() {
            continue;
        }
        if r.as_constant().is_some() {
            return vec![Poly::one()];
        }
        let n = basis.len();
        basis.push(make_monic(&r, order));
        for k in 0..n {
            pairs.push((k, n));
        }
    }
    interreduce(basis, order)
}

fn interreduce(basis: Vec<Poly>, order: MonomialOrder) -> Vec<Poly> {
    let lm = |p: &Poly| leading(p, order).unwrap().0.clone();
    let mut minimal: Vec<Poly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let m = lm(g);
        let redundant = basis.iter().enumerate().any(|(t, h)| {
            let hm = lm(h);
            t != k && hm.divides(&m) && (hm != m || t < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Poly> = minimal.iter().enumerate().filter(|(t, _)| *t != k).map(|(_, p)| p.clone()).collect();
        let leads: Vec<(Monomial, Coeff)> =
            others.iter().map(|b| leading(b, order).map(|(m, c)| (m.clone(), c.clone())).unwrap()).collect();
        let (m, c) = leading(&minimal[k], order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut tail = minimal[k].clone();
        tail.add_term(m.clone(), -c.clone());
        let mut g = reduce(&tail, &others, &leads, order);
        g.add_term(m, c);
        out.push(make_monic(&g, order));
    }
    out.sort_by(|a, b| order.cmp(leading(a, order).unwrap().0, leading(b, order).unwrap().0));
    out
}

/// Ideal of the polynomial ring with a lazily computed reduced basis.
#[derive(Debug)]
pub struct Ideal {
    gens: Vec<Poly>,
    order: MonomialOrder,
    basis: OnceLock<Basis>,
}

#[derive(Debug)]
struct Basis {
    polys: Vec<Poly>,
    leads: Vec<(Monomial, Coeff)>,
}

impl Clone for Ideal {
    fn clone(&self) -> Ideal {
        let basis = OnceLock::new();
        if let Some(b) = self.basis.get() {
            let _ = basis.set(Basis { polys: b.polys.clone(), leads: b.leads.clone() });
        }
        Ideal { gens: self.gens.clone(), order: self.order, basis }
    }
}

impl Ideal {
    pub fn new(gens: Vec<Poly>, order: MonomialOrder) -> Ideal {
        Ideal { gens, order, basis: OnceLock::new() }
    }

    pub fn zero(order: MonomialOrder) -> Ideal {
        Ideal::new(Vec::new(), order)
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    fn computed(&self) -> &Basis {
        self.basis.get_or_init(|| {
            let polys = buchberger(&self.gens, self.order);
            let leads = polys.iter().map(|p| leading(p, self.order).map(|(m, c)| (m.clone(), c.clone())).unwrap()).collect();
            Basis { polys, leads }
        })
    }

    pub fn basis(&self) -> &[Poly] {
        &self.computed().polys
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis().is_empty()
    }

    pub fn normal_form(&self, p: &Poly) -> Poly {
        let b = self.computed();
        if b.polys.is_empty() {
            return p.clone();
        }
        reduce(p, &b.polys, &b.leads, self.order)
    }

    /// Normal form using the basis elements in the given order at each step.
    pub fn normal_form_with_permutation(&self, p: &Poly, perm: &[usize]) -> Poly {
        let b = self.computed();
        let polys: Vec<Poly> = perm.iter().map(|&k| b.polys[k].clone()).collect();
        let leads: Vec<(Monomial, Coeff)> = perm.iter().map(|&k| b.leads[k].clone()).collect();
        reduce(p, &polys, &leads, self.order)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Zero test for a fraction whose denominator is a unit modulo the ideal.
    pub fn frac_is_zero(&self, x: &Frac) -> bool {
        self.contains(x.num())
    }

    pub fn power(&self, k: u32) -> Ideal {
        assert!(k >= 1, "ideal power needs k >= 1");
        let mut prods: Vec<Poly> = self.gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        let base = prods.clone();
        for _ in 1..k {
            let mut next = Vec::new();
            for p in prods.iter() {
                for g in base.iter() {
                    next.push(p * g);
                }
            }
            next.sort_by(|a, b| a.leading().map(|x| x.0).cmp(&b.leading().map(|x| x.0)));
            next.dedup();
            prods = next;
        }
        Ideal::new(prods, self.order)
    }

    /// Writes `p = Σ cofactors·gens + remainder` against the generators as given.
    ///
    /// Division is tried first; when its remainder is not the normal form the
    /// difference is expressed by a degree-bounded linear solve.
    pub fn reduce_with_cofactors(&self, p: &Poly, bound: Option<u32>) -> Result<Cofactors, GroebnerError> {
        let remainder = self.normal_form(p);
        let (quots, rem) = divide(p, &self.gens, self.order);
        if rem == remainder {
            return Ok(Cofactors { cofactors: quots, remainder, method: CofactorMethod::Division });
        }
        let target = p - &remainder;
        let bound = bound.unwrap_or_else(|| default_bound(&target, &self.gens));
        let gens: Vec<Vec<Poly>> = self.gens.iter().map(|g| vec![g.clone()]).collect();
        match solve_combination(&[target], &gens, None, bound) {
            Some(cofactors) => Ok(Cofactors { cofactors, remainder, method: CofactorMethod::LinearSolve }),
            None => Err(GroebnerError::CofactorBound { bound }),
        }
    }
}

/// Degree bound `max(deg p, Σ deg gens) + 2` for cofactor searches.
pub fn default_bound(p: &Poly, gens: &[Poly]) -> u32 {
    let sum: u32 = gens.iter().filter_map(|g| g.total_degree()).sum();
    p.total_degree().unwrap_or(0).max(sum) + 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CofactorMethod {
    Division,
    LinearSolve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cofactors {
    pub cofactors: Vec<Poly>,
    pub remainder: Poly,
    pub method: CofactorMethod,
}

/// A polynomial ring with its jets, modulo a coordinate ideal.
#[derive(Clone, Debug)]
pub struct QuotientRing {
    pub vars: VarTable,
    pub ideal: Ideal,
}

impl QuotientRing {
    pub fn new(vars: VarTable, ideal: Ideal) -> QuotientRing {
        QuotientRing { vars, ideal }
    }

    pub fn free(vars: VarTable) -> QuotientRing {
        QuotientRing { vars, ideal: Ideal::zero(MonomialOrder::Grevlex) }
    }

    pub fn order(&self) -> MonomialOrder {
        self.ideal.order()
    }

    pub fn nf(&self, p: &Poly) -> Poly {
        self.ideal.normal_form(p)
    }

    pub fn is_zero(&self, p: &Poly) -> bool {
        self.ideal.contains(p)
    }

    /// Reduces the numerator; denominators are assumed to be units.
    pub fn nf_frac(&self, x: &Frac) -> Frac {
        if x.is_poly() {
            return Frac::from(self.nf(x.num()));
        }
        Frac::new(self.nf(x.num()), x.den().clone()).expect("nonzero denominator")
    }

    pub fn frac_is_zero(&self, x: &Frac) -> bool {
        self.ideal.frac_is_zero(x)
    }

    pub fn frac_eq(&self, x: &Frac, y: &Frac) -> bool {
        if x.den() == y.den() {
            return self.is_zero(&(x.num() - y.num()));
        }
        self.is_zero(&(&(x.num() * y.den()) - &(y.num() * x.den())))
    }

    pub fn with_order(&self, order: MonomialOrder) -> QuotientRing {
        QuotientRing { vars: self.vars.clone(), ideal: Ideal::new(self.ideal.generators().to_vec(), order) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn vt() -> VarTable {
        VarTable::with_jets(&["u1", "u2", "u3"], &[("a", &["u1", "u2", "u3"], 2)]).unwrap()
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &vt()).unwrap()
    }

    #[test]
    fn hand_s_polynomial_example() {
        let b = buchberger(&[p("u1"), p("u1*u2 - u3^2")], MonomialOrder::Grevlex);
        assert_eq!(b, vec![p("u1"), p("u3^2")]);
    }

    #[test]
    fn cone_normal_forms() {
        let i = Ideal::new(vec![p("u1*u2 - u3^2")], MonomialOrder::Grevlex);
        assert_eq!(i.normal_form(&p("u1*u2")), p("u3^2"));
        assert!(i.contains(&p("u1*u2 - u3^2")));
        assert_eq!(i.normal_form(&p("a*(u1*u2 - u3^2) + u2")), p("u2"));
    }

    #[test]
    fn squares_membership() {
        let i = Ideal::new(vec![p("u1*u2 - u3^2")], MonomialOrder::Grevlex);
        let i2 = i.power(2);
        assert_eq!(i2.basis(), &[p("(u1*u2 - u3^2)^2")]);
        assert!(i2.contains(&p("(u1*u2 - u3^2)*u1*(u1*u2 - u3^2)")));
        assert!(!i2.contains(&p("u1*u2 - u3^2")));
    }

    #[test]
    fn cofactors_of_x1_applied_to_cone() {
        let i = Ideal::new(vec![p("u1*u2 - u3^2")], MonomialOrder::Grevlex);
        let c = i.reduce_with_cofactors(&p("2*u1*u2 - 2*u3^2"), None).unwrap();
        assert_eq!(c.cofactors, vec![p("2")]);
        assert!(c.remainder.is_zero());
        let c = i.reduce_with_cofactors(&p("u2"), None).unwrap();
        assert_eq!((c.cofactors, c.remainder), (vec![Poly::zero()], p("u2")));
    }

    #[test]
    fn lex_basis_of_twisted_cubic() {
        let v = VarTable::new(&["x", "y", "z"]).unwrap();
        let q = |s: &str| parse_poly(s, &v).unwrap();
        let b = buchberger(&[q("x^2 - y"), q("x^3 - z")], MonomialOrder::Lex);
        // Cox-Little-O'Shea style: y^3 - z^2 appears in the lex elimination ideal
        let i = Ideal::new(b, MonomialOrder::Lex);
        assert!(i.contains(&q("y^3 - z^2")));
        assert!(i.contains(&q("x*y - z")));
    }

    #[test]
    fn non_basis_generators_use_linear_solve() {
        let v = VarTable::new(&["x", "y"]).unwrap();
        let q = |s: &str| parse_poly(s, &v).unwrap();
        let i = Ideal::new(vec![q("x*y - 1"), q("y^2 - 1")], MonomialOrder::Grevlex);
        let target = q("x - y");
        let c = i.reduce_with_cofactors(&target, None).unwrap();
        assert!(c.remainder.is_zero());
        let back = &(&c.cofactors[0] * &q("x*y - 1")) + &(&c.cofactors[1] * &q("y^2 - 1"));
        assert_eq!(back, target);
    }
}
