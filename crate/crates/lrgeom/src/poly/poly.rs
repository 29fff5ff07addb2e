use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use super::{Monomial, PolyError, Symbol, VarTable};

pub type Coeff = BigRational;

pub fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map ordered by grevlex, so the last entry is the
/// grevlex leading term. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Poly {
        Poly::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(Coeff::from_integer(n.into()))
    }

    pub fn term(m: Monomial, c: Coeff) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn symbol(s: Symbol) -> Poly {
        Poly::term(Monomial::var(s), Coeff::one())
    }

    pub fn coord(i: usize) -> Poly {
        Poly::symbol(Symbol::coord(i))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending grevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Grevlex leading term.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn has_jets(&self) -> bool {
        self.terms.keys().any(|m| m.has_jets())
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s: Vec<Symbol> = self.terms.keys().flat_map(|m| m.pairs().iter().map(|p| p.0)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Coeff, m: &Monomial) {
        if c.is_zero() {
            return;
        }
        for (om, oc) in other.terms.iter() {
            self.add_term(om.mul(m), oc * c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Positive rational `r` with `self / r` having coprime integer coefficients
    /// and positive leading coefficient (sign folded into `r`).
    pub fn content(&self) -> Coeff {
        let Some((_, lc)) = self.leading() else {
            return Coeff::one();
        };
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num::integer::gcd(num_gcd, c.numer().clone());
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        let r = BigRational::new(num_gcd, den_lcm);
        if lc.is_negative() {
            -r
        } else {
            r
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, x)| (m.quotient_of(k), x.clone())).collect() }
    }

    pub fn partial_derivative(&self, c: usize, vars: &VarTable) -> Poly {
        let mut out = Poly::zero();
        for (m, x) in self.terms.iter() {
            for &(s, e) in m.pairs() {
                let Some(ds) = vars.symbol_derivative(s, c) else {
                    continue;
                };
                let rest = Monomial::pow(s, 1).quotient_of(m);
                let coeff = x * Coeff::from_integer(e.into());
                let m2 = match ds {
                    None => rest,
                    Some(t) => rest.mul(&Monomial::var(t)),
                };
                out.add_term(m2, coeff);
            }
        }
        out
    }

    /// Applies `Σ_c coeffs[c] ∂/∂x^c`, caching the image of each symbol.
    pub fn apply_vector_field(&self, coeffs: &[Poly], vars: &VarTable) -> Poly {
        let mut cache: HashMap<Symbol, Poly> = HashMap::new();
        let mut image = |s: Symbol| -> Poly {
            cache
                .entry(s)
                .or_insert_with(|| {
                    let mut acc = Poly::zero();
                    for (c, a) in coeffs.iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        match vars.symbol_derivative(s, c) {
                            None => {}
                            Some(None) => acc = &acc + a,
                            Some(Some(t)) => acc = &acc + &(a * &Poly::symbol(t)),
                        }
                    }
                    acc
                })
                .clone()
        };
        let mut out = Poly::zero();
        for (m, x) in self.terms.iter() {
            for &(s, e) in m.pairs() {
                let ds = image(s);
                if ds.is_zero() {
                    continue;
                }
                let rest = Monomial::pow(s, 1).quotient_of(m);
                let k = x * Coeff::from_integer(e.into());
                out.add_scaled(&ds, &k, &rest);
            }
        }
        out
    }

    /// Replaces coordinates by polynomials (possibly over another table).
    pub fn substitute(&self, images: &[Option<Poly>]) -> Poly {
        let mut out = Poly::zero();
        let mut powers: HashMap<(Symbol, u32), Poly> = HashMap::new();
        for (m, x) in self.terms.iter() {
            let mut t = Poly::constant(x.clone());
            let mut keep = Vec::new();
            for &(s, e) in m.pairs() {
                match s.coord_index().and_then(|i| images.get(i).cloned().flatten()) {
                    Some(img) => {
                        let pw = powers.entry((s, e)).or_insert_with(|| img.pow(e)).clone();
                        t = &t * &pw;
                    }
                    None => keep.push((s, e)),
                }
            }
            out = &out + &t.mul_monomial(&Monomial::from_pairs(keep));
        }
        out
    }

    /// Exact quotient by a single divisor; fails unless the remainder is zero.
    pub fn divide_exact(&self, den: &Poly) -> Result<Poly, PolyError> {
        let Some((lm, lc)) = den.leading() else {
            return Err(PolyError::DivisionByZero);
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return Err(PolyError::NotDivisible);
            }
            let qm = lm.quotient_of(m);
            let qc = c / lc;
            rem.add_scaled(den, &(-qc.clone()), &qm);
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    pub fn to_string_with(&self, vars: &VarTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(if a.is_integer() { a.numer().to_string() } else { format!("{}/{}", a.numer(), a.denom()) });
            }
            for &(s, e) in m.pairs() {
                let name = vars.symbol_name(s);
                factors.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(m, c)| (m, c.to_string()))).finish()
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in small.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Monomial, Coeff> = HashMap::with_capacity(self.len() * rhs.len());
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in rhs.terms.iter() {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += c,
                }
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly {
                (&self).$f(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> VarTable {
        VarTable::with_jets(&["u1", "u2", "u3"], &[("a", &["u1", "u2", "u3"], 2)]).unwrap()
    }

    #[test]
    fn cone_equation_derivative() {
        let v = vt();
        let f = &(&Poly::coord(0) * &Poly::coord(1)) - &Poly::coord(2).pow(2);
        assert_eq!(f.partial_derivative(0, &v), Poly::coord(1));
        assert_eq!(f.to_string_with(&v), "u1*u2 - u3^2");
    }

    #[test]
    fn exact_division() {
        let f = &(&Poly::coord(0) * &Poly::coord(1)) - &Poly::coord(2).pow(2);
        let g = &Poly::coord(1) + &Poly::one();
        assert_eq!((&f * &g).divide_exact(&f).unwrap(), g);
        let h = &Poly::coord(0) + &Poly::coord(1);
        assert!(matches!(h.divide_exact(&Poly::coord(2)), Err(PolyError::NotDivisible)));
    }

    #[test]
    fn vector_field_uses_chain_rule() {
        let v = vt();
        let a = Poly::symbol(v.resolve("a").unwrap());
        // X1 = 2u1 d1 + u3 d3
        let x1 = [Poly::coord(0).scale(&rat(2, 1)), Poly::zero(), Poly::coord(2)];
        let got = a.apply_vector_field(&x1, &v);
        assert_eq!(got.to_string_with(&v), "2*u1*a_1 + u3*a_3");
    }
}
