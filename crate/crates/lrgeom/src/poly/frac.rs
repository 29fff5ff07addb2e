use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};

use super::{Coeff, Poly, PolyError, VarTable};

/// Element of the fraction field. Equality is cross-multiplication.
///
/// The denominator is kept with coprime integer coefficients, positive leading
/// coefficient and no monomial factor shared with the numerator.
#[derive(Clone)]
pub struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    pub fn new(num: Poly, den: Poly) -> Result<Frac, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(Frac::normalized(num, den))
    }

    pub fn zero() -> Frac {
        Frac { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Frac {
        Frac::from(Poly::one())
    }

    fn normalized(num: Poly, den: Poly) -> Frac {
        if num.is_zero() {
            return Frac::zero();
        }
        if let Some(c) = den.as_constant() {
            return Frac { num: num.scale(&c.recip()), den: Poly::one() };
        }
        let c = den.content().recip();
        let (mut num, mut den) = (num.scale(&c), den.scale(&c));
        let g = num.monomial_content().gcd(&den.monomial_content());
        if !g.is_one() {
            num = num.div_monomial(&g);
            den = den.div_monomial(&g);
        }
        if let Ok(q) = num.divide_exact(&den) {
            return Frac { num: q, den: Poly::one() };
        }
        Frac { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn into_poly(self) -> Option<Poly> {
        self.den.is_one().then_some(self.num)
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn scale(&self, c: &Coeff) -> Frac {
        if c.is_zero() {
            return Frac::zero();
        }
        Frac { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Frac {
        self * &Frac::from(p.clone())
    }

    pub fn recip(&self) -> Result<Frac, PolyError> {
        Frac::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Frac {
        Frac::normalized(self.num.pow(e), self.den.pow(e))
    }

    /// Divides numerator and denominator by `p` when both are exact multiples.
    pub fn cancel(&self, p: &Poly) -> Frac {
        if p.is_zero() || p.as_constant().is_some() || self.den.is_one() {
            return self.clone();
        }
        match (self.num.divide_exact(p), self.den.divide_exact(p)) {
            (Ok(n), Ok(d)) => Frac::normalized(n, d),
            _ => self.clone(),
        }
    }

    /// Quotient rule for a vector field `Σ coeffs[c] ∂/∂x^c`.
    pub fn apply_vector_field(&self, coeffs: &[Poly], vars: &VarTable) -> Frac {
        let dn = self.num.apply_vector_field(coeffs, vars);
        if self.den.is_one() {
            return Frac::from(dn);
        }
        let dd = self.den.apply_vector_field(coeffs, vars);
        if dd.is_zero() {
            return Frac::normalized(dn, self.den.clone());
        }
        Frac::normalized(&(&dn * &self.den) - &(&self.num * &dd), self.den.pow(2))
    }

    pub fn partial_derivative(&self, c: usize, vars: &VarTable) -> Frac {
        let mut e = vec![Poly::zero(); vars.n_coords()];
        e[c] = Poly::one();
        self.apply_vector_field(&e, vars)
    }

    pub fn substitute(&self, images: &[Option<Poly>]) -> Frac {
        Frac::normalized(self.num.substitute(images), self.den.substitute(images))
    }

    pub fn to_string_with(&self, vars: &VarTable) -> String {
        if self.den.is_one() {
            return self.num.to_string_with(vars);
        }
        format!("({})/({})", self.num.to_string_with(vars), self.den.to_string_with(vars))
    }
}

/// Cross-multiplication equality of fractions.
pub fn frac_eq(x: &Frac, y: &Frac) -> bool {
    if x.den == y.den {
        return x.num == y.num;
    }
    &x.num * &y.den == &y.num * &x.den
}

impl PartialEq for Frac {
    fn eq(&self, other: &Frac) -> bool {
        frac_eq(self, other)
    }
}

impl Eq for Frac {}

impl std::fmt::Debug for Frac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Frac({:?} / {:?})", self.num, self.den)
    }
}

impl Default for Frac {
    fn default() -> Frac {
        Frac::zero()
    }
}

impl From<Poly> for Frac {
    fn from(p: Poly) -> Frac {
        Frac { num: p, den: Poly::one() }
    }
}

impl From<Coeff> for Frac {
    fn from(c: Coeff) -> Frac {
        Frac::from(Poly::constant(c))
    }
}

impl<'a> Add<&'a Frac> for &'a Frac {
    type Output = Frac;
    fn add(self, rhs: &Frac) -> Frac {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Frac::normalized(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return Frac::normalized(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return Frac::normalized(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        if let Ok(q) = rhs.den.divide_exact(&self.den) {
            return Frac::normalized(&(&self.num * &q) + &rhs.num, rhs.den.clone());
        }
        if let Ok(q) = self.den.divide_exact(&rhs.den) {
            return Frac::normalized(&self.num + &(&rhs.num * &q), self.den.clone());
        }
        Frac::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a Frac> for &'a Frac {
    type Output = Frac;
    fn sub(self, rhs: &Frac) -> Frac {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Frac> for &'a Frac {
    type Output = Frac;
    fn mul(self, rhs: &Frac) -> Frac {
        if self.is_zero() || rhs.is_zero() {
            return Frac::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Frac::from(&self.num * &rhs.num);
        }
        let (mut n1, mut d2) = (self.num.clone(), rhs.den.clone());
        if !d2.is_one() {
            if let Ok(q) = n1.divide_exact(&d2) {
                n1 = q;
                d2 = Poly::one();
            }
        }
        let (mut n2, mut d1) = (rhs.num.clone(), self.den.clone());
        if !d1.is_one() {
            if let Ok(q) = n2.divide_exact(&d1) {
                n2 = q;
                d1 = Poly::one();
            }
        }
        Frac::normalized(&n1 * &n2, &d1 * &d2)
    }
}

impl<'a> Div<&'a Frac> for &'a Frac {
    type Output = Frac;
    #[allow(clippy::suspicious_arithmetic_impl)]
    /// Panics on division by zero; use [`Frac::recip`] to handle it.
    fn div(self, rhs: &Frac) -> Frac {
        self * &rhs.recip().expect("division by zero fraction")
    }
}

impl Neg for &Frac {
    type Output = Frac;
    fn neg(self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Frac {
    type Output = Frac;
    fn neg(self) -> Frac {
        Frac { num: -self.num, den: self.den }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<Frac> for Frac {
            type Output = Frac;
            fn $f(self, rhs: Frac) -> Frac {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Frac> for Frac {
            type Output = Frac;
            fn $f(self, rhs: &Frac) -> Frac {
                (&self).$f(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl One for Frac {
    fn one() -> Frac {
        Frac::one()
    }
}

impl Zero for Frac {
    fn zero() -> Frac {
        Frac::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_frac;
    use super::*;

    #[test]
    fn equality_by_cross_multiplication() {
        let v = VarTable::with_jets(&["u2", "u3"], &[("f", &["u2", "u3"], 2)]).unwrap();
        let a = parse_frac("f_2/f", &v).unwrap();
        let b = parse_frac("(u2*f_2)/(u2*f)", &v).unwrap();
        let c = parse_frac("f_3/f", &v).unwrap();
        assert!(frac_eq(&a, &b));
        assert!(!frac_eq(&a, &c));
        assert!(frac_eq(&parse_frac("1/2", &v).unwrap(), &parse_frac("2/4", &v).unwrap()));
    }

    #[test]
    fn quotient_rule() {
        let v = VarTable::with_jets(&["u2", "u3"], &[("f", &["u2", "u3"], 2)]).unwrap();
        let logf = parse_frac("f_2/f", &v).unwrap();
        let d = logf.partial_derivative(1, &v);
        assert_eq!(d, parse_frac("(f*f_23 - f_2*f_3)/f^2", &v).unwrap());
    }

    #[test]
    fn shared_factor_cancels() {
        let v = VarTable::new(&["x", "y"]).unwrap();
        let a = parse_frac("(x^2*y - y^3)/(x - y)", &v).unwrap();
        assert!(a.is_poly());
        assert_eq!(a.to_string_with(&v), "x*y + y^2");
    }
}
