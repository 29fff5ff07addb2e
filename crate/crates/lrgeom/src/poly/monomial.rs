use std::cmp::Ordering;

use smallvec::SmallVec;

use super::Symbol;

/// Sparse exponent vector: `(symbol, exponent)` pairs sorted by symbol, exponents positive.
///
/// `Ord` is graded reverse lexicographic; see [`MonomialOrder`] for the lex option.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol) -> Monomial {
        Monomial::pow(s, 1)
    }

    pub fn pow(s: Symbol, e: u32) -> Monomial {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((s, e));
        }
        Monomial(v)
    }

    /// Builds from arbitrary pairs, merging duplicates and dropping zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Monomial {
        let mut v: SmallVec<[(Symbol, u32); 4]> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        v.sort_by_key(|p| p.0);
        let mut out: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        for (s, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0.binary_search_by_key(&s, |p| p.0).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn has_jets(&self) -> bool {
        self.0.iter().any(|p| !p.0.is_coord())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        let mut j = 0;
        let b = &other.0;
        for &(s, e) in self.0.iter() {
            while j < b.len() && b[j].0 < s {
                j += 1;
            }
            if j == b.len() || b[j].0 != s || b[j].1 < e {
                return false;
            }
        }
        true
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let a = &self.0;
        let mut i = 0;
        for &(s, e) in other.0.iter() {
            if i < a.len() && a[i].0 == s {
                if e > a[i].1 {
                    out.push((s, e - a[i].1));
                }
                i += 1;
            } else {
                out.push((s, e));
            }
        }
        Monomial(out)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(
            self.0
                .iter()
                .map(|&(s, e)| (s, e.max(other.exponent(s))))
                .chain(other.0.iter().filter(|p| self.exponent(p.0) == 0).copied()),
        )
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(s, e)| {
                    let f = other.exponent(s);
                    (f > 0).then_some((s, e.min(f)))
                })
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().all(|p| other.exponent(p.0) == 0)
    }

    /// Removes symbol `s` entirely, returning its exponent.
    pub fn split_off(&self, s: Symbol) -> (Monomial, u32) {
        let e = self.exponent(s);
        (Monomial(self.0.iter().filter(|p| p.0 != s).copied().collect()), e)
    }

    pub fn grevlex_cmp(&self, other: &Monomial) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (a.len(), b.len());
        while i > 0 && j > 0 {
            let (sa, ea) = a[i - 1];
            let (sb, eb) = b[j - 1];
            match sa.cmp(&sb) {
                Ordering::Greater => return Ordering::Less,
                Ordering::Less => return Ordering::Greater,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        i -= 1;
                        j -= 1;
                    }
                },
            }
        }
        debug_assert!(i == 0 && j == 0);
        Ordering::Equal
    }

    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        for k in 0..a.len().min(b.len()) {
            let (sa, ea) = a[k];
            let (sb, eb) = b[k];
            match sa.cmp(&sb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        a.len().cmp(&b.len())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grevlex_cmp(other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Term order used for Gröbner bases and normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    #[default]
    Grevlex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Grevlex => a.grevlex_cmp(b),
            MonomialOrder::Lex => a.lex_cmp(b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MonomialOrder::Grevlex => "grevlex",
            MonomialOrder::Lex => "lex",
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "grevlex" => Ok(MonomialOrder::Grevlex),
            "lex" => Ok(MonomialOrder::Lex),
            other => Err(format!("unknown monomial order `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_pairs(e.iter().enumerate().map(|(i, &x)| (Symbol::coord(i), x)))
    }

    #[test]
    fn grevlex_matches_textbook() {
        // x > y > z; x*y*z^2 < x^2*z^2? both degree 4: last differing z equal, then y: 1 vs 0
        assert_eq!(m(&[1, 1, 2]).grevlex_cmp(&m(&[2, 0, 2])), Ordering::Less);
        assert_eq!(m(&[1, 1, 0]).grevlex_cmp(&m(&[0, 0, 2])), Ordering::Greater);
        assert_eq!(m(&[0, 3, 0]).grevlex_cmp(&m(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(m(&[1, 0, 0]).grevlex_cmp(&m(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(m(&[1, 2]).grevlex_cmp(&m(&[1, 2])), Ordering::Equal);
    }

    #[test]
    fn lex_matches_textbook() {
        assert_eq!(m(&[1, 0, 0]).lex_cmp(&m(&[0, 5, 5])), Ordering::Greater);
        assert_eq!(m(&[1, 2, 0]).lex_cmp(&m(&[1, 1, 9])), Ordering::Greater);
        assert_eq!(m(&[0, 0, 1]).lex_cmp(&m(&[])), Ordering::Greater);
    }

    #[test]
    fn divisibility() {
        let a = m(&[1, 0, 2]);
        let b = m(&[2, 1, 2]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(a.quotient_of(&b), m(&[1, 1, 0]));
        assert_eq!(a.lcm(&m(&[0, 3, 1])), m(&[1, 3, 2]));
        assert_eq!(a.gcd(&b), a);
    }
}
