//! Derivations, Lie-Rinehart presentations and the naive de Rham complex.

mod forms;
mod matrix;

pub use forms::{combinations, cup, ddr, form_wellformed, koszul_differential, mc_defect, syzygy_contractions, Form};
pub use matrix::Mat;

use thiserror::Error;

use crate::groebner::{default_bound, QuotientRing};
use crate::linsolve::solve_combination;
use crate::poly::{Frac, Poly, VarTable};
use crate::report::{Entry, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("generator `{name}` has {got} coefficients, expected {expected}")]
    CoefficientCount { name: String, got: usize, expected: usize },
    #[error("structure constants have the wrong shape: {0}")]
    StructureShape(String),
    #[error("syzygy column {column} has length {got}, expected {expected}")]
    SyzygyShape { column: usize, got: usize, expected: usize },
    #[error("bracket [{0},{1}] is not a combination of the generators within the degree bound")]
    NoStructureConstants(String, String),
}

/// `Σ_i coeffs[i] ∂/∂x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub coeffs: Vec<Poly>,
}

impl Derivation {
    pub fn new(coeffs: Vec<Poly>) -> Derivation {
        Derivation { coeffs }
    }

    pub fn zero(n: usize) -> Derivation {
        Derivation { coeffs: vec![Poly::zero(); n] }
    }

    pub fn partial(i: usize, n: usize) -> Derivation {
        let mut d = Derivation::zero(n);
        d.coeffs[i] = Poly::one();
        d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn apply(&self, p: &Poly, vars: &VarTable) -> Poly {
        p.apply_vector_field(&self.coeffs, vars)
    }

    pub fn apply_frac(&self, x: &Frac, vars: &VarTable) -> Frac {
        x.apply_vector_field(&self.coeffs, vars)
    }

    /// `X∘Y − Y∘X`, coefficientwise.
    pub fn bracket(&self, other: &Derivation, vars: &VarTable) -> Derivation {
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(x, y)| &self.apply(y, vars) - &other.apply(x, vars))
            .collect();
        Derivation { coeffs }
    }

    pub fn scale(&self, p: &Poly) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().map(|c| c * p).collect() }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        Derivation { coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a - b).collect() }
    }

    /// `Σ_k weights[k]·gens[k]`.
    pub fn combination(weights: &[Poly], gens: &[Derivation], n: usize) -> Derivation {
        weights.iter().zip(gens).fold(Derivation::zero(n), |acc, (w, g)| acc.add(&g.scale(w)))
    }
}

/// A Lie-Rinehart algebra given by finitely many generators.
///
/// `anchors[i]` is the derivation by which generator `i` acts; for concrete
/// derivation algebras it is the generator itself. `structure[i][j][k]` is
/// `c_ij^k` with `[X_i, X_j] = Σ_k c_ij^k X_k`; `syzygies[α][k]` is column `α`.
#[derive(Clone, Debug)]
pub struct LRPresentation {
    pub ring: QuotientRing,
    pub names: Vec<String>,
    pub anchors: Vec<Derivation>,
    pub structure: Vec<Vec<Vec<Poly>>>,
    pub syzygies: Vec<Vec<Poly>>,
    /// Whether generators are genuine derivations of the ring, so that
    /// equalities in L can be tested by their action on coordinates.
    pub faithful: bool,
}

impl LRPresentation {
    pub fn new(
        ring: QuotientRing,
        names: Vec<String>,
        anchors: Vec<Derivation>,
        structure: Option<Vec<Vec<Vec<Poly>>>>,
        syzygies: Vec<Vec<Poly>>,
        faithful: bool,
    ) -> Result<LRPresentation, LieError> {
        let n = ring.vars.n_coords();
        let l = anchors.len();
        for (name, a) in names.iter().zip(anchors.iter()) {
            if a.coeffs.len() != n {
                return Err(LieError::CoefficientCount { name: name.clone(), got: a.coeffs.len(), expected: n });
            }
        }
        for (col, s) in syzygies.iter().enumerate() {
            if s.len() != l {
                return Err(LieError::SyzygyShape { column: col, got: s.len(), expected: l });
            }
        }
        let structure = match structure {
            Some(c) => {
                let ok = c.len() == l && c.iter().all(|r| r.len() == l && r.iter().all(|v| v.len() == l));
                if !ok {
                    return Err(LieError::StructureShape(format!("expected {l}x{l}x{l}")));
                }
                c
            }
            None => compute_structure_constants(&ring, &names, &anchors)?,
        };
        Ok(LRPresentation { ring, names, anchors, structure, syzygies, faithful })
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn vars(&self) -> &VarTable {
        &self.ring.vars
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &Poly {
        &self.structure[i][j][k]
    }

    pub fn act(&self, i: usize, x: &Frac) -> Frac {
        self.anchors[i].apply_frac(x, &self.ring.vars)
    }

    pub fn act_poly(&self, i: usize, p: &Poly) -> Poly {
        self.anchors[i].apply(p, &self.ring.vars)
    }

    /// Entrywise anchor action on a matrix.
    pub fn act_mat(&self, i: usize, m: &Mat) -> Mat {
        m.apply_vector_field(&self.anchors[i].coeffs, &self.ring.vars)
    }

    /// The derivation `Σ_k w[k]·anchor_k`, tested on every coordinate modulo I.
    /// Returns the coordinates where it does not vanish, with the residue.
    pub fn derivation_residues(&self, weights: &[Frac]) -> Vec<(usize, Frac)> {
        let n = self.ring.vars.n_coords();
        let mut out = Vec::new();
        for t in 0..n {
            let v = weights
                .iter()
                .zip(self.anchors.iter())
                .fold(Frac::zero(), |acc, (w, a)| &acc + &(w * &Frac::from(a.coeffs[t].clone())));
            let r = self.ring.nf_frac(&v);
            if !r.is_zero() {
                out.push((t, r));
            }
        }
        out
    }
}

fn compute_structure_constants(
    ring: &QuotientRing,
    names: &[String],
    anchors: &[Derivation],
) -> Result<Vec<Vec<Vec<Poly>>>, LieError> {
    let l = anchors.len();
    let vars = &ring.vars;
    let mut c = vec![vec![vec![Poly::zero(); l]; l]; l];
    let gens: Vec<Vec<Poly>> = anchors.iter().map(|a| a.coeffs.clone()).collect();
    for i in 0..l {
        for j in i + 1..l {
            let b = anchors[i].bracket(&anchors[j], vars);
            let bound = b.coeffs.iter().map(|p| default_bound(p, ring.ideal.generators())).max().unwrap_or(2);
            let sol = solve_combination(&b.coeffs, &gens, Some(&ring.ideal), bound)
                .ok_or_else(|| LieError::NoStructureConstants(names[i].clone(), names[j].clone()))?;
            for (k, s) in sol.into_iter().enumerate() {
                c[j][i][k] = -&s;
                c[i][j][k] = s;
            }
        }
    }
    Ok(c)
}

/// Presentation consistency checks, each modulo the ideal.
pub fn verify_presentation(pres: &LRPresentation) -> Vec<Entry> {
    let ring = &pres.ring;
    let vars = &ring.vars;
    let l = pres.len();
    let n = vars.n_coords();
    let mut entries = Vec::new();
    for i in 0..l {
        let mut w = Vec::new();
        for (g_idx, g) in ring.ideal.generators().iter().enumerate() {
            let r = ring.nf(&pres.act_poly(i, g));
            if !r.is_zero() {
                w.push(Witness::new(&[i, g_idx], format!("{}(ideal generator)", pres.names[i]), r.to_string_with(vars)));
            }
        }
        entries.push(Entry::check(format!("tangency {}", pres.names[i]), w));
    }
    for i in 0..l {
        for j in i + 1..l {
            let b = pres.anchors[i].bracket(&pres.anchors[j], vars);
            let rhs = Derivation::combination(&pres.structure[i][j], &pres.anchors, n);
            let diff = b.sub(&rhs);
            let mut w = Vec::new();
            for t in 0..n {
                let r = ring.nf(&diff.coeffs[t]);
                if !r.is_zero() {
                    w.push(Witness::new(&[i, j, t], format!("on {}", vars.coords()[t]), r.to_string_with(vars)));
                }
            }
            for k in 0..l {
                let s = ring.nf(&(&pres.structure[i][j][k] + &pres.structure[j][i][k]));
                if !s.is_zero() {
                    w.push(Witness::new(&[i, j, k], "c_ij^k + c_ji^k", s.to_string_with(vars)));
                }
            }
            entries.push(Entry::check(format!("bracket [{},{}]", pres.names[i], pres.names[j]), w));
        }
    }
    for (alpha, col) in pres.syzygies.iter().enumerate() {
        let combo = Derivation::combination(col, &pres.anchors, n);
        let mut w = Vec::new();
        for t in 0..n {
            let r = ring.nf(&combo.coeffs[t]);
            if !r.is_zero() {
                w.push(Witness::new(&[alpha, t], format!("column {} on {}", alpha + 1, vars.coords()[t]), r.to_string_with(vars)));
            }
        }
        entries.push(Entry::check(format!("syzygy column {}", alpha + 1), w));
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::Ideal;
    use crate::poly::{parse_poly, MonomialOrder};

    #[test]
    fn cone_bracket_x1_x2() {
        let v = VarTable::new(&["u1", "u2", "u3"]).unwrap();
        let p = |s: &str| parse_poly(s, &v).unwrap();
        let x1 = Derivation::new(vec![p("2*u1"), p("0"), p("u3")]);
        let x2 = Derivation::new(vec![p("2*u3"), p("0"), p("u2")]);
        assert_eq!(x1.bracket(&x2, &v), x2.scale(&p("-1")));
        assert!(x1.bracket(&x1, &v).is_zero());
        assert_eq!(x1.apply(&p("u1*u2 - u3^2"), &v), p("2*u1*u2 - 2*u3^2"));
        let ring = QuotientRing::new(v.clone(), Ideal::new(vec![p("u1*u2 - u3^2")], MonomialOrder::Grevlex));
        let pres = LRPresentation::new(ring, vec!["X1".into(), "X2".into()], vec![x1, x2], None, vec![], true).unwrap();
        assert_eq!(pres.structure[0][1], vec![p("0"), p("-1")]);
        assert!(verify_presentation(&pres).iter().all(Entry::passed));
    }
}
