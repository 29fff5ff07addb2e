//! Exact linear algebra: sparse rational systems and dense systems over fractions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::Zero;

use crate::groebner::Ideal;
use crate::par;
use crate::poly::{Coeff, Frac, Monomial, Poly, Symbol};

type Row = BTreeMap<usize, Coeff>;

/// Incremental sparse Gaussian elimination over the rationals.
///
/// Pivots are the smallest column index of each reduced row; free
/// variables are set to zero when extracting a solution.
#[derive(Default, Debug, Clone)]
pub struct SparseSystem {
    pivots: Vec<(usize, Row, Coeff)>,
    pivot_of: HashMap<usize, usize>,
    inconsistent: bool,
}

impl SparseSystem {
    pub fn new() -> SparseSystem {
        SparseSystem::default()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn add_equation(&mut self, mut row: Row, mut rhs: Coeff) {
        row.retain(|_, c| !c.is_zero());
        for (col, prow, prhs) in self.pivots.iter() {
            let Some(f) = row.get(col).cloned() else { continue };
            for (c, v) in prow.iter() {
                let e = row.entry(*c).or_insert_with(Coeff::zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &f * prhs;
        }
        let Some((&col, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = lead.recip();
        let row: Row = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        rhs *= &inv;
        self.pivot_of.insert(col, self.pivots.len());
        self.pivots.push((col, row, rhs));
    }

    /// Solution with free variables at zero, or `None` if inconsistent.
    pub fn solve(&self, n_vars: usize) -> Option<Vec<Coeff>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![Coeff::zero(); n_vars];
        for (col, row, rhs) in self.pivots.iter().rev() {
            let mut v = rhs.clone();
            for (c, a) in row.iter() {
                if c != col {
                    v -= a * &x[*c];
                }
            }
            x[*col] = v;
        }
        Some(x)
    }
}

/// All monomials in `symbols` of total degree exactly `d`.
pub fn monomials_of_degree(symbols: &[Symbol], d: u32) -> Vec<Monomial> {
    fn rec(symbols: &[Symbol], d: u32, acc: &mut Vec<(Symbol, u32)>, out: &mut Vec<Monomial>) {
        if d == 0 {
            out.push(Monomial::from_pairs(acc.iter().copied()));
            return;
        }
        let Some((&s, rest)) = symbols.split_first() else { return };
        for e in (0..=d).rev() {
            if e > 0 {
                acc.push((s, e));
            }
            rec(rest, d - e, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(symbols, d, &mut Vec::new(), &mut out);
    out
}

/// Finds polynomials `c_k` with `Σ_k c_k·gens[k][t] ≡ targets[t]` for every
/// component `t`, modulo `ideal` when given, trying cofactor degrees `0..=bound`.
/// The ansatz uses every symbol occurring in the data or the ideal generators.
pub fn solve_combination(targets: &[Poly], gens: &[Vec<Poly>], ideal: Option<&Ideal>, bound: u32) -> Option<Vec<Poly>> {
    let nf = |p: &Poly| match ideal {
        Some(i) => i.normal_form(p),
        None => p.clone(),
    };
    let targets: Vec<Poly> = targets.iter().map(nf).collect();
    if targets.iter().all(|t| t.is_zero()) {
        return Some(vec![Poly::zero(); gens.len()]);
    }
    let mut symbols: BTreeSet<Symbol> = BTreeSet::new();
    let ideal_gens = ideal.map(|i| i.generators()).unwrap_or(&[]);
    for p in targets.iter().chain(gens.iter().flatten()).chain(ideal_gens) {
        symbols.extend(p.symbols());
    }
    let symbols: Vec<Symbol> = symbols.into_iter().collect();
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    let mut columns: Vec<Vec<(usize, Monomial, Coeff)>> = Vec::new();
    for d in 0..=bound {
        let monos = monomials_of_degree(&symbols, d);
        let fresh: Vec<(usize, Monomial)> =
            (0..gens.len()).flat_map(|k| monos.iter().map(move |m| (k, m.clone()))).collect();
        let cols = par::map(&fresh, |(k, m)| {
            let mut col = Vec::new();
            for (t, g) in gens[*k].iter().enumerate() {
                for (mm, c) in nf(&g.mul_monomial(m)).terms() {
                    col.push((t, mm.clone(), c.clone()));
                }
            }
            col
        });
        unknowns.extend(fresh);
        columns.extend(cols);
        let mut eq_index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
        let mut rows: Vec<Row> = Vec::new();
        let mut rhs: Vec<Coeff> = Vec::new();
        let mut slot = |t: usize, m: &Monomial, rows: &mut Vec<Row>, rhs: &mut Vec<Coeff>| -> usize {
            *eq_index.entry((t, m.clone())).or_insert_with(|| {
                rows.push(Row::new());
                rhs.push(Coeff::zero());
                rows.len() - 1
            })
        };
        for (u, col) in columns.iter().enumerate() {
            for (t, m, c) in col.iter() {
                let r = slot(*t, m, &mut rows, &mut rhs);
                rows[r].insert(u, c.clone());
            }
        }
        for (t, target) in targets.iter().enumerate() {
            for (m, c) in target.terms() {
                let r = slot(t, m, &mut rows, &mut rhs);
                rhs[r] = c.clone();
            }
        }
        let mut sys = SparseSystem::new();
        for (row, b) in rows.into_iter().zip(rhs) {
            sys.add_equation(row, b);
            if !sys.is_consistent() {
                break;
            }
        }
        if let Some(x) = sys.solve(unknowns.len()) {
            let mut out = vec![Poly::zero(); gens.len()];
            for ((k, m), v) in unknowns.iter().zip(x) {
                out[*k].add_term(m.clone(), v);
            }
            return Some(out);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FracSolveError {
    #[error("matrix is singular")]
    Singular,
}

/// Solves `A·X = B` over the fraction field by Gauss-Jordan elimination.
///
/// The pivot is the first row (in index order) with a nonzero entry. After each
/// elimination step entries are simplified with [`simplify`] against `factors`.
pub fn solve_frac(a: &[Vec<Frac>], b: &[Vec<Frac>], factors: &[Poly]) -> Result<Vec<Vec<Frac>>, FracSolveError> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Frac>> = a.iter().zip(b).map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect()).collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !aug[r][col].is_zero()) else {
            return Err(FracSolveError::Singular);
        };
        aug.swap(col, p);
        let inv = aug[col][col].recip().map_err(|_| FracSolveError::Singular)?;
        aug[col] = aug[col].iter().map(|x| simplify(&(x * &inv), factors)).collect();
        let pivot_row = aug[col].clone();
        for r in 0..n {
            if r == col || aug[r][col].is_zero() {
                continue;
            }
            let f = aug[r][col].clone();
            aug[r] = aug[r].iter().zip(pivot_row.iter()).map(|(x, y)| simplify(&(x - &(&f * y)), factors)).collect();
        }
    }
    Ok(aug.into_iter().map(|row| row[n..n + m].to_vec()).collect())
}

/// Cancels common factors that can be found by exact division: the
/// denominator itself, its non-monomial part, and each candidate factor.
pub fn simplify(x: &Frac, factors: &[Poly]) -> Frac {
    if x.is_poly() {
        return x.clone();
    }
    let mut cur = x.clone();
    for f in factors {
        loop {
            let next = cur.cancel(f);
            if next.den() == cur.den() {
                break;
            }
            cur = next;
            if cur.is_poly() {
                return cur;
            }
        }
    }
    cur
}

/// Determinant by fraction-free cofactor expansion (small matrices only).
pub fn det_poly(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
                let t = &m[0][j] * &det_poly(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

pub fn det_frac(m: &[Vec<Frac>]) -> Frac {
    let n = m.len();
    match n {
        0 => Frac::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Frac::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Frac>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
                let t = &m[0][j] * &det_frac(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat, MonomialOrder, VarTable};

    #[test]
    fn sparse_system_free_variables_zero() {
        let mut s = SparseSystem::new();
        // x0 + x1 = 3, x1 + x2 = 1
        s.add_equation([(0, rat(1, 1)), (1, rat(1, 1))].into_iter().collect(), rat(3, 1));
        s.add_equation([(1, rat(1, 1)), (2, rat(1, 1))].into_iter().collect(), rat(1, 1));
        assert_eq!(s.solve(3).unwrap(), vec![rat(2, 1), rat(1, 1), rat(0, 1)]);
        s.add_equation([(0, rat(1, 1)), (1, rat(1, 1))].into_iter().collect(), rat(4, 1));
        assert!(s.solve(3).is_none());
    }

    #[test]
    fn combination_modulo_ideal() {
        let v = VarTable::new(&["u1", "u2", "u3"]).unwrap();
        let p = |s: &str| parse_poly(s, &v).unwrap();
        let i = Ideal::new(vec![p("u1*u2 - u3^2")], MonomialOrder::Grevlex);
        // u3^2 ≡ u2 * u1 mod I
        let c = solve_combination(&[p("u3^2")], &[vec![p("u1")]], Some(&i), 2).unwrap();
        assert!(i.contains(&(&(&c[0] * &p("u1")) - &p("u3^2"))));
        assert!(solve_combination(&[p("u3")], &[vec![p("u1")]], Some(&i), 3).is_none());
    }

    #[test]
    fn determinant_of_kronecker_metric() {
        let v = VarTable::new(&["x", "y"]).unwrap();
        let p = |s: &str| parse_poly(s, &v).unwrap();
        let m = vec![vec![p("x"), p("y")], vec![p("y"), p("x")]];
        assert_eq!(det_poly(&m), p("x^2 - y^2"));
    }
}
