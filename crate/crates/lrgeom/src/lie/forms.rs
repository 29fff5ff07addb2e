use std::collections::BTreeMap;

use super::{LRPresentation, Mat};
use crate::groebner::QuotientRing;
use crate::par;
use crate::poly::{Frac, VarTable};
use crate::report::Witness;

/// All strictly increasing tuples of length `m` from `0..l`.
pub fn combinations(l: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, l: usize, m: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == m {
            out.push(acc.clone());
            return;
        }
        for i in start..l {
            acc.push(i);
            rec(i + 1, l, m, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if m <= l {
        rec(0, l, m, &mut Vec::new(), &mut out);
    }
    out
}

/// Sorts a tuple, returning the permutation sign, or `None` on a repeated index.
fn sort_signed(t: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = t.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

/// Alternating form on the generators, recorded by its values on increasing tuples.
/// Values are matrices of a common shape; scalar forms use 1×1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    arity: usize,
    gens: usize,
    shape: (usize, usize),
    values: BTreeMap<Vec<usize>, Mat>,
}

impl Form {
    pub fn zero(arity: usize, gens: usize, shape: (usize, usize)) -> Form {
        Form { arity, gens, shape, values: BTreeMap::new() }
    }

    /// Builds a form from its values on increasing tuples, evaluated in parallel.
    pub fn from_fn<F>(arity: usize, gens: usize, shape: (usize, usize), f: F) -> Form
    where
        F: Fn(&[usize]) -> Mat + Sync + Send,
    {
        let tuples = combinations(gens, arity);
        let vals = par::map(&tuples, |t| f(t));
        let mut form = Form::zero(arity, gens, shape);
        for (t, v) in tuples.into_iter().zip(vals) {
            form.set(&t, v);
        }
        form
    }

    pub fn from_scalars(arity: usize, gens: usize, values: impl IntoIterator<Item = (Vec<usize>, Frac)>) -> Form {
        let mut f = Form::zero(arity, gens, (1, 1));
        for (t, x) in values {
            f.set(&t, Mat::scalar(x));
        }
        f
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    /// Sets the value on a tuple; unsorted tuples are sorted with sign.
    pub fn set(&mut self, t: &[usize], v: Mat) {
        assert_eq!(t.len(), self.arity, "tuple length differs from arity");
        assert_eq!(v.shape(), self.shape, "value shape differs from form shape");
        let Some((s, odd)) = sort_signed(t) else { return };
        let v = if odd { -&v } else { v };
        if v.is_zero() {
            self.values.remove(&s);
        } else {
            self.values.insert(s, v);
        }
    }

    /// Value on an arbitrary tuple, using antisymmetry.
    pub fn get(&self, t: &[usize]) -> Mat {
        let zero = || Mat::zeros(self.shape.0, self.shape.1);
        let Some((s, odd)) = sort_signed(t) else { return zero() };
        match self.values.get(&s) {
            Some(v) if odd => -v,
            Some(v) => v.clone(),
            None => zero(),
        }
    }

    pub fn scalar(&self, t: &[usize]) -> Frac {
        self.get(t).as_scalar().clone()
    }

    pub fn tuples(&self) -> Vec<Vec<usize>> {
        combinations(self.gens, self.arity)
    }

    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> Form {
        let mut out = Form::zero(self.arity, self.gens, self.shape);
        for (t, v) in self.values.iter() {
            let w = f(v);
            out.shape = w.shape();
            out.set(t, w);
        }
        out
    }

    pub fn nf(&self, ring: &QuotientRing) -> Form {
        self.map(|m| m.nf(ring))
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!((self.arity, self.shape), (other.arity, other.shape), "form mismatch");
        let mut out = self.clone();
        for (t, v) in other.values.iter() {
            out.set(t, &out.get(t) + v);
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.map(|m| -m))
    }

    pub fn scale(&self, c: &Frac) -> Form {
        self.map(|m| m.scale(c))
    }

    pub fn trace(&self) -> Form {
        let mut out = Form::zero(self.arity, self.gens, (1, 1));
        for (t, v) in self.values.iter() {
            out.set(t, Mat::scalar(v.trace()));
        }
        out
    }

    /// Nonzero entries modulo I, as witnesses labelled by matrix position.
    pub fn residues(&self, ring: &QuotientRing, label: &str) -> Vec<Witness> {
        let vars = &ring.vars;
        let mut out = Vec::new();
        for (t, v) in self.values.iter() {
            for (r, c, x) in v.entries() {
                if !ring.frac_is_zero(x) {
                    let lbl = if self.shape == (1, 1) { label.to_string() } else { format!("{label}[{},{}]", r + 1, c + 1) };
                    out.push(Witness::new(t, lbl, ring.nf_frac(x).to_string_with(vars)));
                }
            }
        }
        out
    }

    pub fn is_zero_mod(&self, ring: &QuotientRing) -> bool {
        self.values.values().all(|v| v.is_zero_mod(ring))
    }

    pub fn to_strings(&self, vars: &VarTable) -> Vec<(Vec<usize>, Vec<Vec<String>>)> {
        self.values.iter().map(|(t, v)| (t.clone(), v.to_strings(vars))).collect()
    }
}

/// The Koszul formula with a pluggable action of generators on values:
/// `Σ_a (−1)^a act(i_a, ω(…î_a…)) + Σ_{a<b} (−1)^{a+b} Σ_k c_{i_a i_b}^k ω(X_k, …î_a…î_b…)`.
pub fn koszul_differential<A>(omega: &Form, pres: &LRPresentation, act: A) -> Form
where
    A: Fn(usize, &Mat) -> Mat + Sync + Send,
{
    let m = omega.arity;
    let l = pres.len();
    let ring = &pres.ring;
    let shape = omega.shape;
    Form::from_fn(m + 1, l, shape, |t| {
        let mut acc = Mat::zeros(shape.0, shape.1);
        for a in 0..=m {
            let rest: Vec<usize> = t.iter().enumerate().filter(|(p, _)| *p != a).map(|(_, &x)| x).collect();
            let v = act(t[a], &omega.get(&rest));
            acc = if a % 2 == 0 { &acc + &v } else { &acc - &v };
        }
        for a in 0..=m {
            for b in a + 1..=m {
                let rest: Vec<usize> =
                    t.iter().enumerate().filter(|(p, _)| *p != a && *p != b).map(|(_, &x)| x).collect();
                let mut inner = Mat::zeros(omega.shape.0, omega.shape.1);
                for k in 0..l {
                    let c = pres.c(t[a], t[b], k);
                    if c.is_zero() {
                        continue;
                    }
                    let mut tup = Vec::with_capacity(m);
                    tup.push(k);
                    tup.extend_from_slice(&rest);
                    let w = omega.get(&tup);
                    if !w.is_zero() {
                        inner = &inner + &w.scale(&Frac::from(c.clone()));
                    }
                }
                acc = if (a + b) % 2 == 0 { &acc + &inner } else { &acc - &inner };
            }
        }
        acc.nf(ring)
    })
}

/// Naive de Rham differential: generators act entrywise through the anchor.
pub fn ddr(omega: &Form, pres: &LRPresentation) -> Form {
    koszul_differential(omega, pres, |i, m| pres.act_mat(i, m))
}

/// Shuffle product with matrix multiplication of values.
pub fn cup(a: &Form, b: &Form, ring: &QuotientRing) -> Form {
    assert_eq!(a.gens, b.gens, "forms over different presentations");
    let (k, m) = (a.arity, b.arity);
    let shape = (&Mat::zeros(a.shape.0, a.shape.1) * &Mat::zeros(b.shape.0, b.shape.1)).shape();
    let subsets = combinations(k + m, k);
    Form::from_fn(k + m, a.gens, shape, |t| {
        let mut acc = Mat::zeros(shape.0, shape.1);
        for s in subsets.iter() {
            let left: Vec<usize> = s.iter().map(|&p| t[p]).collect();
            let right: Vec<usize> = (0..k + m).filter(|p| !s.contains(p)).map(|p| t[p]).collect();
            let x = a.get(&left);
            if x.is_zero() {
                continue;
            }
            let y = b.get(&right);
            if y.is_zero() {
                continue;
            }
            let inversions: usize = s.iter().enumerate().map(|(idx, &p)| p - idx).sum();
            let v = &x * &y;
            acc = if inversions.is_multiple_of(2) { &acc + &v } else { &acc - &v };
        }
        acc.nf(ring)
    })
}

/// Syzygy contractions `Σ_k S[k][α]·ω(X_k, rest)` that do not vanish mod I.
pub fn syzygy_contractions(omega: &Form, pres: &LRPresentation) -> Vec<Witness> {
    if omega.arity == 0 {
        return Vec::new();
    }
    let ring = &pres.ring;
    let l = pres.len();
    let rests = combinations(l, omega.arity - 1);
    let mut out = Vec::new();
    for (alpha, col) in pres.syzygies.iter().enumerate() {
        for rest in rests.iter() {
            let mut acc = Mat::zeros(omega.shape.0, omega.shape.1);
            for (k, s) in col.iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                let mut t = vec![k];
                t.extend_from_slice(rest);
                acc = &acc + &omega.get(&t).scale(&Frac::from(s.clone()));
            }
            for (r, c, x) in acc.entries() {
                if !ring.frac_is_zero(x) {
                    let mut idx = vec![alpha];
                    idx.extend_from_slice(rest);
                    out.push(Witness::new(
                        &idx,
                        format!("syzygy column {} contraction [{},{}]", alpha + 1, r + 1, c + 1),
                        ring.nf_frac(x).to_string_with(&ring.vars),
                    ));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn form_wellformed(omega: &Form, pres: &LRPresentation) -> bool {
    syzygy_contractions(omega, pres).is_empty()
}

/// `ddr C + sign·(C_i C_j − C_j C_i)` for a square matrix-valued one-form.
pub fn mc_defect(c: &Form, pres: &LRPresentation, sign: i32) -> Form {
    assert_eq!(c.arity, 1, "mc_defect takes a one-form");
    let d = ddr(c, pres);
    let s = Frac::from(crate::poly::Poly::int(sign as i64));
    let ring = &pres.ring;
    Form::from_fn(2, pres.len(), c.shape, |t| {
        let (ci, cj) = (c.get(&t[..1]), c.get(&t[1..]));
        let comm = ci.commutator(&cj);
        (&d.get(t) + &comm.scale(&s)).nf(ring)
    })
}
