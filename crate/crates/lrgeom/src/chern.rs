//! Chern character pieces and the transgression identity.
//!
//! All End-valued forms here are in the column convention.

use serde_json::{json, Value};
use thiserror::Error;

use crate::connection::Connection;
use crate::constructions::{fedosov_connection, fedosov_operator_curvature, Fedosov, Idempotent};
use crate::gauge::column_curvature;
use crate::groebner::{Ideal, QuotientRing};
use crate::lie::{cup, ddr, Derivation, Form, LRPresentation, Mat};
use crate::poly::{Coeff, Frac, Poly, PolyError, Symbol, VarTable};
use crate::report::{Entry, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error("matrix is not an endomorphism of the image: theta phi theta differs at ({0},{1})")]
    NotEndomorphism(usize, usize),
    #[error("the transgression integrand has a denominator depending on the parameter")]
    ParameterInDenominator,
    #[error("carrier has module syzygies; traces need a free or idempotent-presented carrier")]
    NonFree,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Matrix trace of `φ` after checking `θφθ ≡ φ`.
pub fn trace_end(phi: &Mat, theta: &Idempotent, ring: &QuotientRing) -> Result<Frac, ChernError> {
    let t = theta.matrix();
    let d = &(&(t * phi) * t) - phi;
    if let Some((r, c, _)) = d.entries().find(|(_, _, x)| !ring.frac_is_zero(x)) {
        return Err(ChernError::NotEndomorphism(r, c));
    }
    Ok(ring.nf_frac(&phi.trace()))
}

/// A module on which End-valued forms can be traced, with its connection.
#[derive(Clone, Debug)]
pub enum TraceCarrier {
    /// Free module with a row-convention connection.
    Free(Connection),
    /// Image of an idempotent with the connection `θd`.
    Projective(Idempotent),
}

impl TraceCarrier {
    pub fn identity(&self) -> Mat {
        match self {
            TraceCarrier::Free(c) => Mat::identity(c.rank()),
            TraceCarrier::Projective(t) => t.matrix().clone(),
        }
    }

    /// Curvature of the connection perturbed by the column-convention one-form `eta`.
    pub fn curvature(&self, pres: &LRPresentation, eta: &Form) -> Result<Form, ChernError> {
        match self {
            TraceCarrier::Free(c) => {
                if !c.carrier.is_free() {
                    return Err(ChernError::NonFree);
                }
                Ok(column_curvature(c, pres, eta))
            }
            TraceCarrier::Projective(t) => {
                let fed = Fedosov { theta: t.clone(), curvature: Form::zero(2, pres.len(), t.matrix().shape()), certificate: Vec::new() };
                Ok(fedosov_operator_curvature(&fed, pres, Some(eta)))
            }
        }
    }
}

/// `identity ∪ R ∪ … ∪ R` with `k` factors of `R`.
pub fn cup_power(identity: &Mat, r: &Form, k: usize, ring: &QuotientRing) -> Form {
    let mut p = Form::zero(0, r.gens(), identity.shape());
    p.set(&[], identity.clone());
    for _ in 0..k {
        p = cup(&p, r, ring);
    }
    p
}

#[derive(Clone, Debug)]
pub struct ChernPiece {
    pub degree: usize,
    pub form: Form,
    pub closed: bool,
}

#[derive(Clone, Debug)]
pub struct ChernReport {
    pub kappa: Coeff,
    /// Largest `k` with `2k ≤ l`; higher pieces vanish identically.
    pub cutoff: usize,
    pub pieces: Vec<ChernPiece>,
}

impl ChernReport {
    pub fn all_closed(&self) -> bool {
        self.pieces.iter().all(|p| p.closed)
    }

    pub fn piece(&self, degree: usize) -> Option<&ChernPiece> {
        self.pieces.iter().find(|p| p.degree == degree)
    }

    pub fn to_json(&self, vars: &VarTable) -> Value {
        let pieces: serde_json::Map<String, Value> = self
            .pieces
            .iter()
            .map(|p| {
                let vals: Vec<Value> = p
                    .form
                    .to_strings(vars)
                    .into_iter()
                    .map(|(t, m)| json!([t.iter().map(|i| i + 1).collect::<Vec<_>>(), m[0][0]]))
                    .collect();
                (p.degree.to_string(), Value::Array(vals))
            })
            .collect();
        json!({ "kappa": self.kappa.to_string(), "cutoff": self.cutoff, "pieces": pieces })
    }

    pub fn entries(&self) -> Vec<Entry> {
        self.pieces
            .iter()
            .map(|p| {
                if p.closed {
                    Entry::pass(format!("chern degree {} closed", p.degree))
                } else {
                    Entry::fail(format!("chern degree {} closed", p.degree), "ddr of the piece is nonzero")
                }
            })
            .collect()
    }
}

fn factorial(k: usize) -> Coeff {
    (1..=k).fold(Coeff::from_integer(1.into()), |acc, i| acc * Coeff::from_integer((i as i64).into()))
}

/// Pieces `tr(R^{∪k})·κ^k/k!` for `2k ≤ l` from a curvature form.
pub fn chern_from_curvature(identity: &Mat, r: &Form, pres: &LRPresentation, kappa: &Coeff) -> ChernReport {
    let ring = &pres.ring;
    let cutoff = pres.len() / 2;
    let mut pieces = Vec::new();
    let mut power = cup_power(identity, r, 0, ring);
    let mut scale = Coeff::from_integer(1.into());
    for k in 0..=cutoff {
        if k > 0 {
            power = cup(&power, r, ring);
            scale = &scale * kappa;
        }
        let c = &scale / &factorial(k);
        let form = power.trace().scale(&Frac::from(Poly::constant(c))).nf(ring);
        let closed = ddr(&form, pres).is_zero_mod(ring);
        pieces.push(ChernPiece { degree: 2 * k, form, closed });
    }
    ChernReport { kappa: kappa.clone(), cutoff, pieces }
}

pub fn chern_character(theta: &Idempotent, pres: &LRPresentation, kappa: &Coeff) -> ChernReport {
    let fed = fedosov_connection(theta, pres);
    chern_from_curvature(theta.matrix(), &fed.curvature, pres, kappa)
}

fn compare_reports(task: &str, a: &ChernReport, b: &[Form], ring: &QuotientRing) -> Entry {
    let mut w = Vec::new();
    for (p, q) in a.pieces.iter().zip(b) {
        for x in p.form.sub(q).residues(ring, &format!("degree {}", p.degree)) {
            w.push(x);
        }
    }
    Entry::check(task, w)
}

/// `ch(θ ⊕ θ′) = ch(θ) + ch(θ′)` piecewise.
pub fn chern_additivity_check(theta: &Idempotent, other: &Idempotent, pres: &LRPresentation, kappa: &Coeff) -> Vec<Entry> {
    let ring = &pres.ring;
    let a = chern_character(theta, pres, kappa);
    let b = chern_character(other, pres, kappa);
    let sum = chern_character(&theta.direct_sum(other), pres, kappa);
    let expected: Vec<Form> = a.pieces.iter().zip(b.pieces.iter()).map(|(x, y)| x.form.add(&y.form)).collect();
    vec![compare_reports("chern additivity", &sum, &expected, ring)]
}

/// `ch(θ ⊗ θ′) = ch(θ) ∪ ch(θ′)`, with the tensor curvature `R⊗θ′ + θ⊗R′` cross-checked.
pub fn chern_tensor_check(theta: &Idempotent, other: &Idempotent, pres: &LRPresentation, kappa: &Coeff) -> Vec<Entry> {
    let ring = &pres.ring;
    let (t, u) = (theta.matrix(), other.matrix());
    let fa = fedosov_connection(theta, pres);
    let fb = fedosov_connection(other, pres);
    let kron = theta.tensor(other);
    let fk = fedosov_connection(&kron, pres);
    let tensor_curv = Form::from_fn(2, pres.len(), kron.matrix().shape(), |p| {
        (&fa.curvature.get(p).kron(u) + &t.kron(&fb.curvature.get(p))).nf(ring)
    });
    let mut out = vec![Entry::check(
        "Kronecker curvature equals tensor curvature",
        fk.curvature.sub(&tensor_curv).residues(ring, "difference"),
    )];
    let a = chern_from_curvature(t, &fa.curvature, pres, kappa);
    let b = chern_from_curvature(u, &fb.curvature, pres, kappa);
    let prod = chern_from_curvature(kron.matrix(), &tensor_curv, pres, kappa);
    let expected: Vec<Form> = (0..=a.cutoff)
        .map(|k| {
            let mut acc = Form::zero(2 * k, pres.len(), (1, 1));
            for i in 0..=k {
                acc = acc.add(&cup(&a.pieces[i].form, &b.pieces[k - i].form, ring));
            }
            acc.nf(ring)
        })
        .collect();
    out.push(compare_reports("chern multiplicativity", &prod, &expected, ring));
    out
}

/// The presentation over the ring extended by a fresh coordinate used as a parameter.
fn with_parameter(pres: &LRPresentation) -> Result<(LRPresentation, Symbol), ChernError> {
    let vars = pres.vars();
    let name = ["s", "s_param", "transgression_s"]
        .into_iter()
        .find(|n| vars.coord_index(n).is_none() && vars.jet_index(n).is_none())
        .expect("a free parameter name");
    let vars2 = vars.with_extra_coord(name)?;
    let s = Symbol::coord(vars.n_coords());
    let ideal = Ideal::new(pres.ring.ideal.generators().to_vec(), pres.ring.order());
    let ring = QuotientRing::new(vars2, ideal);
    let anchors = pres
        .anchors
        .iter()
        .map(|a| {
            let mut c = a.coeffs.clone();
            c.push(Poly::zero());
            Derivation::new(c)
        })
        .collect();
    let p = LRPresentation {
        ring,
        names: pres.names.clone(),
        anchors,
        structure: pres.structure.clone(),
        syzygies: pres.syzygies.clone(),
        faithful: pres.faithful,
    };
    Ok((p, s))
}

/// `∫₀¹ p ds` for a polynomial in the parameter `s`.
pub fn integrate_unit_interval(p: &Poly, s: Symbol) -> Poly {
    Poly::from_terms(p.terms().map(|(m, c)| {
        let (rest, k) = m.split_off(s);
        (rest, c / Coeff::from_integer(((k + 1) as i64).into()))
    }))
}

/// `tr((R^η)^m) − tr(R^m) = ddr ∫₀¹ m·tr(η ∪ (R^s)^{m−1}) ds`, with `R^s` the
/// curvature of the connection perturbed by `sη`.
pub fn transgression_check(carrier: &TraceCarrier, pres: &LRPresentation, eta: &Form, m: usize) -> Result<Vec<Entry>, ChernError> {
    assert!(m >= 1, "monomial degree must be positive");
    let ring = &pres.ring;
    let id = carrier.identity();
    let zero = Form::zero(1, pres.len(), id.shape());
    let r0 = carrier.curvature(pres, &zero)?;
    let r_eta = carrier.curvature(pres, eta)?;
    let lhs = cup_power(&id, &r_eta, m, ring).trace().sub(&cup_power(&id, &r0, m, ring).trace()).nf(ring);

    let (pres_s, s) = with_parameter(pres)?;
    let s_eta = eta.scale(&Frac::from(Poly::symbol(s)));
    let r_s = carrier.curvature(&pres_s, &s_eta)?;
    let inner = cup(eta, &cup_power(&id, &r_s, m - 1, &pres_s.ring), &pres_s.ring).trace();
    let mut integrated = Form::zero(inner.arity(), inner.gens(), (1, 1));
    for t in inner.tuples() {
        let x = inner.scalar(&t);
        if x.den().symbols().contains(&s) {
            return Err(ChernError::ParameterInDenominator);
        }
        let num = integrate_unit_interval(x.num(), s).scale(&Coeff::from_integer((m as i64).into()));
        integrated.set(&t, Mat::scalar(Frac::new(num, x.den().clone())?));
    }
    let rhs = ddr(&integrated, pres);
    let w: Vec<Witness> = lhs.sub(&rhs).residues(ring, "difference");
    Ok(vec![Entry::check(format!("transgression x^{m}"), w)])
}
