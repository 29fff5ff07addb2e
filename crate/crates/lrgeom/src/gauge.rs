//! Gauge transformations of connections on free carriers.
//!
//! Gauge elements act on column coefficient vectors, so the one-forms in this
//! module are in the column convention: the connection matrix of `Γ` is
//! `A_i = Γ_iᵀ`. Use [`to_column`] and [`to_row`] to move between the two.

use thiserror::Error;

use crate::connection::{curvature_matrix, Connection};
use crate::groebner::QuotientRing;
use crate::lie::{koszul_differential, Form, LRPresentation, Mat};
use crate::report::{Entry, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("gauge matrices must be square of the same size")]
    Shape,
    #[error("supplied inverse fails at ({0},{1}) of {2}")]
    NotInverse(usize, usize, &'static str),
    #[error("the carrier has module syzygies; gauge calculus needs a free frame")]
    NonFree,
}

/// An invertible matrix with its explicitly supplied inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeElement {
    g: Mat,
    g_inv: Mat,
}

impl GaugeElement {
    pub fn new(g: Mat, g_inv: Mat, ring: &QuotientRing) -> Result<GaugeElement, GaugeError> {
        let n = g.rows();
        if g.shape() != (n, n) || g_inv.shape() != (n, n) {
            return Err(GaugeError::Shape);
        }
        let id = Mat::identity(n);
        for (prod, which) in [(&g * &g_inv, "g g_inv"), (&g_inv * &g, "g_inv g")] {
            let d = &prod - &id;
            let bad = d.entries().find(|(_, _, x)| !ring.frac_is_zero(x)).map(|(r, c, _)| (r, c));
            if let Some((r, c)) = bad {
                return Err(GaugeError::NotInverse(r, c, which));
            }
        }
        Ok(GaugeElement { g, g_inv })
    }

    pub fn identity(n: usize) -> GaugeElement {
        GaugeElement { g: Mat::identity(n), g_inv: Mat::identity(n) }
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }

    pub fn inverse(&self) -> &Mat {
        &self.g_inv
    }

    /// `self ∘ other`, i.e. the matrix product `self·other`.
    pub fn compose(&self, other: &GaugeElement) -> GaugeElement {
        GaugeElement { g: &self.g * &other.g, g_inv: &other.g_inv * &self.g_inv }
    }

    pub fn conjugate(&self, m: &Mat) -> Mat {
        &(&self.g * m) * &self.g_inv
    }
}

pub fn transpose_form(f: &Form) -> Form {
    f.map(Mat::transpose)
}

/// Column-convention connection matrices `A_i = Γ_iᵀ`.
pub fn to_column(conn: &Connection) -> Form {
    transpose_form(&conn.gamma_form())
}

pub fn to_row(f: &Form) -> Form {
    transpose_form(f)
}

/// `X_i(φ) + A_iφ − φA_i`.
fn end_act(a: &Form, pres: &LRPresentation, i: usize, phi: &Mat) -> Mat {
    let ai = a.get(&[i]);
    &(&pres.act_mat(i, phi) + &(&ai * phi)) - &(phi * &ai)
}

fn require_free(conn: &Connection) -> Result<(), GaugeError> {
    if conn.carrier.is_free() {
        Ok(())
    } else {
        Err(GaugeError::NonFree)
    }
}

/// `ρ_g(X_i) = g·∇_i(g⁻¹)` with the column End-connection.
pub fn maurer_cartan(g: &GaugeElement, conn: &Connection, pres: &LRPresentation) -> Result<Form, GaugeError> {
    require_free(conn)?;
    let a = to_column(conn);
    let ring = &pres.ring;
    Ok(Form::from_fn(1, pres.len(), g.g.shape(), |t| (&g.g * &end_act(&a, pres, t[0], &g.g_inv)).nf(ring)))
}

/// `g.η = ρ_g + gηg⁻¹`; the acted connection is `A + g.η`.
pub fn gauge_act(g: &GaugeElement, conn: &Connection, pres: &LRPresentation, eta: &Form) -> Result<Form, GaugeError> {
    let rho = maurer_cartan(g, conn, pres)?;
    let ring = &pres.ring;
    Ok(Form::from_fn(1, pres.len(), g.g.shape(), |t| (&rho.get(t) + &g.conjugate(&eta.get(t))).nf(ring)))
}

/// Column-convention curvature of `A + η`.
pub fn column_curvature(conn: &Connection, pres: &LRPresentation, eta: &Form) -> Form {
    transpose_form(&curvature_matrix(&conn.perturbed(&to_row(eta)), pres))
}

fn form_diff(label: &str, a: &Form, b: &Form, ring: &QuotientRing) -> Vec<Witness> {
    a.sub(b).residues(ring, label)
}

/// Certificates for the group laws and the gauge action.
pub fn gauge_certificates(
    g: &GaugeElement,
    h: &GaugeElement,
    conn: &Connection,
    pres: &LRPresentation,
    eta: &Form,
) -> Result<Vec<Entry>, GaugeError> {
    require_free(conn)?;
    let ring = &pres.ring;
    let l = pres.len();
    let b = g.g.rows();
    let a = to_column(conn);
    let id = GaugeElement::identity(b);
    let mut out = Vec::new();

    out.push(Entry::check("rho_id = 0", maurer_cartan(&id, conn, pres)?.residues(ring, "rho_id")));

    let rho_g = maurer_cartan(g, conn, pres)?;
    let alt = Form::from_fn(1, l, (b, b), |t| (-&(&end_act(&a, pres, t[0], &g.g) * &g.g_inv)).nf(ring));
    out.push(Entry::check("g nabla(g^-1) = -(nabla g) g^-1", form_diff("difference", &rho_g, &alt, ring)));

    let rho_h = maurer_cartan(h, conn, pres)?;
    let hg = h.compose(g);
    let rho_hg = maurer_cartan(&hg, conn, pres)?;
    let cocycle = Form::from_fn(1, l, (b, b), |t| (&h.conjugate(&rho_g.get(t)) + &rho_h.get(t)).nf(ring));
    out.push(Entry::check("cocycle rho_hg = h rho_g h^-1 + rho_h", form_diff("difference", &rho_hg, &cocycle, ring)));

    let zero = Form::zero(1, l, (b, b));
    let r = column_curvature(conn, pres, &zero);
    let d_rho = koszul_differential(&rho_g, pres, |i, m| end_act(&a, pres, i, m));
    let lhs = Form::from_fn(2, l, (b, b), |t| {
        let (ri, rj) = (rho_g.get(&t[..1]), rho_g.get(&t[1..]));
        (&d_rho.get(t) + &ri.commutator(&rj)).nf(ring)
    });
    let rhs = Form::from_fn(2, l, (b, b), |t| (&g.conjugate(&r.get(t)) - &r.get(t)).nf(ring));
    out.push(Entry::check("Maurer-Cartan nabla rho + [rho,rho] = g R g^-1 - R", form_diff("difference", &lhs, &rhs, ring)));

    let g_eta = gauge_act(g, conn, pres, eta)?;
    let r_eta = column_curvature(conn, pres, eta);
    let r_g_eta = column_curvature(conn, pres, &g_eta);
    let conj = r_eta.map(|m| g.conjugate(m).nf(ring));
    out.push(Entry::check("curvature conjugation R^(g.eta) = g R^eta g^-1", form_diff("difference", &r_g_eta, &conj, ring)));

    let hg_eta = gauge_act(&hg, conn, pres, eta)?;
    let h_g_eta = gauge_act(h, conn, pres, &g_eta)?;
    out.push(Entry::check("left action (hg).eta = h.(g.eta)", form_diff("difference", &hg_eta, &h_g_eta, ring)));
    Ok(out)
}
