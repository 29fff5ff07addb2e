//! Connections given by Christoffel data relative to chosen module generators.

use thiserror::Error;

use crate::lie::{combinations, koszul_differential, mc_defect, Form, LRPresentation, Mat};
use crate::linsolve::{det_frac, simplify, solve_frac};
use crate::par;
use crate::poly::{rat, Frac, Poly};
use crate::report::{Entry, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("Christoffel data has the wrong shape: {0}")]
    Shape(String),
    #[error("denominator `{0}` is not a product of declared invertible elements")]
    Denominator(String),
    #[error("the presentation has syzygies; the Koszul system is verified, not solved")]
    SyzygiesPresent,
    #[error("the metric is singular")]
    SingularMetric,
    #[error("operation needs the carrier to be the Lie-Rinehart algebra itself")]
    CarrierNotL,
    #[error("`{0}` vanishes modulo the ideal and cannot be inverted")]
    ZeroDivisor(String),
    #[error("solved connection failed its round-trip check: {0}")]
    RoundTrip(String),
}

/// The module on which a connection acts: `rank` generators with optional syzygies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleCarrier {
    pub rank: usize,
    pub syzygies: Vec<Vec<Poly>>,
    pub is_lie: bool,
}

impl ModuleCarrier {
    pub fn lie(pres: &LRPresentation) -> ModuleCarrier {
        ModuleCarrier { rank: pres.len(), syzygies: pres.syzygies.clone(), is_lie: true }
    }

    pub fn free(rank: usize) -> ModuleCarrier {
        ModuleCarrier { rank, syzygies: Vec::new(), is_lie: false }
    }

    pub fn is_free(&self) -> bool {
        self.syzygies.is_empty()
    }
}

/// How a generator acts on the values of a form in [`cov_deriv`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valued {
    /// Row vectors of coefficients in the carrier generators.
    Section,
    /// Endomorphisms in the row convention, via the induced End-connection.
    Endomorphism,
}

/// `∇_{X_i} v_μ = Σ_ν gamma[i][μ][ν] v_ν`; `gamma[i]` is the matrix `Γ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub carrier: ModuleCarrier,
    pub gamma: Vec<Mat>,
    pub invertibles: Vec<Poly>,
}

impl Connection {
    pub fn new(carrier: ModuleCarrier, gamma: Vec<Mat>, invertibles: Vec<Poly>) -> Result<Connection, ConnectionError> {
        let b = carrier.rank;
        if let Some(bad) = gamma.iter().position(|g| g.shape() != (b, b)) {
            return Err(ConnectionError::Shape(format!("Gamma_{} is {:?}, expected {b}x{b}", bad + 1, gamma[bad].shape())));
        }
        let conn = Connection { carrier, gamma, invertibles };
        for g in conn.gamma.iter() {
            for (_, _, x) in g.entries() {
                conn.check_denominator(x.den())?;
            }
        }
        Ok(conn)
    }

    pub fn zero(carrier: ModuleCarrier, l: usize) -> Connection {
        let b = carrier.rank;
        Connection { carrier, gamma: vec![Mat::zeros(b, b); l], invertibles: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.carrier.rank
    }

    pub fn is_fractional(&self) -> bool {
        self.gamma.iter().any(|g| g.entries().any(|(_, _, x)| !x.is_poly()))
    }

    /// Accepts `den` when repeated exact division by declared invertibles leaves a constant.
    pub fn check_denominator(&self, den: &Poly) -> Result<(), ConnectionError> {
        let mut d = den.clone();
        'outer: while d.as_constant().is_none() {
            for f in self.invertibles.iter() {
                if f.as_constant().is_none() {
                    if let Ok(q) = d.divide_exact(f) {
                        d = q;
                        continue 'outer;
                    }
                }
            }
            return Err(ConnectionError::Denominator(format!("{den:?}")));
        }
        Ok(())
    }

    pub fn christoffel(&self, i: usize, mu: usize, nu: usize) -> &Frac {
        self.gamma[i].get(mu, nu)
    }

    pub fn gamma_form(&self) -> Form {
        let l = self.gamma.len();
        let b = self.rank();
        let mut f = Form::zero(1, l, (b, b));
        for (i, g) in self.gamma.iter().enumerate() {
            f.set(&[i], g.clone());
        }
        f
    }

    /// `∇ + η` for a matrix-valued one-form η.
    pub fn perturbed(&self, eta: &Form) -> Connection {
        let gamma = self.gamma.iter().enumerate().map(|(i, g)| g + &eta.get(&[i])).collect();
        Connection { carrier: self.carrier.clone(), gamma, invertibles: self.invertibles.clone() }
    }

    /// `∇_{X_i}` applied to a value of the given kind.
    pub fn act(&self, pres: &LRPresentation, i: usize, m: &Mat, kind: Valued) -> Mat {
        let x = pres.act_mat(i, m);
        match kind {
            Valued::Section => &x + &(m * &self.gamma[i]),
            Valued::Endomorphism => &(&x + &(m * &self.gamma[i])) - &(&self.gamma[i] * m),
        }
    }
}

/// Covariant derivative of a carrier-valued or End-valued form.
pub fn cov_deriv(conn: &Connection, pres: &LRPresentation, omega: &Form, kind: Valued) -> Form {
    koszul_differential(omega, pres, |i, m| conn.act(pres, i, m, kind))
}

/// `R_ij = X_iΓ_j − X_jΓ_i + Γ_jΓ_i − Γ_iΓ_j − Σ_k c_ij^k Γ_k`, which is the
/// Maurer-Cartan defect of Γ with sign −1.
pub fn curvature_matrix(conn: &Connection, pres: &LRPresentation) -> Form {
    mc_defect(&conn.gamma_form(), pres, -1)
}

fn weights_to_witnesses(pres: &LRPresentation, index: &[usize], label: &str, weights: &[Frac]) -> Vec<Witness> {
    pres.derivation_residues(weights)
        .into_iter()
        .map(|(t, r)| Witness::new(index, format!("{label} on {}", pres.vars().coords()[t]), r.to_string_with(pres.vars())))
        .collect()
}

/// Torsion `Σ_k (Γ_ij^k − Γ_ji^k − c_ij^k) X_k` on every coordinate, per pair `i<j`.
pub fn torsion_check(conn: &Connection, pres: &LRPresentation) -> Result<Vec<Entry>, ConnectionError> {
    if !conn.carrier.is_lie {
        return Err(ConnectionError::CarrierNotL);
    }
    let l = pres.len();
    let pairs = combinations(l, 2);
    Ok(par::map(&pairs, |p| {
        let (i, j) = (p[0], p[1]);
        let w: Vec<Frac> = (0..l)
            .map(|k| &(conn.christoffel(i, j, k) - conn.christoffel(j, i, k)) - &Frac::from(pres.c(i, j, k).clone()))
            .collect();
        Entry::check(format!("torsion ({},{})", pres.names[i], pres.names[j]), weights_to_witnesses(pres, p, "T", &w))
    }))
}

/// Torsion values `T(X_i,X_j)` as coefficient rows over the generators.
pub fn torsion_form(conn: &Connection, pres: &LRPresentation) -> Form {
    let l = pres.len();
    Form::from_fn(2, l, (1, l), |t| {
        let (i, j) = (t[0], t[1]);
        Mat::row_vector(
            (0..l)
                .map(|k| &(conn.christoffel(i, j, k) - conn.christoffel(j, i, k)) - &Frac::from(pres.c(i, j, k).clone()))
                .collect(),
        )
    })
}

/// Symmetric bilinear form on the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub g: Mat,
}

impl Metric {
    pub fn new(g: Mat) -> Metric {
        Metric { g }
    }

    pub fn get(&self, i: usize, j: usize) -> &Frac {
        self.g.get(i, j)
    }

    /// Asymmetric entries and nonvanishing syzygy contractions `Σ_k S[k][α] G_kj`.
    pub fn check(&self, pres: &LRPresentation) -> Vec<Entry> {
        let ring = &pres.ring;
        let l = self.g.rows();
        let mut sym = Vec::new();
        for i in 0..l {
            for j in i + 1..l {
                let d = self.g.get(i, j) - self.g.get(j, i);
                if !ring.frac_is_zero(&d) {
                    sym.push(Witness::new(&[i, j], "G_ij - G_ji", ring.nf_frac(&d).to_string_with(&ring.vars)));
                }
            }
        }
        let mut wf = Vec::new();
        for (alpha, col) in pres.syzygies.iter().enumerate() {
            for j in 0..l {
                let s = col.iter().enumerate().fold(Frac::zero(), |acc, (k, c)| &acc + &self.g.get(k, j).mul_poly(c));
                if !ring.frac_is_zero(&s) {
                    wf.push(Witness::new(&[alpha, j], "syzygy contraction", ring.nf_frac(&s).to_string_with(&ring.vars)));
                }
            }
        }
        vec![Entry::check("metric symmetric", sym), Entry::check("metric well-formed", wf)]
    }
}

/// `X_i(G_jk) − Σ_m Γ_ij^m G_mk − Σ_m Γ_ik^m G_jm ≡ 0` per triple.
pub fn metric_compat_check(conn: &Connection, pres: &LRPresentation, metric: &Metric) -> Vec<Entry> {
    let l = pres.len();
    let triples: Vec<[usize; 3]> = (0..l).flat_map(|i| (0..l).flat_map(move |j| (0..l).map(move |k| [i, j, k]))).collect();
    par::map(&triples, |&[i, j, k]| {
        let mut v = pres.act(i, metric.get(j, k));
        for m in 0..l {
            v = &v - &(conn.christoffel(i, j, m) * metric.get(m, k));
            v = &v - &(conn.christoffel(i, k, m) * metric.get(j, m));
        }
        let w = if pres.ring.frac_is_zero(&v) {
            Vec::new()
        } else {
            vec![Witness::new(&[i, j, k], "residue", pres.ring.nf_frac(&v).to_string_with(pres.vars()))]
        };
        Entry::check(format!("metric ({},{},{})", pres.names[i], pres.names[j], pres.names[k]), w)
    })
}

/// Right-hand side of the Koszul equation for `2G(∇_{X_i}X_j, X_k)`.
pub fn koszul_rhs(metric: &Metric, pres: &LRPresentation, i: usize, j: usize, k: usize) -> Frac {
    let l = pres.len();
    let g = |a: usize, b: usize| metric.get(a, b);
    let mut v = &(&pres.act(i, g(j, k)) + &pres.act(j, g(k, i))) - &pres.act(k, g(i, j));
    for m in 0..l {
        let (cij, cjk, cki) = (pres.c(i, j, m), pres.c(j, k, m), pres.c(k, i, m));
        if !cij.is_zero() {
            v = &v + &g(m, k).mul_poly(cij);
        }
        if !cjk.is_zero() {
            v = &v - &g(m, i).mul_poly(cjk);
        }
        if !cki.is_zero() {
            v = &v + &g(m, j).mul_poly(cki);
        }
    }
    pres.ring.nf_frac(&v)
}

/// `2 Σ_m Γ_ij^m G_mk ≡ koszul_rhs(i,j,k)` for all triples.
pub fn koszul_verify(conn: &Connection, pres: &LRPresentation, metric: &Metric) -> Result<Vec<Entry>, ConnectionError> {
    if !conn.carrier.is_lie {
        return Err(ConnectionError::CarrierNotL);
    }
    let l = pres.len();
    let triples: Vec<[usize; 3]> = (0..l).flat_map(|i| (0..l).flat_map(move |j| (0..l).map(move |k| [i, j, k]))).collect();
    Ok(par::map(&triples, |&[i, j, k]| {
        let mut lhs = Frac::zero();
        for m in 0..l {
            lhs = &lhs + &(conn.christoffel(i, j, m) * metric.get(m, k));
        }
        let d = &lhs.scale(&rat(2, 1)) - &koszul_rhs(metric, pres, i, j, k);
        let w = if pres.ring.frac_is_zero(&d) {
            Vec::new()
        } else {
            vec![Witness::new(&[i, j, k], "2G(nabla_i X_j, X_k) - rhs", pres.ring.nf_frac(&d).to_string_with(pres.vars()))]
        };
        Entry::check(format!("koszul ({},{},{})", pres.names[i], pres.names[j], pres.names[k]), w)
    }))
}

/// Solves the Koszul equations by exact elimination over fractions.
///
/// Refuses presentations with syzygies and singular metrics. The result is
/// checked against [`koszul_verify`], [`torsion_check`] and [`metric_compat_check`].
pub fn koszul_solve_free(pres: &LRPresentation, metric: &Metric, invertibles: &[Poly]) -> Result<Connection, ConnectionError> {
    if !pres.syzygies.is_empty() {
        return Err(ConnectionError::SyzygiesPresent);
    }
    let l = pres.len();
    let rows: Vec<Vec<Frac>> = (0..l).map(|r| metric.g.row(r)).collect();
    let det = det_frac(&rows);
    if pres.ring.frac_is_zero(&det) {
        return Err(ConnectionError::SingularMetric);
    }
    let mut factors: Vec<Poly> = Vec::new();
    let mut push = |p: &Poly| {
        let c = p.content();
        let p = p.scale(&c.recip());
        if p.as_constant().is_none() && !factors.contains(&p) {
            factors.push(p);
        }
    };
    push(det.num());
    let mut cofactor = det.num().clone();
    for f in invertibles {
        push(f);
        while let Ok(q) = cofactor.divide_exact(f) {
            cofactor = q;
        }
    }
    push(&cofactor);
    let pairs: Vec<(usize, usize)> = (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).collect();
    let rhs: Vec<Vec<Frac>> = par::map(&pairs, |&(i, j)| (0..l).map(|k| koszul_rhs(metric, pres, i, j, k).scale(&rat(1, 2))).collect());
    // G is symmetric, so Γ_ij·G = rhs_ij/2 is G·x = b with one column per pair
    let b: Vec<Vec<Frac>> = (0..l).map(|k| rhs.iter().map(|r| r[k].clone()).collect()).collect();
    let x = solve_frac(&rows, &b, &factors).map_err(|_| ConnectionError::SingularMetric)?;
    let mut gamma = vec![Mat::zeros(l, l); l];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        for m in 0..l {
            gamma[i].set(j, m, simplify(&pres.ring.nf_frac(&x[m][col]), &factors));
        }
    }
    let mut inv = invertibles.to_vec();
    inv.extend(factors.iter().cloned());
    let conn = Connection { carrier: ModuleCarrier::lie(pres), gamma, invertibles: inv };
    let mut checks = koszul_verify(&conn, pres, metric)?;
    checks.extend(torsion_check(&conn, pres)?);
    checks.extend(metric_compat_check(&conn, pres, metric));
    if let Some(bad) = checks.iter().find(|e| !e.passed()) {
        return Err(ConnectionError::RoundTrip(bad.task.clone()));
    }
    Ok(conn)
}

/// Second Bianchi identity for any connection; first Bianchi when the carrier is L.
pub fn bianchi_checks(conn: &Connection, pres: &LRPresentation) -> Vec<Entry> {
    let ring = &pres.ring;
    let r = curvature_matrix(conn, pres);
    let d = cov_deriv(conn, pres, &r, Valued::Endomorphism);
    let mut out = vec![Entry::check("second Bianchi", d.residues(ring, "nabla R"))];
    if conn.carrier.is_lie {
        let l = pres.len();
        let triples = combinations(l, 3);
        let w: Vec<Witness> = par::map(&triples, |t| {
            let (i, j, k) = (t[0], t[1], t[2]);
            let weights: Vec<Frac> = (0..l)
                .map(|lam| {
                    let a = r.get(&[i, j]);
                    let b = r.get(&[j, k]);
                    let c = r.get(&[k, i]);
                    &(a.get(k, lam) + b.get(i, lam)) + c.get(j, lam)
                })
                .collect();
            weights_to_witnesses(pres, t, "cyclic sum", &weights)
        })
        .into_iter()
        .flatten()
        .collect();
        out.push(Entry::check("first Bianchi", w));
    }
    out
}

/// Localized data: `∇_{Σ a_k X_k} w = Σ_k a_k (X_k(w) + wΓ_k)` for fractional weights and sections.
pub fn localized_nabla(conn: &Connection, pres: &LRPresentation, weights: &[Frac], w: &Mat) -> Mat {
    let mut acc = Mat::zeros(w.rows(), w.cols());
    for (k, a) in weights.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        acc = &acc + &conn.act(pres, k, w, Valued::Section).scale(a);
    }
    acc
}

/// Weights of the bracket `[Σ a_k X_k, Σ b_k X_k]` for fractional coefficients.
pub fn localized_bracket(pres: &LRPresentation, a: &[Frac], b: &[Frac]) -> Vec<Frac> {
    let l = pres.len();
    let mut out = vec![Frac::zero(); l];
    for i in 0..l {
        for j in 0..l {
            if a[i].is_zero() || b[j].is_zero() {
                continue;
            }
            let ab = &a[i] * &b[j];
            for k in 0..l {
                let c = pres.c(i, j, k);
                if !c.is_zero() {
                    out[k] = &out[k] + &ab.mul_poly(c);
                }
            }
        }
    }
    for k in 0..l {
        for i in 0..l {
            if !a[i].is_zero() {
                out[k] = &out[k] + &(&a[i] * &pres.act(i, &b[k]));
            }
            if !b[i].is_zero() {
                out[k] = &out[k] - &(&b[i] * &pres.act(i, &a[k]));
            }
        }
    }
    out
}

/// Parameters of a localization check: section `v_mu / t`, directions `X_i / r`, `X_j / s`,
/// and `u` for the representative change `(u v)/(u t)`.
#[derive(Clone, Debug)]
pub struct LocalizationData {
    pub s: Poly,
    pub t: Poly,
    pub r: Poly,
    pub u: Poly,
    pub mu: usize,
    pub i: usize,
    pub j: usize,
}

pub fn localization_check(conn: &Connection, pres: &LRPresentation, data: &LocalizationData) -> Result<Vec<Entry>, ConnectionError> {
    let ring = &pres.ring;
    let vars = pres.vars();
    for p in [&data.s, &data.t, &data.r, &data.u] {
        if ring.is_zero(p) {
            return Err(ConnectionError::ZeroDivisor(p.to_string_with(vars)));
        }
    }
    let l = pres.len();
    let b = conn.rank();
    let unit = |k: usize, scale: &Frac| -> Vec<Frac> {
        (0..l).map(|m| if m == k { scale.clone() } else { Frac::zero() }).collect()
    };
    let basis = |scale: &Frac| -> Mat {
        Mat::row_vector((0..b).map(|m| if m == data.mu { scale.clone() } else { Frac::zero() }).collect())
    };
    let inv = |p: &Poly| Frac::new(Poly::one(), p.clone()).expect("nonzero");
    let frac_of = |p: &Poly| Frac::from(p.clone());
    let mat_residues = |label: &str, x: &Mat, y: &Mat| -> Vec<Witness> {
        let mut w = Vec::new();
        for (r, c, a) in x.entries() {
            if !ring.frac_eq(a, y.get(r, c)) {
                w.push(Witness::new(&[r, c], label.to_string(), ring.nf_frac(&(a - y.get(r, c))).to_string_with(vars)));
            }
        }
        w
    };

    let x_over_s = unit(data.i, &inv(&data.s));
    let v_over_t = basis(&inv(&data.t));
    // closed formula (t ∇_X v − X(t) v)/(s t²)
    let nabla_v = conn.act(pres, data.i, &basis(&Frac::one()), Valued::Section);
    let xt = pres.act_poly(data.i, &data.t);
    let closed = (&nabla_v.scale(&frac_of(&data.t)) - &basis(&Frac::from(xt))).scale(&inv(&(&data.s * &data.t.pow(2))));
    let direct = localized_nabla(conn, pres, &x_over_s, &v_over_t);
    let mut out = vec![Entry::check("localized connection formula", mat_residues("difference", &direct, &closed))];

    let uv_over_ut = basis(&Frac::new(data.u.clone(), &data.u * &data.t).expect("nonzero"));
    let uv = basis(&frac_of(&data.u));
    let ut = &data.u * &data.t;
    let nabla_uv = conn.act(pres, data.i, &uv, Valued::Section);
    let xut = pres.act_poly(data.i, &ut);
    let closed_u = (&nabla_uv.scale(&frac_of(&ut)) - &uv.scale(&Frac::from(xut))).scale(&inv(&(&data.s * &ut.pow(2))));
    let direct_u = localized_nabla(conn, pres, &x_over_s, &uv_over_ut);
    let mut w = mat_residues("closed formula", &closed_u, &closed);
    w.extend(mat_residues("direct", &direct_u, &direct));
    out.push(Entry::check("representative change", w));

    let xr = unit(data.i, &inv(&data.r));
    let ys = unit(data.j, &inv(&data.s));
    let a = localized_nabla(conn, pres, &xr, &localized_nabla(conn, pres, &ys, &v_over_t));
    let bb = localized_nabla(conn, pres, &ys, &localized_nabla(conn, pres, &xr, &v_over_t));
    let br = localized_nabla(conn, pres, &localized_bracket(pres, &xr, &ys), &v_over_t);
    let lhs = &(&a - &bb) - &br;
    let curv = curvature_matrix(conn, pres).get(&[data.i, data.j]);
    let rhs = (&basis(&Frac::one()) * &curv).scale(&inv(&(&(&data.r * &data.s) * &data.t)));
    out.push(Entry::check("localized curvature scaling", mat_residues("difference", &lhs, &rhs)));
    Ok(out)
}

/// `R^{∇+η} − R − ∇η + (η_iη_j − η_jη_i)` in the row convention; zero for every η.
pub fn perturbation_defect(conn: &Connection, pres: &LRPresentation, eta: &Form) -> Form {
    let r = curvature_matrix(conn, pres);
    let r_eta = curvature_matrix(&conn.perturbed(eta), pres);
    let d_eta = cov_deriv(conn, pres, eta, Valued::Endomorphism);
    let ring = &pres.ring;
    Form::from_fn(2, pres.len(), eta.shape(), |t| {
        let (ei, ej) = (eta.get(&t[..1]), eta.get(&t[1..]));
        let comm = ei.commutator(&ej);
        (&(&(&r_eta.get(t) - &r.get(t)) - &d_eta.get(t)) + &comm).nf(ring)
    })
}

/// `∇∇v − v·R` at arity 0, for a section `v`.
pub fn second_derivative_defect(conn: &Connection, pres: &LRPresentation, v: &Mat) -> Form {
    let mut zero_form = Form::zero(0, pres.len(), v.shape());
    zero_form.set(&[], v.clone());
    let once = cov_deriv(conn, pres, &zero_form, Valued::Section);
    let twice = cov_deriv(conn, pres, &once, Valued::Section);
    let r = curvature_matrix(conn, pres);
    let ring = &pres.ring;
    Form::from_fn(2, pres.len(), v.shape(), |t| (&twice.get(t) - &(v * &r.get(t))).nf(ring))
}

/// Determinant of the metric matrix.
pub fn metric_determinant(metric: &Metric) -> Frac {
    let rows: Vec<Vec<Frac>> = (0..metric.g.rows()).map(|r| metric.g.row(r)).collect();
    det_frac(&rows)
}
