//! Named connection constructions.

use thiserror::Error;

use crate::connection::{curvature_matrix, Connection, ModuleCarrier};
use crate::groebner::{GroebnerError, Ideal, QuotientRing};
use crate::lie::{combinations, Derivation, Form, LRPresentation, LieError, Mat};
use crate::par;
use crate::poly::{rat, Frac, Poly, VarTable};
use crate::report::{Entry, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("Poisson matrix is not antisymmetric at ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("Poisson matrix must be {0}x{0}")]
    PoissonShape(usize),
    #[error("generator {generator} is not tangent to ideal generator {ideal_gen}: residue {residue}")]
    NotTangent { generator: usize, ideal_gen: usize, residue: String },
    #[error("not a Poisson ideal: {{x{coord}, f{gen}}} leaves residue {residue}")]
    NotPoissonIdeal { coord: usize, gen: usize, residue: String },
    #[error("not a first-class ideal: {{f{0}, f{1}}} leaves residue {2}")]
    NotFirstClass(usize, usize, String),
    #[error("matrix is not idempotent modulo the ideal at ({0},{1})")]
    NotIdempotent(usize, usize),
    #[error("idempotent must be square")]
    NotSquare,
    #[error(transparent)]
    Cofactor(#[from] GroebnerError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// A connection returned by a builder together with its flatness certificate.
#[derive(Clone, Debug)]
pub struct Built {
    pub connection: Connection,
    pub presentation: LRPresentation,
    pub certificate: Vec<Entry>,
}

impl Built {
    pub fn flat(&self) -> bool {
        self.certificate.iter().all(Entry::passed)
    }
}

/// `Π^{ij} = {x^i, x^j}` on the coordinates, extended by the derivation rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    pi: Vec<Vec<Poly>>,
}

impl PoissonStructure {
    pub fn new(pi: Vec<Vec<Poly>>) -> Result<PoissonStructure, ConstructionError> {
        let n = pi.len();
        if pi.iter().any(|r| r.len() != n) {
            return Err(ConstructionError::PoissonShape(n));
        }
        for i in 0..n {
            for j in i..n {
                if !(&pi[i][j] + &pi[j][i]).is_zero() {
                    return Err(ConstructionError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(PoissonStructure { pi })
    }

    pub fn zero(n: usize) -> PoissonStructure {
        PoissonStructure { pi: vec![vec![Poly::zero(); n]; n] }
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.pi
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn bracket(&self, f: &Poly, g: &Poly, vars: &VarTable) -> Poly {
        let n = self.dim();
        let df: Vec<Poly> = (0..n).map(|i| f.partial_derivative(i, vars)).collect();
        let dg: Vec<Poly> = (0..n).map(|j| g.partial_derivative(j, vars)).collect();
        let mut acc = Poly::zero();
        for i in 0..n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !dg[j].is_zero() && !self.pi[i][j].is_zero() {
                    acc = &acc + &(&(&df[i] * &dg[j]) * &self.pi[i][j]);
                }
            }
        }
        acc
    }

    /// `X_f = {f, ·}` as a derivation.
    pub fn hamiltonian(&self, f: &Poly, vars: &VarTable) -> Derivation {
        let n = self.dim();
        let df: Vec<Poly> = (0..n).map(|i| f.partial_derivative(i, vars)).collect();
        let coeffs = (0..n)
            .map(|k| (0..n).fold(Poly::zero(), |acc, i| if df[i].is_zero() { acc } else { &acc + &(&df[i] * &self.pi[i][k]) }))
            .collect();
        Derivation::new(coeffs)
    }

    /// Jacobi identity on all coordinate triples, as exact polynomials.
    pub fn jacobi_check(&self, vars: &VarTable) -> Entry {
        let n = self.dim();
        let mut w = Vec::new();
        for t in combinations(n, 3) {
            let x = |k: usize| Poly::coord(t[k]);
            let cyc = |a: usize, b: usize, c: usize| self.bracket(&self.bracket(&x(a), &x(b), vars), &x(c), vars);
            let s = &(&cyc(0, 1, 2) + &cyc(1, 2, 0)) + &cyc(2, 0, 1);
            if !s.is_zero() {
                w.push(Witness::new(&t, "Jacobi", s.to_string_with(vars)));
            }
        }
        Entry::check("Poisson Jacobi identity", w)
    }
}

/// `θ` with `θ² ≡ θ` modulo the ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Idempotent {
    theta: Mat,
}

impl Idempotent {
    pub fn new(theta: Mat, ring: &QuotientRing) -> Result<Idempotent, ConstructionError> {
        if theta.rows() != theta.cols() {
            return Err(ConstructionError::NotSquare);
        }
        let sq = &(&theta * &theta) - &theta;
        if let Some((r, c, _)) = sq.entries().find(|(_, _, x)| !ring.frac_is_zero(x)) {
            return Err(ConstructionError::NotIdempotent(r, c));
        }
        Ok(Idempotent { theta })
    }

    pub fn identity(n: usize) -> Idempotent {
        Idempotent { theta: Mat::identity(n) }
    }

    pub fn matrix(&self) -> &Mat {
        &self.theta
    }

    pub fn size(&self) -> usize {
        self.theta.rows()
    }

    pub fn direct_sum(&self, other: &Idempotent) -> Idempotent {
        Idempotent { theta: self.theta.block_diag(&other.theta) }
    }

    pub fn tensor(&self, other: &Idempotent) -> Idempotent {
        Idempotent { theta: self.theta.kron(&other.theta) }
    }
}

/// The same presentation over the polynomial ring itself, so checks can be exact.
fn over_free_ring(pres: &LRPresentation) -> LRPresentation {
    let mut p = pres.clone();
    p.ring = QuotientRing::free(pres.vars().clone());
    p
}

fn residue_witnesses(ring: &QuotientRing, idx: &[usize], label: &str, x: &Frac) -> Vec<Witness> {
    if ring.frac_is_zero(x) {
        Vec::new()
    } else {
        vec![Witness::new(idx, label.to_string(), ring.nf_frac(x).to_string_with(&ring.vars))]
    }
}

/// `∇_{X_i} X_j = [X_i, X_j]`, so the Christoffel symbols are the structure constants.
pub fn adjoint_connection(pres: &LRPresentation) -> Built {
    let l = pres.len();
    let gamma = (0..l)
        .map(|i| Mat::from_poly_rows((0..l).map(|j| (0..l).map(|k| pres.c(i, j, k).clone()).collect()).collect()))
        .collect();
    let connection = Connection { carrier: ModuleCarrier::lie(pres), gamma, invertibles: Vec::new() };
    Built { certificate: vec![adjoint_flatness(pres)], connection, presentation: pres.clone() }
}

/// Componentwise `Σ_l(X_i c_jm^l − X_j c_im^l + Σ_k(c_ik^l c_jm^k − c_jk^l c_im^k) − Σ_k c_ij^k c_km^l)`.
pub fn adjoint_flatness(pres: &LRPresentation) -> Entry {
    let l = pres.len();
    let ring = &pres.ring;
    let pairs = combinations(l, 2);
    let w: Vec<Witness> = par::map(&pairs, |p| {
        let (i, j) = (p[0], p[1]);
        let mut out = Vec::new();
        for m in 0..l {
            for t in 0..l {
                let mut v = &pres.act_poly(i, pres.c(j, m, t)) - &pres.act_poly(j, pres.c(i, m, t));
                for k in 0..l {
                    v = &v + &(&(pres.c(i, k, t) * pres.c(j, m, k)) - &(pres.c(j, k, t) * pres.c(i, m, k)));
                    v = &v - &(pres.c(i, j, k) * pres.c(k, m, t));
                }
                out.extend(residue_witnesses(ring, &[i, j, m, t], "coefficient", &Frac::from(v)));
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    Entry::check("adjoint flatness", w)
}

/// `Γ − ½T`, which is torsion-free when the carrier is L.
pub fn torsion_corrected(conn: &Connection, pres: &LRPresentation) -> Connection {
    let l = pres.len();
    let half = rat(1, 2);
    let mut out = conn.clone();
    for i in 0..l {
        for j in 0..l {
            for k in 0..l {
                let t = &(conn.christoffel(i, j, k) - conn.christoffel(j, i, k)) - &Frac::from(pres.c(i, j, k).clone());
                out.gamma[i].set(j, k, conn.christoffel(i, j, k) - &t.scale(&half));
            }
        }
    }
    out
}

/// Bott connection on `I/I²` for `I = (gens)`, with Christoffel data from
/// the cofactors of `X_i(f_μ)`.
pub fn bott_connection(gens: &[Poly], pres: &LRPresentation) -> Result<Built, ConstructionError> {
    let ideal = Ideal::new(gens.to_vec(), pres.ring.order());
    let l = pres.len();
    let b = gens.len();
    let mut gamma = vec![Mat::zeros(b, b); l];
    for (i, g) in gamma.iter_mut().enumerate() {
        for (mu, f) in gens.iter().enumerate() {
            let cof = ideal.reduce_with_cofactors(&pres.act_poly(i, f), None)?;
            if !cof.remainder.is_zero() {
                return Err(ConstructionError::NotTangent {
                    generator: i,
                    ideal_gen: mu,
                    residue: cof.remainder.to_string_with(pres.vars()),
                });
            }
            for (nu, c) in cof.cofactors.into_iter().enumerate() {
                g.set(mu, nu, Frac::from(c));
            }
        }
    }
    let connection = Connection { carrier: ModuleCarrier::free(b), gamma, invertibles: Vec::new() };
    let certificate = vec![bott_certificate(&connection, gens, pres)];
    Ok(Built { connection, presentation: pres.clone(), certificate })
}

/// `Σ_ν R_ij[μ][ν] f_ν ∈ I²` with the curvature computed exactly over the polynomial ring.
pub fn bott_certificate(conn: &Connection, gens: &[Poly], pres: &LRPresentation) -> Entry {
    let exact = over_free_ring(pres);
    let r = curvature_matrix(conn, &exact);
    let sq = Ideal::new(gens.to_vec(), pres.ring.order()).power(2);
    let mut w = Vec::new();
    for t in r.tuples() {
        let m = r.get(&t);
        for mu in 0..gens.len() {
            let s = gens.iter().enumerate().fold(Frac::zero(), |acc, (nu, f)| &acc + &m.get(mu, nu).mul_poly(f));
            if !sq.contains(s.num()) {
                w.push(Witness::new(&[t[0], t[1], mu], "not in I^2", s.to_string_with(pres.vars())));
            }
        }
    }
    Entry::check("Bott flatness (membership in I^2)", w)
}

/// Presentation of the Lie-Rinehart algebra spanned by the Hamiltonian fields of the coordinates.
pub fn poisson_presentation(poisson: &PoissonStructure, ring: &QuotientRing) -> Result<LRPresentation, ConstructionError> {
    let vars = &ring.vars;
    let n = vars.n_coords();
    if poisson.dim() != n {
        return Err(ConstructionError::PoissonShape(n));
    }
    let anchors: Vec<Derivation> = (0..n).map(|i| poisson.hamiltonian(&Poly::coord(i), vars)).collect();
    let structure = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| poisson.matrix()[i][j].partial_derivative(k, vars)).collect()).collect())
        .collect();
    let names = vars.coords().iter().map(|c| format!("H_{c}")).collect();
    Ok(LRPresentation::new(ring.clone(), names, anchors, Some(structure), Vec::new(), true)?)
}

/// Poisson connection on `I/I²` for a Poisson ideal `I = (gens)`.
pub fn poisson_connection(poisson: &PoissonStructure, gens: &[Poly], vars: &VarTable) -> Result<Built, ConstructionError> {
    let ideal = Ideal::new(gens.to_vec(), crate::poly::MonomialOrder::Grevlex);
    let ring = QuotientRing::new(vars.clone(), ideal.clone());
    let pres = poisson_presentation(poisson, &ring)?;
    let n = vars.n_coords();
    let b = gens.len();
    let mut gamma = vec![Mat::zeros(b, b); n];
    for (i, g) in gamma.iter_mut().enumerate() {
        for (mu, f) in gens.iter().enumerate() {
            let br = poisson.bracket(&Poly::coord(i), f, vars);
            let cof = ideal.reduce_with_cofactors(&br, None)?;
            if !cof.remainder.is_zero() {
                return Err(ConstructionError::NotPoissonIdeal { coord: i, gen: mu, residue: cof.remainder.to_string_with(vars) });
            }
            for (nu, c) in cof.cofactors.into_iter().enumerate() {
                g.set(mu, nu, Frac::from(c));
            }
        }
    }
    let connection = Connection { carrier: ModuleCarrier::free(b), gamma, invertibles: Vec::new() };
    let r = curvature_matrix(&connection, &pres);
    let certificate = vec![poisson.jacobi_check(vars), Entry::check("Poisson flatness", r.residues(&pres.ring, "d Z - [Z,Z]"))];
    Ok(Built { connection, presentation: pres, certificate })
}

/// Dirac connection of a first-class ideal on the differentials `dx^i`.
///
/// `tangent` lists derivations tangent to the ideal; the certificate pairs the
/// curvature coefficients with each of them.
pub fn dirac_connection(
    poisson: &PoissonStructure,
    gens: &[Poly],
    vars: &VarTable,
    tangent: &[Derivation],
) -> Result<Built, ConstructionError> {
    let ideal = Ideal::new(gens.to_vec(), crate::poly::MonomialOrder::Grevlex);
    let ring = QuotientRing::new(vars.clone(), ideal.clone());
    let n = vars.n_coords();
    let l = gens.len();
    let mut structure = vec![vec![vec![Poly::zero(); l]; l]; l];
    for mu in 0..l {
        for nu in mu + 1..l {
            let br = poisson.bracket(&gens[mu], &gens[nu], vars);
            let cof = ideal.reduce_with_cofactors(&br, None)?;
            if !cof.remainder.is_zero() {
                return Err(ConstructionError::NotFirstClass(mu, nu, cof.remainder.to_string_with(vars)));
            }
            for (lam, c) in cof.cofactors.into_iter().enumerate() {
                structure[nu][mu][lam] = -&c;
                structure[mu][nu][lam] = c;
            }
        }
    }
    let anchors: Vec<Derivation> = gens.iter().map(|f| poisson.hamiltonian(f, vars)).collect();
    let names = (1..=l).map(|k| format!("f{k}")).collect();
    let pres = LRPresentation::new(ring.clone(), names, anchors, Some(structure), Vec::new(), false)?;
    let gamma: Vec<Mat> = gens
        .iter()
        .map(|f| {
            let rows = (0..n)
                .map(|i| {
                    let h = poisson.bracket(f, &Poly::coord(i), vars);
                    (0..n).map(|j| h.partial_derivative(j, vars)).collect()
                })
                .collect();
            Mat::from_poly_rows(rows)
        })
        .collect();
    let jacobian = gens.iter().map(|f| (0..n).map(|i| f.partial_derivative(i, vars)).collect()).collect();
    let carrier = ModuleCarrier { rank: n, syzygies: jacobian, is_lie: false };
    let connection = Connection { carrier, gamma, invertibles: Vec::new() };
    let mut certificate = Vec::new();
    for (t, x) in tangent.iter().enumerate() {
        let w: Vec<Witness> = gens
            .iter()
            .enumerate()
            .filter_map(|(g, f)| {
                let r = ring.nf(&x.apply(f, vars));
                (!r.is_zero()).then(|| Witness::new(&[t, g], "X(f)", r.to_string_with(vars)))
            })
            .collect();
        certificate.push(Entry::check(format!("tangent derivation {}", t + 1), w));
    }
    let r = curvature_matrix(&connection, &pres);
    let mut w = Vec::new();
    for tup in r.tuples() {
        let m = r.get(&tup);
        for i in 0..n {
            for (t, x) in tangent.iter().enumerate() {
                let s = (0..n).fold(Frac::zero(), |acc, k| &acc + &m.get(i, k).mul_poly(&x.coeffs[k]));
                w.extend(residue_witnesses(&ring, &[tup[0], tup[1], i, t], "paired coefficient", &s));
            }
        }
    }
    certificate.push(Entry::check("Dirac flatness pairing (necessary)", w));
    let componentwise = r.residues(&ring, "coefficient");
    certificate.push(if componentwise.is_empty() {
        Entry::info("Dirac curvature coefficients", "vanish componentwise")
    } else {
        Entry::info("Dirac curvature coefficients", format!("{} nonzero before pairing", componentwise.len()))
    });
    Ok(Built { connection, presentation: pres, certificate })
}

/// Connection `θ d` on the image of an idempotent, in the column convention.
#[derive(Clone, Debug)]
pub struct Fedosov {
    pub theta: Idempotent,
    pub curvature: Form,
    pub certificate: Vec<Entry>,
}

impl Fedosov {
    /// `∇_i v = θ X_i(v)` for a column matrix `v`.
    pub fn nabla(&self, pres: &LRPresentation, i: usize, v: &Mat) -> Mat {
        (self.theta.matrix() * &pres.act_mat(i, v)).nf(&pres.ring)
    }
}

/// `R(X_i,X_j) = θ[X_i(θ), X_j(θ)]`, cross-checked against the operator definition.
pub fn fedosov_connection(theta: &Idempotent, pres: &LRPresentation) -> Fedosov {
    let t = theta.matrix();
    let ring = &pres.ring;
    let l = pres.len();
    let dt: Vec<Mat> = (0..l).map(|i| pres.act_mat(i, t)).collect();
    let curvature = Form::from_fn(2, l, t.shape(), |p| (t * &dt[p[0]].commutator(&dt[p[1]])).nf(ring));
    let mut fed = Fedosov { theta: theta.clone(), curvature, certificate: Vec::new() };
    let direct = fedosov_operator_curvature(&fed, pres, None);
    let diff = direct.sub(&fed.curvature.map(|m| m * t));
    let mut cert = vec![Entry::pass("idempotent")];
    cert.push(Entry::check("curvature agrees with the operator definition", diff.residues(ring, "difference")));
    let anti: Vec<Witness> = fed
        .curvature
        .tuples()
        .iter()
        .flat_map(|p| {
            let m = fed.curvature.get(p);
            let a = (&(t * &m) - &m).nf(ring).entries().any(|(_, _, x)| !x.is_zero());
            let b = (&(&m * t) - &m).nf(ring).entries().any(|(_, _, x)| !x.is_zero());
            (a || b).then(|| Witness::new(p, "theta R = R theta = R", "violated"))
        })
        .collect();
    cert.push(Entry::check("curvature is an endomorphism of the image", anti));
    let nonzero = !fed.curvature.is_zero_mod(ring);
    cert.push(Entry::info("curvature", if nonzero { "nonzero modulo the ideal" } else { "zero modulo the ideal" }));
    fed.certificate = cert;
    fed
}

/// `([∇_i,∇_j] − ∇_{[X_i,X_j]} + perturbation terms)` applied to the columns of θ.
/// With `eta`, the connection is `θd + η` and `η` must be θ-compatible.
pub fn fedosov_operator_curvature(fed: &Fedosov, pres: &LRPresentation, eta: Option<&Form>) -> Form {
    let t = fed.theta.matrix();
    let ring = &pres.ring;
    let l = pres.len();
    let nabla = |i: usize, v: &Mat| -> Mat {
        let base = fed.nabla(pres, i, v);
        match eta {
            Some(e) => (&base + &(&e.get(&[i]) * v)).nf(ring),
            None => base,
        }
    };
    let first: Vec<Mat> = (0..l).map(|k| nabla(k, t)).collect();
    Form::from_fn(2, l, t.shape(), |p| {
        let (i, j) = (p[0], p[1]);
        let mut acc = &nabla(i, &first[j]) - &nabla(j, &first[i]);
        for (k, fk) in first.iter().enumerate() {
            let c = pres.c(i, j, k);
            if !c.is_zero() {
                acc = &acc - &fk.scale(&Frac::from(c.clone()));
            }
        }
        acc.nf(ring)
    })
}
