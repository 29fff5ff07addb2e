//! JSON scenario files and their loading into library objects.
//!
//! Polynomial values are strings in the parser grammar. Christoffel data is
//! stored in the row convention, `gamma[i][mu][nu] = Γ_{i mu}^nu`; one-forms
//! used by the gauge and Chern tasks (`eta`) are in the column convention.
//! Index tuples in goldens are 1-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connection::{Connection, LocalizationData, Metric, ModuleCarrier};
use crate::constructions::{Idempotent, PoissonStructure};
use crate::gauge::GaugeElement;
use crate::groebner::{Ideal, QuotientRing};
use crate::lie::{Derivation, Form, LRPresentation, Mat};
use crate::poly::{parse_frac, parse_poly, Coeff, Frac, MonomialOrder, Poly, VarTable};

pub const SCHEMA_VERSION: u32 = 1;

type Matrix = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub ring: RingSpec,
    pub presentation: PresentationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invertibles: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_connections: Vec<NamedConnection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotent: Option<Matrix>,
    /// Second idempotent for the tensor-product check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner_idempotent: Option<Matrix>,
    /// One or two gauge elements; the second defaults to the first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gauge: Vec<GaugeSpec>,
    /// Column-convention one-form: one matrix per generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Matrix>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ideal_gens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localization: Option<LocalizationSpec>,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub goldens: Vec<Golden>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jets: Vec<JetSpec>,
    #[serde(default)]
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<MonomialOrder>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetSpec {
    pub name: String,
    pub depends: Vec<String>,
    pub max_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSpec {
    pub generators: Vec<GeneratorSpec>,
    /// `c[i][j][k]`; computed from the generators when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Matrix>>,
    /// Syzygy columns, each of length equal to the number of generators.
    #[serde(default)]
    pub syzygies: Vec<Vec<String>>,
    #[serde(default = "yes")]
    pub faithful: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConnectionSpec {
    Keyword(ConnectionKeyword),
    Given(GivenConnection),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKeyword {
    Solve,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GivenConnection {
    pub gamma: Vec<Matrix>,
    /// When set, the carrier is the free module of this rank instead of L.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedConnection {
    pub name: String,
    pub gamma: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub matrix: Matrix,
    pub inverse: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationSpec {
    pub s: String,
    pub t: String,
    pub r: String,
    #[serde(default = "one")]
    pub u: String,
    /// 1-based module generator index.
    pub section: usize,
    /// 1-based generator pair.
    pub pair: [usize; 2],
}

fn one() -> String {
    "1".into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Connection,
    Adjoint,
    Bott,
    Poisson,
    Dirac,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Connection => "connection",
            Source::Adjoint => "adjoint",
            Source::Bott => "bott",
            Source::Poisson => "poisson",
            Source::Dirac => "dirac",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Quantity {
    /// `Γ_{i j}^k`.
    Gamma { source: Source, index: [usize; 3] },
    /// The matrix `Γ_i` in the row convention.
    GammaMatrix { source: Source, generator: usize },
    /// `R(X_i, X_j)` in the row convention.
    Curvature { source: Source, pair: [usize; 2] },
    /// `R(X_i, X_j)[row][col]`.
    CurvatureEntry { source: Source, index: [usize; 4] },
    /// `c_ij^k`.
    Structure { index: [usize; 3] },
    /// Generator acting on an expression.
    Action { generator: usize, expr: String },
    /// A vector field given by coordinate coefficients acting on an expression.
    FieldAction { field: Vec<String>, expr: String },
    /// Partial derivative of an expression in a coordinate.
    Partial { expr: String, var: String },
    /// A plain expression, compared after the golden's substitution.
    Identity { expr: String },
    Metric { index: [usize; 2] },
    MetricDet,
    Det { matrix: Matrix },
    Matmul { left: Matrix, right: Matrix },
    KoszulRhs { index: [usize; 3] },
    Trace { matrix: Matrix },
    /// Chern piece of the given degree on a 1-based generator tuple.
    Chern { degree: usize, tuple: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Scalar(String),
    Matrix(Matrix),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    /// Description of the printed table or display the value comes from.
    pub anchor: String,
    pub quantity: Quantity,
    pub expected: Expected,
    /// Coordinate substitution applied to both sides before comparison.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub substitute: BTreeMap<String, String>,
    /// Compare in the polynomial ring without reducing modulo the ideal.
    #[serde(default, skip_serializing_if = "is_false")]
    pub free: bool,
    /// A mismatch is reported as info carrying both expressions.
    #[serde(default, skip_serializing_if = "is_false")]
    pub informational: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ScenarioFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// Canonical form: defaults made explicit where serde fills them.
    pub fn normalized(&self) -> ScenarioFile {
        serde_json::from_str(&self.to_json()).expect("scenario round-trips")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("{pointer}: {message}")]
    Json { pointer: String, message: String },
    #[error("unsupported schema version {0}; expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("{pointer}: {message}")]
    Field { pointer: String, message: String },
    #[error("{pointer}: ideals must be jet-free")]
    JetInIdeal { pointer: String },
}

impl ScenarioError {
    pub fn pointer(&self) -> Option<&str> {
        match self {
            ScenarioError::Json { pointer, .. } | ScenarioError::Field { pointer, .. } | ScenarioError::JetInIdeal { pointer } => {
                Some(pointer)
            }
            ScenarioError::Schema(_) => Some("/schema"),
        }
    }
}

fn field(pointer: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Field { pointer: pointer.into(), message: message.to_string() }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Parses scenario JSON with JSON-pointer diagnostics.
pub fn parse_scenario_file(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        let inner = e.into_inner();
        let message = if inner.line() > 0 { format!("{inner}") } else { inner.to_string() };
        ScenarioError::Json { pointer, message }
    })?;
    if file.schema != SCHEMA_VERSION {
        return Err(ScenarioError::Schema(file.schema));
    }
    Ok(file)
}

/// The main connection of a scenario.
#[derive(Clone, Debug)]
pub enum MainConnection {
    Given(Connection),
    Solve,
}

/// A scenario with every payload parsed against its variable table.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub vars: VarTable,
    pub pres: LRPresentation,
    pub metric: Option<Metric>,
    pub connection: Option<MainConnection>,
    pub invertibles: Vec<Poly>,
    pub references: Vec<(String, Connection)>,
    pub poisson: Option<PoissonStructure>,
    pub idempotent: Option<Idempotent>,
    pub partner: Option<Idempotent>,
    pub gauge: Vec<GaugeElement>,
    pub eta: Option<Form>,
    pub ideal_gens: Vec<Poly>,
    pub kappa: Coeff,
    pub localization: Option<LocalizationData>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn ring(&self) -> &QuotientRing {
        &self.pres.ring
    }
}

/// Polynomial parsing with pointer-carrying errors.
pub(crate) struct Reader<'a> {
    pub vars: &'a VarTable,
}

impl Reader<'_> {
    pub fn poly(&self, s: &str, pointer: &str) -> Result<Poly, ScenarioError> {
        let p = parse_poly(s, self.vars).map_err(|e| field(pointer, e))?;
        for sym in p.symbols() {
            self.vars.check_order(sym).map_err(|e| field(pointer, e))?;
        }
        Ok(p)
    }

    pub fn frac(&self, s: &str, pointer: &str) -> Result<Frac, ScenarioError> {
        let x = parse_frac(s, self.vars).map_err(|e| field(pointer, e))?;
        for sym in x.num().symbols().into_iter().chain(x.den().symbols()) {
            self.vars.check_order(sym).map_err(|e| field(pointer, e))?;
        }
        Ok(x)
    }

    pub fn polys(&self, v: &[String], pointer: &str) -> Result<Vec<Poly>, ScenarioError> {
        v.iter().enumerate().map(|(i, s)| self.poly(s, &format!("{pointer}/{i}"))).collect()
    }

    pub fn matrix(&self, m: &Matrix, pointer: &str, shape: Option<(usize, usize)>) -> Result<Mat, ScenarioError> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        if let Some((r, c)) = shape {
            if (rows, cols) != (r, c) {
                return Err(field(pointer, format!("expected a {r}x{c} matrix, found {rows}x{cols}")));
            }
        }
        let mut out = Vec::with_capacity(rows);
        for (i, row) in m.iter().enumerate() {
            if row.len() != cols {
                return Err(field(format!("{pointer}/{i}"), format!("row has {} entries, expected {cols}", row.len())));
            }
            let r: Result<Vec<Frac>, _> = row.iter().enumerate().map(|(j, s)| self.frac(s, &format!("{pointer}/{i}/{j}"))).collect();
            out.push(r?);
        }
        if rows == 0 {
            return Ok(Mat::zeros(0, 0));
        }
        Ok(Mat::from_rows(out))
    }

    pub fn poly_matrix(&self, m: &Matrix, pointer: &str, shape: Option<(usize, usize)>) -> Result<Mat, ScenarioError> {
        let mat = self.matrix(m, pointer, shape)?;
        if let Some((r, c, _)) = mat.entries().find(|(_, _, x)| !x.is_poly()) {
            return Err(field(format!("{pointer}/{r}/{c}"), "expected a polynomial, found a fraction"));
        }
        Ok(mat)
    }
}

fn build_vars(ring: &RingSpec) -> Result<VarTable, ScenarioError> {
    let coords: Vec<&str> = ring.vars.iter().map(String::as_str).collect();
    let deps: Vec<Vec<&str>> = ring.jets.iter().map(|j| j.depends.iter().map(String::as_str).collect()).collect();
    let jets: Vec<(&str, &[&str], usize)> =
        ring.jets.iter().zip(deps.iter()).map(|(j, d)| (j.name.as_str(), d.as_slice(), j.max_order)).collect();
    VarTable::with_jets(&coords, &jets).map_err(|e| field("/ring", e))
}

/// Builds every library object named by the file. `order` overrides the file's monomial order.
pub fn load(file: ScenarioFile, order: Option<MonomialOrder>) -> Result<Scenario, ScenarioError> {
    if file.schema != SCHEMA_VERSION {
        return Err(ScenarioError::Schema(file.schema));
    }
    let vars = build_vars(&file.ring)?;
    let rd = Reader { vars: &vars };
    let n = vars.n_coords();

    let mut ideal_polys = Vec::new();
    for (i, s) in file.ring.ideal.iter().enumerate() {
        let pointer = format!("/ring/ideal/{i}");
        let p = rd.poly(s, &pointer)?;
        if p.has_jets() {
            return Err(ScenarioError::JetInIdeal { pointer });
        }
        ideal_polys.push(p);
    }
    let order = order.or(file.ring.order).unwrap_or_default();
    let ring = QuotientRing::new(vars.clone(), Ideal::new(ideal_polys, order));

    let pspec = &file.presentation;
    let l = pspec.generators.len();
    let mut names = Vec::with_capacity(l);
    let mut anchors = Vec::with_capacity(l);
    for (i, g) in pspec.generators.iter().enumerate() {
        let pointer = format!("/presentation/generators/{i}/coeffs");
        if g.coeffs.len() != n {
            return Err(field(pointer, format!("expected {n} coefficients, found {}", g.coeffs.len())));
        }
        names.push(g.name.clone());
        anchors.push(Derivation::new(rd.polys(&g.coeffs, &pointer)?));
    }
    let structure = match &pspec.structure_constants {
        None => None,
        Some(c) => {
            if c.len() != l {
                return Err(field("/presentation/structure_constants", format!("expected {l} matrices")));
            }
            let mut out = Vec::with_capacity(l);
            for (i, m) in c.iter().enumerate() {
                let pointer = format!("/presentation/structure_constants/{i}");
                let mat = rd.poly_matrix(m, &pointer, Some((l, l)))?;
                out.push((0..l).map(|j| (0..l).map(|k| mat.get(j, k).as_poly().cloned().unwrap_or_default()).collect()).collect());
            }
            Some(out)
        }
    };
    let mut syzygies = Vec::with_capacity(pspec.syzygies.len());
    for (a, col) in pspec.syzygies.iter().enumerate() {
        let pointer = format!("/presentation/syzygies/{a}");
        if col.len() != l {
            return Err(field(pointer, format!("syzygy column has {} entries, expected {l}", col.len())));
        }
        syzygies.push(rd.polys(col, &pointer)?);
    }
    let pres = LRPresentation::new(ring, names, anchors, structure, syzygies, pspec.faithful)
        .map_err(|e| field("/presentation", e))?;

    let metric = match &file.metric {
        Some(m) => Some(Metric::new(rd.matrix(m, "/metric", Some((l, l)))?)),
        None => None,
    };
    let invertibles = rd.polys(&file.invertibles, "/invertibles")?;

    let gamma_list = |g: &[Matrix], pointer: &str, rank: usize| -> Result<Vec<Mat>, ScenarioError> {
        if g.len() != l {
            return Err(field(pointer, format!("expected {l} Christoffel matrices, found {}", g.len())));
        }
        g.iter().enumerate().map(|(i, m)| rd.matrix(m, &format!("{pointer}/{i}"), Some((rank, rank)))).collect()
    };
    let connection = match &file.connection {
        None => None,
        Some(ConnectionSpec::Keyword(ConnectionKeyword::Solve)) => Some(MainConnection::Solve),
        Some(ConnectionSpec::Given(g)) => {
            let carrier = match g.free_rank {
                Some(r) => ModuleCarrier::free(r),
                None => ModuleCarrier::lie(&pres),
            };
            let gamma = gamma_list(&g.gamma, "/connection/gamma", carrier.rank)?;
            let conn = Connection::new(carrier, gamma, invertibles.clone()).map_err(|e| field("/connection/gamma", e))?;
            Some(MainConnection::Given(conn))
        }
    };
    let mut references = Vec::new();
    for (r, nc) in file.reference_connections.iter().enumerate() {
        let pointer = format!("/reference_connections/{r}/gamma");
        let gamma = gamma_list(&nc.gamma, &pointer, l)?;
        let conn = Connection::new(ModuleCarrier::lie(&pres), gamma, invertibles.clone()).map_err(|e| field(&pointer, e))?;
        references.push((nc.name.clone(), conn));
    }

    let poisson = match &file.poisson {
        Some(m) => {
            let mat = rd.poly_matrix(m, "/poisson", Some((n, n)))?;
            let rows = (0..n).map(|i| (0..n).map(|j| mat.get(i, j).as_poly().cloned().unwrap_or_default()).collect()).collect();
            Some(PoissonStructure::new(rows).map_err(|e| field("/poisson", e))?)
        }
        None => None,
    };
    let idem = |m: &Option<Matrix>, pointer: &str| -> Result<Option<Idempotent>, ScenarioError> {
        match m {
            Some(m) => {
                let mat = rd.poly_matrix(m, pointer, None)?;
                Ok(Some(Idempotent::new(mat, &pres.ring).map_err(|e| field(pointer, e))?))
            }
            None => Ok(None),
        }
    };
    let idempotent = idem(&file.idempotent, "/idempotent")?;
    let partner = idem(&file.partner_idempotent, "/partner_idempotent")?;

    let mut gauge = Vec::new();
    for (k, g) in file.gauge.iter().enumerate() {
        let pointer = format!("/gauge/{k}");
        let m = rd.poly_matrix(&g.matrix, &format!("{pointer}/matrix"), None)?;
        let inv = rd.poly_matrix(&g.inverse, &format!("{pointer}/inverse"), Some(m.shape()))?;
        gauge.push(GaugeElement::new(m, inv, &pres.ring).map_err(|e| field(&pointer, e))?);
    }
    let eta = match &file.eta {
        Some(list) => {
            if list.len() != l {
                return Err(field("/eta", format!("expected {l} matrices, found {}", list.len())));
            }
            let mats: Vec<Mat> = list.iter().enumerate().map(|(i, m)| rd.matrix(m, &format!("/eta/{i}"), None)).collect::<Result<_, _>>()?;
            let shape = mats.first().map_or((0, 0), Mat::shape);
            if let Some(bad) = mats.iter().position(|m| m.shape() != shape) {
                return Err(field(format!("/eta/{bad}"), "all eta matrices must share one shape"));
            }
            let mut f = Form::zero(1, l, shape);
            for (i, m) in mats.into_iter().enumerate() {
                f.set(&[i], m);
            }
            Some(f)
        }
        None => None,
    };
    let ideal_gens = rd.polys(&file.ideal_gens, "/ideal_gens")?;
    let kappa = match &file.kappa {
        Some(s) => {
            let p = rd.poly(s, "/kappa")?;
            p.as_constant().ok_or_else(|| field("/kappa", "kappa must be a rational constant"))?
        }
        None => Coeff::from_integer(1.into()),
    };
    let localization = match &file.localization {
        Some(spec) => {
            let rank = match &connection {
                Some(MainConnection::Given(c)) => c.rank(),
                _ => l,
            };
            if spec.section == 0 || spec.section > rank {
                return Err(field("/localization/section", format!("must lie in 1..={rank}")));
            }
            if spec.pair.iter().any(|&i| i == 0 || i > l) {
                return Err(field("/localization/pair", format!("indices must lie in 1..={l}")));
            }
            Some(LocalizationData {
                s: rd.poly(&spec.s, "/localization/s")?,
                t: rd.poly(&spec.t, "/localization/t")?,
                r: rd.poly(&spec.r, "/localization/r")?,
                u: rd.poly(&spec.u, "/localization/u")?,
                mu: spec.section - 1,
                i: spec.pair[0] - 1,
                j: spec.pair[1] - 1,
            })
        }
        None => None,
    };

    Ok(Scenario {
        vars,
        pres,
        metric,
        connection,
        invertibles,
        references,
        poisson,
        idempotent,
        partner,
        gauge,
        eta,
        ideal_gens,
        kappa,
        localization,
        file,
    })
}

/// Parses and loads scenario text.
pub fn parse_scenario(text: &str, order: Option<MonomialOrder>) -> Result<Scenario, ScenarioError> {
    load(parse_scenario_file(text)?, order)
}
