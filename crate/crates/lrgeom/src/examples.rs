//! Built-in scenarios, one builder per shipped file.
//!
//! Christoffel data is given in the row convention. Printed displays that put
//! the output generator in the row are transposed on the way in.

use std::collections::BTreeMap;

use crate::lie::{Derivation, Mat};
use crate::poly::{parse_frac, parse_poly, Poly, VarTable};
use crate::scenario::{
    ConnectionKeyword, ConnectionSpec, Expected, GaugeSpec, GeneratorSpec, GivenConnection, Golden, JetSpec,
    LocalizationSpec, NamedConnection, PresentationSpec, Quantity, RingSpec, ScenarioFile, Source, SCHEMA_VERSION,
};

type Matrix = Vec<Vec<String>>;

/// A built-in scenario.
pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub build: fn() -> ScenarioFile,
}

pub const EXAMPLES: &[Example] = &[
    Example { name: "double-cone", summary: "reduced metric on the double cone with jets a, b, c", build: build_double_cone },
    Example {
        name: "double-cone-embedding",
        summary: "embedding metric on the double cone; the solver must refuse",
        build: build_double_cone_embedding,
    },
    Example { name: "two-dim-metric", summary: "general metric in the plane, solved and curved", build: build_two_dim_metric },
    Example { name: "a2-orbit", summary: "A2 orbit space with conformal factor f", build: build_a2_orbit },
    Example { name: "a2-orbit-flat", summary: "A2 orbit space with constant f", build: build_a2_orbit_flat },
    Example { name: "sigma3-tables", summary: "invariant-theory tables for the symmetric group", build: build_sigma3_tables },
    Example { name: "sphere-idempotent", summary: "tangent bundle of the sphere as an idempotent", build: build_sphere_idempotent },
    Example { name: "cone-flat-families", summary: "adjoint, Bott and Poisson connections on the cone", build: build_cone_flat_families },
    Example { name: "plane-poisson", summary: "Poisson and Bott connections for {x,y} = x", build: build_plane_poisson },
    Example { name: "dirac-qp", summary: "Dirac connection for {q,p} = 1 and I = (q^2)", build: build_dirac_qp },
    Example { name: "gauge-cone", summary: "gauge suite on a free rank-2 module over the cone", build: build_gauge_cone },
];

pub fn names() -> Vec<&'static str> {
    EXAMPLES.iter().map(|e| e.name).collect()
}

pub fn build(name: &str) -> Option<ScenarioFile> {
    EXAMPLES.iter().find(|e| e.name == name).map(|e| (e.build)())
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn mat(rows: &[&[&str]]) -> Matrix {
    rows.iter().map(|r| strs(r)).collect()
}

fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

fn zeros(r: usize, c: usize) -> Matrix {
    vec![vec!["0".to_string(); c]; r]
}

fn generators(list: &[(&str, &[&str])]) -> Vec<GeneratorSpec> {
    list.iter().map(|(n, c)| GeneratorSpec { name: n.to_string(), coeffs: strs(c) }).collect()
}

fn jets(names: &[&str], deps: &[&str], max_order: usize) -> Vec<JetSpec> {
    names.iter().map(|n| JetSpec { name: n.to_string(), depends: strs(deps), max_order }).collect()
}

fn golden(anchor: &str, quantity: Quantity, expected: Expected) -> Golden {
    Golden { anchor: anchor.into(), quantity, expected, substitute: BTreeMap::new(), free: false, informational: false }
}

fn scalar(s: impl Into<String>) -> Expected {
    Expected::Scalar(s.into())
}

fn printed(mut g: Golden) -> Golden {
    g.informational = true;
    g
}

fn with_subst(mut g: Golden, pairs: &[(&str, String)]) -> Golden {
    g.substitute = pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    g
}

fn blank(name: &str, description: &str, ring: RingSpec, presentation: PresentationSpec) -> ScenarioFile {
    ScenarioFile {
        schema: SCHEMA_VERSION,
        name: name.into(),
        description: description.into(),
        ring,
        presentation,
        metric: None,
        connection: None,
        invertibles: Vec::new(),
        reference_connections: Vec::new(),
        poisson: None,
        idempotent: None,
        partner_idempotent: None,
        gauge: Vec::new(),
        eta: None,
        ideal_gens: Vec::new(),
        kappa: None,
        localization: None,
        tasks: Vec::new(),
        goldens: Vec::new(),
    }
}

/// Evaluates `Xk(j)` notation for jets by applying the generators.
struct Notation {
    vars: VarTable,
    fields: Vec<(String, Derivation)>,
}

impl Notation {
    fn new(vars: VarTable, fields: &[(&str, &[&str])]) -> Notation {
        let fields = fields
            .iter()
            .map(|(n, c)| {
                let coeffs = c.iter().map(|s| parse_poly(s, &vars).expect("builder polynomial")).collect();
                (n.to_string(), Derivation::new(coeffs))
            })
            .collect();
        Notation { vars, fields }
    }

    fn poly(&self, s: &str) -> Poly {
        parse_poly(s, &self.vars).expect("builder polynomial")
    }

    fn field(&self, name: &str) -> &Derivation {
        &self.fields.iter().find(|(n, _)| n == name).expect("known field").1
    }

    /// `X(Y(...(p)))` with the outermost field first.
    fn act(&self, chain: &[&str], p: &str) -> Poly {
        chain.iter().rev().fold(self.poly(p), |acc, f| self.field(f).apply(&acc, &self.vars))
    }

    fn show(&self, p: &Poly) -> String {
        format!("({})", p.to_string_with(&self.vars))
    }

    /// Replaces every `Xk(j)` by its value, for the listed jet names.
    fn expand(&self, text: &str, jet_names: &[&str]) -> String {
        let mut s = text.to_string();
        for (name, _) in self.fields.iter() {
            for j in jet_names {
                let pat = format!("{name}({j})");
                if s.contains(&pat) {
                    s = s.replace(&pat, &self.show(&self.act(&[name], j)));
                }
            }
        }
        s
    }
}

const CONE_VARS: [&str; 3] = ["u1", "u2", "u3"];
const CONE_GENS: [(&str, &[&str]); 4] = [
    ("X1", &["2*u1", "0", "u3"]),
    ("X2", &["2*u3", "0", "u2"]),
    ("X3", &["0", "2*u3", "u1"]),
    ("X4", &["0", "2*u2", "u3"]),
];

fn cone_ring(jet_order: Option<usize>) -> RingSpec {
    RingSpec {
        vars: strs(&CONE_VARS),
        jets: jet_order.map_or_else(Vec::new, |o| jets(&["a", "b", "c"], &CONE_VARS, o)),
        ideal: strs(&["u1*u2 - u3^2"]),
        order: None,
    }
}

fn cone_presentation() -> PresentationSpec {
    let l = 4;
    let mut c = vec![zeros(l, l); l];
    let mut set = |i: usize, j: usize, k: usize, v: &str| {
        c[i][j][k] = v.to_string();
        let neg = if let Some(rest) = v.strip_prefix('-') { rest.to_string() } else { format!("-{v}") };
        c[j][i][k] = neg;
    };
    // [X1,X2] = -X2, [X1,X3] = X3, [X2,X3] = X4 - X1, [X2,X4] = -X2, [X3,X4] = X3
    set(0, 1, 1, "-1");
    set(0, 2, 2, "1");
    set(1, 2, 3, "1");
    set(1, 2, 0, "-1");
    set(1, 3, 1, "-1");
    set(2, 3, 2, "1");
    PresentationSpec {
        generators: generators(&CONE_GENS),
        structure_constants: Some(c),
        syzygies: vec![
            strs(&["u2", "-u3", "0", "0"]),
            strs(&["-u3", "u1", "0", "0"]),
            strs(&["0", "0", "u2", "-u3"]),
            strs(&["0", "0", "-u3", "u1"]),
        ],
        faithful: true,
    }
}

fn cone_notation(order: usize) -> Notation {
    let deps: &[&str] = &CONE_VARS;
    let vars = VarTable::with_jets(&CONE_VARS, &[("a", deps, order), ("b", deps, order), ("c", deps, order)])
        .expect("cone variable table");
    Notation::new(vars, &CONE_GENS)
}

const Z: &str = "0";
const DET_CONE: &str = "(a*b-c^2)";

// Christoffel displays of the double cone as printed: row = output generator,
// column = input generator, entries to be divided by 2(ab-cc). `2D` stands for 2(ab-cc).
type Display = [[&'static str; 4]; 4];

const CONE_G1: Display = [
    ["2D+b*X1(a)-2*c*X1(c)+c*X3(a)", "b*X2(a)-2*c*X2(c)+c*X4(a)", "b*X3(a)-c*X1(b)", "b*X4(a)-c*X2(b)"],
    [Z, Z, Z, Z],
    ["-c*X1(a)+2*a*X1(c)-a*X3(a)", "-c*X2(a)+2*a*X2(c)-a*X4(a)", "2D-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)"],
    [Z, Z, Z, Z],
];
const CONE_G2: Display = [
    [Z, Z, Z, Z],
    ["2D+b*X1(a)-2*c*X1(c)+c*X3(a)", "b*X2(a)-2*c*X2(c)+c*X4(a)", "b*X3(a)-c*X1(b)", "b*X4(a)-c*X2(b)"],
    [Z, Z, Z, Z],
    ["-c*X1(a)+2*a*X1(c)-a*X3(a)", "-c*X2(a)+2*a*X2(c)-a*X4(a)", "2D-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)"],
];
const CONE_G3: Display = [
    ["b*X3(a)-c*X1(b)", "2D+b*X4(a)-c*X2(b)", "2*b*X3(c)-b*X1(b)-c*X3(b)", "2*b*X4(c)-b*X2(b)-c*X4(b)"],
    [Z, Z, Z, Z],
    ["-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)", "-2*c*X3(c)+c*X1(b)+a*X3(b)", "2D-2*c*X4(c)+c*X2(b)+a*X4(b)"],
    [Z, Z, Z, Z],
];
const CONE_G4: Display = [
    [Z, Z, Z, Z],
    ["b*X3(a)-c*X1(b)", "2D+b*X4(a)-c*X2(b)", "2*b*X3(c)-b*X1(b)-c*X3(b)", "2*b*X4(c)-b*X2(b)-c*X4(b)"],
    [Z, Z, Z, Z],
    ["-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)", "-2*c*X3(c)+c*X1(b)+a*X3(b)", "2D-2*c*X4(c)+c*X2(b)+a*X4(b)"],
];

// The displays exactly as printed.
const CONE_G1_PRINTED: Display = [
    ["2D+b*X1(a)-2*c*X1(c)+c*X3(a)", "b*X2(a)-2*c*X2(c)+c*X4(a)", "2D+b*X3(a)-c*X1(b)", "b*X4(a)-c*X2(a)"],
    [Z, Z, Z, Z],
    ["-c*X1(a)+2*a*X1(c)-a*X3(a)", "-c*X2(a)+2*a*X2(c)-a*X4(a)", "-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)"],
    [Z, Z, Z, Z],
];
const CONE_G2_PRINTED: Display = [
    [Z, Z, Z, Z],
    ["2D+b*X1(a)-2*c*X1(c)+c*X3(a)", "b*X2(a)-2*c*X2(c)+c*X4(a)", "b*X3(a)-c*X1(b)", "b*X4(a)-c*X2(a)"],
    [Z, Z, Z, Z],
    ["-c*X1(a)+2*a*X1(c)-a*X3(a)", "-c*X3(a)+2*a*X3(c)-a*X4(a)", "2D-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)"],
];
const CONE_G3_PRINTED: Display = [
    ["b*X3(a)-c*X1(b)", "2D+b*X4(a)-c*X2(b)", "2*b*X3(c)-b*X1(b)-c*X3(b)", "2*b*X4(c)-b*X2(b)-c*X4(b)"],
    [Z, Z, Z, Z],
    ["-c*X3(a)+a*X1(b)", "-c*X4(a)+a*X2(b)", "-2*c*X3(c)+c*X1(b)-a*X3(b)", "2D-2*c*X4(c)+c*X2(b)-a*X4(b)"],
    [Z, Z, Z, Z],
];
const CONE_G4_PRINTED: Display = [
    [Z, Z, Z, Z],
    ["b*X3(a)-c*X3(b)", "2D+b*X4(a)-c*X2(b)", "2*b*X3(c)-b*X1(b)-c*X3(b)", "2*b*X4(c)-b*X2(b)-c*X4(b)"],
    [Z, Z, Z, Z],
    ["-c*X3(a)+a*X3(b)", "-c*X4(a)+a*X2(b)", "-2*c*X3(b)+c*X1(b)-a*X3(b)", "2D-2*c*X4(c)+c*X2(b)-a*X4(b)"],
];

/// Row-convention Christoffel matrix from a printed display.
fn cone_gamma(display: &Display, nt: &Notation) -> Matrix {
    let mut out = zeros(4, 4);
    for (k, row) in display.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if *entry == Z {
                continue;
            }
            let text = nt.expand(&entry.replace("2D", &format!("2*{DET_CONE}")), &["a", "b", "c"]);
            let x = parse_frac(&format!("({text})/(2*{DET_CONE})"), &nt.vars).expect("cone display entry");
            out[j][k] = x.to_string_with(&nt.vars);
        }
    }
    out
}

/// `v^T Q v` for the 6x6 quadratic-form matrix of the curvature display, scaled by `1/(4 D^2)`.
const QUADRATIC_FORM: [[&str; 6]; 6] = [
    ["0", "0", "0", "0", "0", "0"],
    ["0", "B", "0", "0", "0", "0"],
    ["B", "-C", "A", "0", "0", "0"],
    ["C", "A", "0", "0", "0", "0"],
    ["0", "0", "-2*C", "-2*A", "0", "0"],
    ["-2*B", "-2*C", "0", "0", "4*C", "0"],
];

fn quadratic_form(v: &[String; 6], abc: [&str; 3], det: &str) -> String {
    let mut terms = Vec::new();
    for (r, row) in QUADRATIC_FORM.iter().enumerate() {
        for (c, q) in row.iter().enumerate() {
            if *q == "0" {
                continue;
            }
            let q = q.replace('A', abc[0]).replace('B', abc[1]).replace('C', abc[2]);
            terms.push(format!("({q})*{}*{}", v[r], v[c]));
        }
    }
    format!("({})/(4*{det}^2)", terms.join(" + "))
}

/// Scalar factor of `R(X1,X3)X1`, optionally with the first-order term the print omits.
fn cone_curvature_factor(nt: &Notation, with_first_order: bool) -> String {
    let s = |p: Poly| nt.show(&p);
    let v = [
        s(nt.act(&["X1"], "a")),
        s(nt.act(&["X3"], "a")),
        s(nt.act(&["X1"], "b")),
        s(nt.act(&["X3"], "b")),
        s(nt.act(&["X1"], "c")),
        s(nt.act(&["X3"], "c")),
    ];
    let quad = quadratic_form(&v, ["a", "b", "c"], DET_CONE);
    let mut second = format!(
        "{} + {} - 2*{}",
        s(nt.act(&["X3", "X3"], "a")),
        s(nt.act(&["X1", "X1"], "b")),
        s(nt.act(&["X3", "X1"], "c"))
    );
    if with_first_order {
        second.push_str(&format!(" - {}", s(nt.act(&["X1"], "b"))));
    }
    format!("({quad} - ({second})/(2*{DET_CONE}))")
}

pub fn build_double_cone() -> ScenarioFile {
    let nt = cone_notation(2);
    let mut f = blank(
        "double-cone",
        "Levi-Civita data of the reduced metric on the double cone u1*u2 = u3^2, coefficients a, b, c smooth",
        cone_ring(Some(2)),
        cone_presentation(),
    );
    f.metric = Some(mat(&[
        &["u1*a", "u3*a", "u1*c", "u3*c"],
        &["u3*a", "u2*a", "u3*c", "u2*c"],
        &["u1*c", "u3*c", "u1*b", "u3*b"],
        &["u3*c", "u2*c", "u3*b", "u2*b"],
    ]));
    f.invertibles = strs(&["a*b - c^2"]);
    let gamma: Vec<Matrix> = [CONE_G1, CONE_G2, CONE_G3, CONE_G4].iter().map(|d| cone_gamma(d, &nt)).collect();
    f.connection = Some(ConnectionSpec::Given(GivenConnection { gamma, free_rank: None }));
    f.reference_connections = vec![NamedConnection {
        name: "printed".into(),
        gamma: [CONE_G1_PRINTED, CONE_G2_PRINTED, CONE_G3_PRINTED, CONE_G4_PRINTED]
            .iter()
            .map(|d| cone_gamma(d, &nt))
            .collect(),
    }];
    f.tasks = strs(&["presentation", "koszul", "torsion", "metric-compat", "bianchi", "reference", "goldens"]);

    let corrected = cone_curvature_factor(&nt, true);
    let as_printed = cone_curvature_factor(&nt, false);
    let entry = |k: usize| Quantity::CurvatureEntry { source: Source::Connection, index: [1, 3, 1, k] };
    f.goldens = vec![
        golden("reduced metric table, G(X2,X3)", Quantity::Metric { index: [2, 3] }, scalar("u3*c")),
        golden("reduced metric table, G(X4,X4)", Quantity::Metric { index: [4, 4] }, scalar("u2*b")),
        Golden {
            free: true,
            ..golden(
                "determinant of the reduced metric as a Kronecker product",
                Quantity::MetricDet,
                scalar("(u1*u2 - u3^2)^2*(a*b - c^2)^2"),
            )
        },
        golden("curvature example R(X1,X3)X1, coefficient of X1", entry(1), scalar(format!("c*{corrected}"))),
        golden("curvature example R(X1,X3)X1, coefficient of X2", entry(2), scalar("0")),
        golden("curvature example R(X1,X3)X1, coefficient of X3", entry(3), scalar(format!("-a*{corrected}"))),
        golden("curvature example R(X1,X3)X1, coefficient of X4", entry(4), scalar("0")),
        printed(golden("curvature example R(X1,X3)X1 as printed, coefficient of X1", entry(1), scalar(format!("c*{as_printed}")))),
        printed(golden("curvature example R(X1,X3)X1 as printed, coefficient of X3", entry(3), scalar(format!("b*{as_printed}")))),
    ];
    f
}

pub fn build_double_cone_embedding() -> ScenarioFile {
    let mut f = blank(
        "double-cone-embedding",
        "metric induced from the ambient space on the double cone; the Koszul system has syzygies",
        cone_ring(None),
        cone_presentation(),
    );
    f.metric = Some(mat(&[
        &["4*u1^2 + u3^2", "4*u1*u3 + u2*u3", "u1*u3", "u3^2"],
        &["4*u1*u3 + u2*u3", "4*u3^2 + u2^2", "u1*u2", "u2*u3"],
        &["u1*u3", "u1*u2", "4*u3^2 + u1^2", "4*u2*u3 + u1*u3"],
        &["u3^2", "u2*u3", "4*u2*u3 + u1*u3", "4*u2^2 + u3^2"],
    ]));
    f.connection = Some(ConnectionSpec::Keyword(ConnectionKeyword::Solve));
    f.tasks = strs(&["presentation", "solve-refusal", "goldens"]);
    f.goldens = vec![
        golden("embedding metric table, G(X1,X1)", Quantity::Metric { index: [1, 1] }, scalar("4*u1*u1 + u3*u3")),
        golden("embedding metric table, G(X2,X4)", Quantity::Metric { index: [2, 4] }, scalar("u2*u3")),
    ];
    f
}

const PLANE_DET: &str = "(alpha*beta - gamma^2)";

fn plane_f1() -> Matrix {
    mat(&[
        &["beta*alpha_q - 2*gamma*gamma_q + gamma*alpha_p", "beta*alpha_p - gamma*beta_q"],
        &["-gamma*alpha_q + 2*alpha*gamma_q - alpha*alpha_p", "-gamma*alpha_p + alpha*beta_q"],
    ])
}

fn plane_f2(printed: bool) -> Matrix {
    let last = if printed {
        "-2*gamma*gamma_p + gamma*beta_q - alpha*beta_p"
    } else {
        "-2*gamma*gamma_p + gamma*beta_q + alpha*beta_p"
    };
    mat(&[
        &["beta*alpha_p - gamma*beta_q", "2*beta*gamma_p - beta*beta_q - gamma*beta_p"],
        &["-gamma*alpha_p + alpha*beta_q", last],
    ])
}

fn over(m: &Matrix, den: &str) -> Matrix {
    m.iter().map(|r| r.iter().map(|x| format!("({x})/({den})")).collect()).collect()
}

pub fn build_two_dim_metric() -> ScenarioFile {
    let mut f = blank(
        "two-dim-metric",
        "general metric alpha dq^2 + 2 gamma dq dp + beta dp^2 in the plane",
        RingSpec {
            vars: strs(&["q", "p"]),
            jets: jets(&["alpha", "beta", "gamma"], &["q", "p"], 2),
            ideal: Vec::new(),
            order: None,
        },
        PresentationSpec {
            generators: generators(&[("Dq", &["1", "0"]), ("Dp", &["0", "1"])]),
            structure_constants: Some(vec![zeros(2, 2), zeros(2, 2)]),
            syzygies: Vec::new(),
            faithful: true,
        },
    );
    f.metric = Some(mat(&[&["alpha", "gamma"], &["gamma", "beta"]]));
    f.connection = Some(ConnectionSpec::Keyword(ConnectionKeyword::Solve));
    f.invertibles = strs(&["alpha*beta - gamma^2"]);
    f.localization = Some(LocalizationSpec {
        s: "q".into(),
        t: "p".into(),
        r: "q + p".into(),
        u: "q^2 + 1".into(),
        section: 1,
        pair: [1, 2],
    });
    f.tasks = strs(&["presentation", "solve", "koszul", "torsion", "metric-compat", "bianchi", "curvature", "localization", "goldens"]);

    let two_det = format!("2*{PLANE_DET}");
    let f1 = over(&plane_f1(), &two_det);
    let f2 = over(&plane_f2(false), &two_det);
    let f2_printed = over(&plane_f2(true), &two_det);
    let inverse_part = over(&mat(&[&["beta", "-gamma"], &["-gamma", "alpha"]]), &two_det);

    let v = ["alpha_q", "alpha_p", "beta_q", "beta_p", "gamma_q", "gamma_p"].map(String::from);
    let quad = quadratic_form(&v, ["alpha", "beta", "gamma"], PLANE_DET);
    let factor = format!("({quad} - (alpha_pp + beta_qq - 2*gamma_qp)/(2*{PLANE_DET}))");
    let curvature: Matrix = [["gamma", "-alpha"], ["beta", "-gamma"]]
        .iter()
        .map(|r| r.iter().map(|x| format!("{factor}*({x})")).collect())
        .collect();

    f.goldens = vec![
        golden(
            "Christoffel display F1, transposed to the row convention",
            Quantity::GammaMatrix { source: Source::Connection, generator: 1 },
            Expected::Matrix(transpose(&f1)),
        ),
        golden(
            "Christoffel display F2, transposed to the row convention, entry (2,2) from the factored form",
            Quantity::GammaMatrix { source: Source::Connection, generator: 2 },
            Expected::Matrix(transpose(&f2)),
        ),
        printed(golden(
            "Christoffel display F2 as printed, entry (2,2)",
            Quantity::Gamma { source: Source::Connection, index: [2, 2, 2] },
            scalar(f2_printed[1][1].clone()),
        )),
        golden(
            "Christoffel display F1, factored form",
            Quantity::Matmul {
                left: inverse_part.clone(),
                right: mat(&[&["alpha_q", "alpha_p"], &["2*gamma_q - alpha_p", "beta_q"]]),
            },
            Expected::Matrix(f1),
        ),
        golden(
            "Christoffel display F2, factored form against the corrected expansion",
            Quantity::Matmul {
                left: inverse_part,
                right: mat(&[&["alpha_p", "2*gamma_p - beta_q"], &["beta_q", "beta_p"]]),
            },
            Expected::Matrix(f2),
        ),
        golden(
            "curvature display R(Dq,Dp) with the quadratic form",
            Quantity::Curvature { source: Source::Connection, pair: [1, 2] },
            Expected::Matrix(curvature),
        ),
    ];
    f
}

const A2_VARS: [&str; 2] = ["u2", "u3"];
const A2_GENS: [(&str, &[&str]); 2] = [("zeta1", &["2*u2", "3*u3"]), ("zeta2", &["-9*u3", "2*u2^2"])];

fn a2_base(name: &str, description: &str, factor: &str, with_jet: bool) -> ScenarioFile {
    let mut f = blank(
        name,
        description,
        RingSpec {
            vars: strs(&A2_VARS),
            jets: if with_jet { jets(&["f"], &A2_VARS, 2) } else { Vec::new() },
            ideal: Vec::new(),
            order: None,
        },
        PresentationSpec {
            generators: generators(&A2_GENS),
            structure_constants: None,
            syzygies: Vec::new(),
            faithful: true,
        },
    );
    let g = |coef: &str| format!("{coef}*{factor}");
    f.metric = Some(vec![vec![g("-u2"), g("9/2*u3")], vec![g("9/2*u3"), g("3*u2^2")]]);
    f.connection = Some(ConnectionSpec::Keyword(ConnectionKeyword::Solve));
    f
}

pub fn build_a2_orbit() -> ScenarioFile {
    let mut f = a2_base("a2-orbit", "orbit space of the A2 reflection group with metric scaled by f", "f", true);
    f.invertibles = strs(&["f"]);
    f.tasks = strs(&["presentation", "solve", "koszul", "torsion", "metric-compat", "bianchi", "curvature", "goldens"]);

    let (l2, l3) = ("(f_2/f)", "(f_3/f)");
    let gamma1_printed = vec![
        vec![format!("1 + u2*{l2} + 3*u3*{l3}"), format!("u2^2*{l3}")],
        vec![format!("1/3*u2*{l3}"), format!("2 + u2*{l2}")],
    ];
    let gamma2_printed = vec![
        vec![format!("u2^2*{l3}"), format!("3*u2*(-2 + u2*{l2})")],
        vec![format!("1 + u2*{l2}"), format!("-9*u3*{l2} + u2^2*{l3}")],
    ];
    let chi = "((f_33*f - f_3^2)/f^2)";
    let lambda = "(f_2/f + 3*u3*(f_23*f - f_2*f_3)/f^2 + u2*(f_22*f - f_2^2)/f^2)";
    let row2 = vec![format!("-2*u2^4*{chi} + 6*u2^2*{lambda}"), format!("3*u2^2*u3*{chi} - 9*u3*{lambda}")];
    let curvature = vec![vec![format!("-3*u2^2*u3*{chi} + 9*u3*{lambda}"), format!("-2/3*u2^3*{chi} + 2*u2*{lambda}")], row2.clone()];
    let curvature_printed = vec![vec![format!("-3*u2^2*{chi} + 9*u3*{lambda}"), format!("2/3*u2^3*{chi} + 2*u2*{lambda}")], row2];

    let zeta1_f = "(2*u2*f_2 + 3*u3*f_3)";
    let zeta2_f = "(-9*u3*f_2 + 2*u2^2*f_3)";
    let delta = "(4*u2^3 + 27*u3^2)";
    let act = |g: usize, expr: &str| Quantity::Action { generator: g, expr: expr.into() };
    f.goldens = vec![
        golden("bracket [zeta1,zeta2] = zeta2", Quantity::Structure { index: [1, 2, 2] }, scalar("1")),
        golden("bracket [zeta1,zeta2] has no zeta1 part", Quantity::Structure { index: [1, 2, 1] }, scalar("0")),
        golden("metric determinant -3/4 f^2 Delta", Quantity::MetricDet, scalar(format!("-3/4*f^2*{delta}"))),
        golden("action table, zeta1 on G11", act(1, "-u2*f"), scalar(format!("-2*u2*f - u2*{zeta1_f}"))),
        golden("action table, zeta1 on G12", act(1, "9/2*u3*f"), scalar(format!("27/2*u3*f + 9/2*u3*{zeta1_f}"))),
        golden("action table, zeta1 on G22", act(1, "3*u2^2*f"), scalar(format!("12*u2^2*f + 3*u2^2*{zeta1_f}"))),
        golden("action table, zeta2 on G11", act(2, "-u2*f"), scalar(format!("9*u3*f - u2*{zeta2_f}"))),
        golden("action table, zeta2 on G12", act(2, "9/2*u3*f"), scalar(format!("9*u2^2*f + 9/2*u3*{zeta2_f}"))),
        golden("action table, zeta2 on G22", act(2, "3*u2^2*f"), scalar(format!("-54*u2*u3*f + 3*u2^2*{zeta2_f}"))),
        golden("discriminant is semi-invariant under zeta1", act(1, delta), scalar(format!("6*{delta}"))),
        golden("discriminant is invariant under zeta2", act(2, delta), scalar("0")),
        golden(
            "Christoffel display Gamma_1, transposed to the row convention",
            Quantity::GammaMatrix { source: Source::Connection, generator: 1 },
            Expected::Matrix(transpose(&gamma1_printed)),
        ),
        golden(
            "Christoffel display Gamma_2, transposed to the row convention",
            Quantity::GammaMatrix { source: Source::Connection, generator: 2 },
            Expected::Matrix(transpose(&gamma2_printed)),
        ),
        golden(
            "Christoffel display Gamma_2, printed entry (2,1)",
            Quantity::Gamma { source: Source::Connection, index: [2, 1, 2] },
            scalar(format!("1 + u2*{l2}")),
        ),
        golden(
            "curvature R(zeta1,zeta2) in chi and lambda, trace-free first row",
            Quantity::Curvature { source: Source::Connection, pair: [1, 2] },
            Expected::Matrix(curvature),
        ),
        printed(golden(
            "curvature R(zeta1,zeta2) in chi and lambda as printed",
            Quantity::Curvature { source: Source::Connection, pair: [1, 2] },
            Expected::Matrix(curvature_printed),
        )),
    ];
    f
}

pub fn build_a2_orbit_flat() -> ScenarioFile {
    let mut f = a2_base("a2-orbit-flat", "orbit space of the A2 reflection group with constant metric factor", "1", false);
    f.tasks = strs(&["presentation", "solve", "koszul", "torsion", "metric-compat", "flat", "curvature", "goldens"]);
    let partial = |i: usize, j: usize, expected: &str| {
        let metric = f.metric.as_ref().expect("metric");
        golden(
            &format!("Saito metric, u3-derivative of G({i},{j})"),
            Quantity::Partial { expr: metric[i - 1][j - 1].clone(), var: "u3".into() },
            scalar(expected),
        )
    };
    f.goldens = vec![partial(1, 1, "0"), partial(1, 2, "9/2"), partial(2, 2, "0")];
    f.goldens.push(golden("metric determinant -3/4 Delta", Quantity::MetricDet, scalar("-3/4*(4*u2^3 + 27*u3^2)")));
    f
}

fn elementary(k: usize, xs: &[&str]) -> String {
    let mut terms = Vec::new();
    let n = xs.len();
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 {
        return "1".into();
    }
    if k > n {
        return "0".into();
    }
    loop {
        terms.push(idx.iter().map(|&i| xs[i]).collect::<Vec<_>>().join("*"));
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    format!("({})", terms.join(" + "))
}

const NEWTON: [&str; 4] = [
    "u1",
    "u1^2 - 2*u2",
    "u1^3 - 3*u1*u2 + 3*u3",
    "-4*u4 + 2*u2^2 + 4*u1*u3 - 4*u1^2*u2 + u1^4",
];

pub fn build_sigma3_tables() -> ScenarioFile {
    let vars = ["u1", "u2", "u3", "u4", "x1", "x2", "x3", "x4"];
    let pad = |c: &[&str]| -> Vec<String> { (0..8).map(|i| c.get(i).copied().unwrap_or("0").to_string()).collect() };
    let mut f = blank(
        "sigma3-tables",
        "generators of invariant vector fields, power sums and the Bezoutiant",
        RingSpec { vars: strs(&vars), jets: Vec::new(), ideal: Vec::new(), order: None },
        PresentationSpec {
            generators: vec![
                GeneratorSpec { name: "xi1".into(), coeffs: pad(&["3", "2*u1", "u2"]) },
                GeneratorSpec { name: "xi2".into(), coeffs: pad(&["u1", "2*u2", "3*u3"]) },
                GeneratorSpec { name: "xi3".into(), coeffs: pad(&["u1^2 - 2*u2", "u1*u2 - 3*u3", "u1*u3"]) },
            ],
            structure_constants: None,
            syzygies: Vec::new(),
            faithful: true,
        },
    );
    f.tasks = strs(&["presentation", "goldens"]);

    let x3 = ["x1", "x2", "x3"];
    let x4 = ["x1", "x2", "x3", "x4"];
    let on_three: Vec<(&str, String)> = (1..=3).map(|k| (["u1", "u2", "u3"][k - 1], elementary(k, &x3))).collect();
    let on_four: Vec<(&str, String)> = (1..=4).map(|k| (["u1", "u2", "u3", "u4"][k - 1], elementary(k, &x4))).collect();

    let structure = |i: usize, j: usize, k: usize, v: &str, anchor: &str| golden(anchor, Quantity::Structure { index: [i, j, k] }, scalar(v));
    let mut g = vec![
        structure(1, 2, 1, "1", "bracket table, [xi1,xi2] = xi1"),
        structure(1, 2, 2, "0", "bracket table, [xi1,xi2] has no xi2 part"),
        structure(1, 3, 2, "2", "bracket table, [xi1,xi3] = 2 xi2"),
        structure(1, 3, 1, "0", "bracket table, [xi1,xi3] has no xi1 part"),
        structure(2, 3, 3, "1", "bracket table, [xi2,xi3] = xi3"),
        structure(2, 3, 2, "0", "bracket table, [xi2,xi3] has no xi2 part"),
    ];
    let fields: [(&str, [&str; 3]); 3] = [
        ("sum of d/dx_i", ["1", "1", "1"]),
        ("sum of x_i d/dx_i", ["x1", "x2", "x3"]),
        ("sum of x_i^2 d/dx_i", ["x1^2", "x2^2", "x3^2"]),
    ];
    let table: [[&str; 3]; 3] = [["3", "2*u1", "u2"], ["u1", "2*u2", "3*u3"], ["u1^2 - 2*u2", "u1*u2 - 3*u3", "u1*u3"]];
    for (row, (label, coeffs)) in fields.iter().enumerate() {
        let mut field = vec!["0".to_string(); 8];
        for i in 0..3 {
            field[4 + i] = coeffs[i].to_string();
        }
        for k in 1..=3 {
            g.push(with_subst(
                golden(
                    &format!("invariant action table, {label} on u{k}"),
                    Quantity::FieldAction { field: field.clone(), expr: elementary(k, &x3) },
                    scalar(table[row][k - 1]),
                ),
                &on_three,
            ));
        }
    }
    let mut squares = vec!["0".to_string(); 8];
    for (i, x) in x3.iter().enumerate() {
        squares[4 + i] = format!("{x}^2");
    }
    g.push(printed(with_subst(
        golden(
            "invariant action table as printed, sum of x_i^2 d/dx_i on u2",
            Quantity::FieldAction { field: squares, expr: elementary(2, &x3) },
            scalar("-2*u1*u2 + u1^3 - 3*u3"),
        ),
        &on_three,
    )));
    for (k, p) in NEWTON.iter().enumerate() {
        let power_sum = x4.iter().map(|x| format!("{x}^{}", k + 1)).collect::<Vec<_>>().join(" + ");
        g.push(with_subst(
            golden(&format!("Newton identity for p{}", k + 1), Quantity::Identity { expr: power_sum }, scalar(*p)),
            &on_four,
        ));
    }
    let p = |k: usize| if k == 0 { "3".to_string() } else { format!("({})", NEWTON[k - 1]) };
    let bez: Matrix = (0..3).map(|r| (0..3).map(|c| p(r + c)).collect()).collect();
    g.push(with_subst(
        golden("Bezoutiant determinant on the slice u1 = 0", Quantity::Det { matrix: bez }, scalar("-4*u2^3 - 27*u3^2")),
        &[("u1", "0".into()), ("u4", "0".into())],
    ));
    g.push(golden(
        "displayed kernel matrix K satisfies M K = 0",
        Quantity::Matmul {
            left: mat(&[&["u1", "3", "u1", "u1^2 - 2*u2"]]),
            right: mat(&[&["3", "0", "0"], &["-u1", "-u1", "-u1^2 + 2*u2"], &["0", "3", "0"], &["0", "0", "3"]]),
        },
        Expected::Matrix(zeros(1, 3)),
    ));
    f.goldens = g;
    f
}

fn sphere_theta() -> Matrix {
    mat(&[
        &["1 - x^2", "-x*y", "-x*z"],
        &["-x*y", "1 - y^2", "-y*z"],
        &["-x*z", "-y*z", "1 - z^2"],
    ])
}

/// `θ E θ` for a constant matrix `E`, expanded.
fn compress(theta: &Matrix, e: &[[i64; 3]; 3], vars: &VarTable) -> Matrix {
    let parse = |m: &Matrix| {
        Mat::from_poly_rows(m.iter().map(|r| r.iter().map(|s| parse_poly(s, vars).expect("sphere entry")).collect()).collect())
    };
    let t = parse(theta);
    let e = Mat::from_poly_rows(e.iter().map(|r| r.iter().map(|&x| Poly::int(x)).collect()).collect());
    (&(&t * &e) * &t).to_strings(vars)
}

pub fn build_sphere_idempotent() -> ScenarioFile {
    let xyz = ["x", "y", "z"];
    let mut f = blank(
        "sphere-idempotent",
        "tangent bundle of the unit sphere as the image of I - n n^T",
        RingSpec { vars: strs(&xyz), jets: Vec::new(), ideal: strs(&["x^2 + y^2 + z^2 - 1"]), order: None },
        PresentationSpec {
            generators: generators(&[("R1", &["0", "-z", "y"]), ("R2", &["z", "0", "-x"]), ("R3", &["-y", "x", "0"])]),
            structure_constants: Some(vec![
                mat(&[&["0", "0", "0"], &["0", "0", "-1"], &["0", "1", "0"]]),
                mat(&[&["0", "0", "1"], &["0", "0", "0"], &["-1", "0", "0"]]),
                mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "0", "0"]]),
            ]),
            syzygies: vec![strs(&["x", "y", "z"])],
            faithful: true,
        },
    );
    let theta = sphere_theta();
    let vars = VarTable::new(&xyz).expect("sphere variables");
    f.idempotent = Some(theta.clone());
    f.partner_idempotent = Some(mat(&[&["x^2", "x*y", "x*z"], &["x*y", "y^2", "y*z"], &["x*z", "y*z", "z^2"]]));
    f.eta = Some(vec![
        compress(&theta, &[[0, 1, 0], [0, 0, 0], [0, 0, 0]], &vars),
        compress(&theta, &[[0, 0, 0], [0, 0, 1], [0, 0, 0]], &vars),
        compress(&theta, &[[1, 0, 0], [0, 0, 0], [0, 0, -1]], &vars),
    ]);
    f.tasks = strs(&["presentation", "fedosov", "chern", "chern-additivity", "chern-tensor", "transgression", "goldens"]);
    f.goldens = vec![
        golden("rank of the tangent bundle, trace of theta", Quantity::Trace { matrix: theta.clone() }, scalar("2")),
        golden(
            "theta is idempotent modulo the sphere",
            Quantity::Matmul { left: theta.clone(), right: theta.clone() },
            Expected::Matrix(theta),
        ),
        golden("degree-0 Chern piece", Quantity::Chern { degree: 0, tuple: Vec::new() }, scalar("2")),
    ];
    f
}

pub fn build_cone_flat_families() -> ScenarioFile {
    let mut f = blank(
        "cone-flat-families",
        "adjoint, Bott and Poisson connections on the double cone",
        cone_ring(None),
        cone_presentation(),
    );
    f.poisson = Some(mat(&[&["0", "4*u3", "2*u1"], &["-4*u3", "0", "-2*u2"], &["-2*u1", "2*u2", "0"]]));
    f.tasks = strs(&["presentation", "adjoint", "bott", "poisson", "goldens"]);
    let bott = |i: usize, v: &str| {
        golden(&format!("Bott symbols, generator X{i}"), Quantity::Gamma { source: Source::Bott, index: [i, 1, 1] }, scalar(v))
    };
    f.goldens = vec![bott(1, "2"), bott(2, "0"), bott(3, "0"), bott(4, "2")];
    for i in 1..=3 {
        f.goldens.push(golden(
            &format!("Poisson symbols vanish, coordinate u{i}"),
            Quantity::GammaMatrix { source: Source::Poisson, generator: i },
            Expected::Matrix(zeros(1, 1)),
        ));
    }
    f
}

pub fn build_plane_poisson() -> ScenarioFile {
    let mut f = blank(
        "plane-poisson",
        "Poisson bracket {x,y} = x with the Poisson ideal (x)",
        RingSpec { vars: strs(&["x", "y"]), jets: Vec::new(), ideal: strs(&["x"]), order: None },
        PresentationSpec {
            generators: generators(&[("E", &["x", "0"]), ("Dy", &["0", "1"])]),
            structure_constants: None,
            syzygies: Vec::new(),
            faithful: true,
        },
    );
    f.poisson = Some(mat(&[&["0", "x"], &["-x", "0"]]));
    f.tasks = strs(&["presentation", "poisson", "bott", "goldens"]);
    f.goldens = vec![
        golden("Poisson symbol of y", Quantity::Gamma { source: Source::Poisson, index: [2, 1, 1] }, scalar("-1")),
        golden("Poisson symbol of x", Quantity::Gamma { source: Source::Poisson, index: [1, 1, 1] }, scalar("0")),
        golden("Bott symbol of the Euler field", Quantity::Gamma { source: Source::Bott, index: [1, 1, 1] }, scalar("1")),
    ];
    f
}

pub fn build_dirac_qp() -> ScenarioFile {
    let mut f = blank(
        "dirac-qp",
        "canonical bracket {q,p} = 1 with the first-class ideal (q^2)",
        RingSpec { vars: strs(&["q", "p"]), jets: Vec::new(), ideal: strs(&["q^2"]), order: None },
        PresentationSpec {
            generators: generators(&[("E", &["q", "0"]), ("Dp", &["0", "1"])]),
            structure_constants: None,
            syzygies: Vec::new(),
            faithful: true,
        },
    );
    f.poisson = Some(mat(&[&["0", "1"], &["-1", "0"]]));
    f.tasks = strs(&["presentation", "dirac"]);
    f
}

pub fn build_gauge_cone() -> ScenarioFile {
    let mut f = blank(
        "gauge-cone",
        "gauge transformations of a connection on the free rank-2 module over the double cone",
        cone_ring(None),
        cone_presentation(),
    );
    f.connection = Some(ConnectionSpec::Given(GivenConnection {
        gamma: vec![mat(&[&["0", "u3"], &["0", "0"]]), zeros(2, 2), mat(&[&["u1", "0"], &["0", "0"]]), zeros(2, 2)],
        free_rank: Some(2),
    }));
    f.gauge = vec![
        GaugeSpec { matrix: mat(&[&["1", "u1"], &["0", "1"]]), inverse: mat(&[&["1", "-u1"], &["0", "1"]]) },
        GaugeSpec { matrix: mat(&[&["1", "0"], &["u3", "1"]]), inverse: mat(&[&["1", "0"], &["-u3", "1"]]) },
    ];
    f.eta = Some(vec![
        mat(&[&["0", "1"], &["u2", "0"]]),
        zeros(2, 2),
        mat(&[&["u3", "0"], &["0", "-u3"]]),
        mat(&[&["0", "0"], &["1", "0"]]),
    ]);
    f.tasks = strs(&["presentation", "curvature", "gauge", "transgression"]);
    f
}
