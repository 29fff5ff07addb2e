//! Task dispatch for loaded scenarios and golden-value evaluation.

use std::sync::OnceLock;

use thiserror::Error;

use crate::chern::{chern_additivity_check, chern_character, chern_tensor_check, transgression_check, ChernReport, TraceCarrier};
use crate::connection::{
    bianchi_checks, curvature_matrix, koszul_rhs, koszul_solve_free, koszul_verify, localization_check, metric_compat_check,
    metric_determinant, torsion_check, Connection, ConnectionError,
};
use crate::constructions::{
    adjoint_connection, bott_connection, dirac_connection, fedosov_connection, poisson_connection, Built, Idempotent,
};
use crate::gauge::gauge_certificates;
use crate::groebner::QuotientRing;
use crate::lie::{verify_presentation, Derivation, Form, LRPresentation, Mat};
use crate::linsolve::det_frac;
use crate::poly::{Frac, Poly};
use crate::report::{Entry, Report, Witness};
use crate::scenario::{Expected, Golden, MainConnection, Quantity, Reader, Scenario, Source};

/// Every task name a scenario may list, in canonical order.
pub const TASKS: &[&str] = &[
    "presentation",
    "koszul",
    "torsion",
    "metric-compat",
    "bianchi",
    "reference",
    "solve",
    "solve-refusal",
    "curvature",
    "flat",
    "adjoint",
    "bott",
    "poisson",
    "dirac",
    "fedosov",
    "chern",
    "chern-additivity",
    "chern-tensor",
    "transgression",
    "gauge",
    "localization",
    "goldens",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("scenario `{scenario}` does not list task `{task}`")]
    TaskNotListed { scenario: String, task: String },
}

/// Which tasks to run.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    /// The scenario's own task list.
    #[default]
    All,
    /// One task, which the scenario must list.
    Only(String),
    /// Explicit task list, validated against [`TASKS`] only.
    Tasks(Vec<String>),
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub selection: Selection,
    /// Skip the presentation validation that otherwise runs before any task.
    pub lazy: bool,
}

type Cached<T> = OnceLock<Result<T, String>>;

/// Lazily built objects shared between tasks of one run.
struct Context<'a> {
    sc: &'a Scenario,
    main: Cached<Connection>,
    adjoint: Cached<Built>,
    bott: Cached<Built>,
    poisson: Cached<Built>,
    dirac: Cached<Built>,
    chern: Cached<ChernReport>,
}

fn need<'b, T>(x: &'b Option<T>, what: &str) -> Result<&'b T, String> {
    x.as_ref().ok_or_else(|| format!("scenario has no {what}"))
}

impl<'a> Context<'a> {
    fn new(sc: &'a Scenario) -> Context<'a> {
        Context {
            sc,
            main: OnceLock::new(),
            adjoint: OnceLock::new(),
            bott: OnceLock::new(),
            poisson: OnceLock::new(),
            dirac: OnceLock::new(),
            chern: OnceLock::new(),
        }
    }

    fn pres(&self) -> &LRPresentation {
        &self.sc.pres
    }

    fn ring(&self) -> &QuotientRing {
        &self.sc.pres.ring
    }

    fn metric(&self) -> Result<&crate::connection::Metric, String> {
        need(&self.sc.metric, "metric")
    }

    fn connection(&self) -> Result<&Connection, String> {
        self.main
            .get_or_init(|| match need(&self.sc.connection, "connection")? {
                MainConnection::Given(c) => Ok(c.clone()),
                MainConnection::Solve => {
                    koszul_solve_free(self.pres(), self.metric()?, &self.sc.invertibles).map_err(|e| e.to_string())
                }
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn ideal_gens(&self) -> Vec<Poly> {
        if self.sc.ideal_gens.is_empty() {
            self.ring().ideal.generators().to_vec()
        } else {
            self.sc.ideal_gens.clone()
        }
    }

    fn built(&self, source: Source) -> Result<&Built, String> {
        let cell = match source {
            Source::Adjoint => &self.adjoint,
            Source::Bott => &self.bott,
            Source::Poisson => &self.poisson,
            Source::Dirac => &self.dirac,
            Source::Connection => unreachable!("the main connection is not a builder"),
        };
        cell.get_or_init(|| {
            let pres = self.pres();
            match source {
                Source::Adjoint => Ok(adjoint_connection(pres)),
                Source::Bott => bott_connection(&self.ideal_gens(), pres).map_err(|e| e.to_string()),
                Source::Poisson => {
                    poisson_connection(need(&self.sc.poisson, "Poisson structure")?, &self.ideal_gens(), pres.vars())
                        .map_err(|e| e.to_string())
                }
                Source::Dirac => dirac_connection(
                    need(&self.sc.poisson, "Poisson structure")?,
                    &self.ideal_gens(),
                    pres.vars(),
                    &pres.anchors,
                )
                .map_err(|e| e.to_string()),
                Source::Connection => unreachable!(),
            }
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    /// A connection together with the presentation it lives over.
    fn source(&self, source: Source) -> Result<(&Connection, &LRPresentation), String> {
        match source {
            Source::Connection => Ok((self.connection()?, self.pres())),
            other => {
                let b = self.built(other)?;
                Ok((&b.connection, &b.presentation))
            }
        }
    }

    fn idempotent(&self) -> Result<&Idempotent, String> {
        need(&self.sc.idempotent, "idempotent")
    }

    fn chern(&self) -> Result<&ChernReport, String> {
        self.chern
            .get_or_init(|| Ok(chern_character(self.idempotent()?, self.pres(), &self.sc.kappa)))
            .as_ref()
            .map_err(Clone::clone)
    }
}

fn matrix_rows(m: &Mat, pres: &LRPresentation) -> Vec<Witness> {
    m.to_strings(pres.vars())
        .into_iter()
        .enumerate()
        .map(|(r, row)| Witness::new(&[r], "row", format!("[{}]", row.join(", "))))
        .collect()
}

fn display_entry(task: String, m: &Mat, pres: &LRPresentation) -> Entry {
    let mut e = Entry::info(task, format!("{}x{}", m.rows(), m.cols()));
    e.witnesses = matrix_rows(m, pres);
    e
}

fn conn_error(task: &str, e: ConnectionError) -> Vec<Entry> {
    vec![Entry::error(task, e.to_string())]
}

fn task_entries(ctx: &Context, task: &str) -> Result<Vec<Entry>, String> {
    let sc = ctx.sc;
    let pres = ctx.pres();
    let ring = ctx.ring();
    Ok(match task {
        "presentation" => {
            let mut out = verify_presentation(pres);
            if let Some(m) = &sc.metric {
                out.extend(m.check(pres));
            }
            out
        }
        "koszul" => koszul_verify(ctx.connection()?, pres, ctx.metric()?).unwrap_or_else(|e| conn_error(task, e)),
        "torsion" => torsion_check(ctx.connection()?, pres).unwrap_or_else(|e| conn_error(task, e)),
        "metric-compat" => metric_compat_check(ctx.connection()?, pres, ctx.metric()?),
        "bianchi" => bianchi_checks(ctx.connection()?, pres),
        "reference" => {
            let metric = sc.metric.as_ref();
            sc.references
                .iter()
                .map(|(name, conn)| {
                    let mut parts = Vec::new();
                    let mut witnesses = Vec::new();
                    let mut tally = |label: &str, entries: Vec<Entry>| {
                        let bad: Vec<&Entry> = entries.iter().filter(|e| !e.passed()).collect();
                        parts.push(format!("{label} {}/{} pass", entries.len() - bad.len(), entries.len()));
                        for e in bad {
                            witnesses.push(Witness::new(&[], label, e.task.trim_start_matches(label).trim()));
                        }
                    };
                    if let Some(m) = metric {
                        tally("koszul", koszul_verify(conn, pres, m).unwrap_or_default());
                    }
                    tally("torsion", torsion_check(conn, pres).unwrap_or_default());
                    if let Some(m) = metric {
                        tally("metric", metric_compat_check(conn, pres, m));
                    }
                    let mut e = Entry::info(format!("reference connection {name}"), parts.join(", "));
                    witnesses.sort();
                    e.witnesses = witnesses;
                    e
                })
                .collect()
        }
        "solve" => match koszul_solve_free(pres, ctx.metric()?, &sc.invertibles) {
            Ok(conn) => {
                let mut out = vec![Entry::pass("koszul solve")];
                for (i, g) in conn.gamma.iter().enumerate() {
                    out.push(display_entry(format!("Gamma {}", pres.names[i]), g, pres));
                }
                out
            }
            Err(e) => vec![Entry::fail("koszul solve", e.to_string())],
        },
        "solve-refusal" => match koszul_solve_free(pres, ctx.metric()?, &sc.invertibles) {
            Err(ConnectionError::SyzygiesPresent) => vec![
                Entry::pass("koszul solve refused").with_note(ConnectionError::SyzygiesPresent.to_string()),
                Entry::info(
                    "koszul solve refused",
                    "a solution is expected only after localizing at the ideal; not attempted",
                ),
            ],
            Err(e) => vec![Entry::fail("koszul solve refused", format!("refused for another reason: {e}"))],
            Ok(_) => vec![Entry::fail("koszul solve refused", "the solver accepted a presentation with syzygies")],
        },
        "curvature" => {
            let conn = ctx.connection()?;
            let r = curvature_matrix(conn, pres).nf(ring);
            r.tuples()
                .iter()
                .map(|t| display_entry(format!("R({},{})", pres.names[t[0]], pres.names[t[1]]), &r.get(t), pres))
                .collect()
        }
        "flat" => {
            let r = curvature_matrix(ctx.connection()?, pres);
            vec![Entry::check("flat", r.residues(ring, "curvature"))]
        }
        "adjoint" => {
            let b = ctx.built(Source::Adjoint)?;
            let mut out = b.certificate.clone();
            let r = curvature_matrix(&b.connection, pres);
            out.push(Entry::check("adjoint curvature", r.residues(ring, "curvature")));
            out
        }
        "bott" | "poisson" | "dirac" => {
            let source = match task {
                "bott" => Source::Bott,
                "poisson" => Source::Poisson,
                _ => Source::Dirac,
            };
            let b = match ctx.built(source) {
                Ok(b) => b,
                Err(e) => return Ok(vec![Entry::error(task, e)]),
            };
            let mut out = b.certificate.clone();
            for (i, g) in b.connection.gamma.iter().enumerate() {
                out.push(display_entry(format!("{task} Gamma {}", b.presentation.names[i]), g, &b.presentation));
            }
            out
        }
        "fedosov" => {
            let theta = ctx.idempotent()?;
            let fed = fedosov_connection(theta, pres);
            let mut out = vec![Entry::info("trace theta", ring.nf_frac(&theta.matrix().trace()).to_string_with(pres.vars()))];
            out.extend(fed.certificate);
            out
        }
        "chern" => {
            let ch = ctx.chern()?;
            let mut out = ch.entries();
            for p in ch.pieces.iter() {
                let mut e = Entry::info(format!("chern degree {}", p.degree), format!("kappa {}", ch.kappa));
                for (t, m) in p.form.to_strings(pres.vars()) {
                    e.witnesses.push(Witness::new(&t, "component", m[0][0].clone()));
                }
                out.push(e);
            }
            out
        }
        "chern-additivity" => {
            let theta = ctx.idempotent()?;
            let n = theta.matrix().rows();
            let complement = Idempotent::new(&Mat::identity(n) - theta.matrix(), ring).map_err(|e| e.to_string())?;
            let mut out = chern_additivity_check(theta, &complement, pres, &sc.kappa);
            let total = chern_character(&theta.direct_sum(&complement), pres, &sc.kappa);
            let rank = total.piece(0).map(|p| p.form.scalar(&[])).unwrap_or_default();
            out.push(Entry::info("chern degree 0 of the direct sum", rank.to_string_with(pres.vars())));
            out
        }
        "chern-tensor" => {
            let theta = ctx.idempotent()?;
            let other = sc.partner.as_ref().unwrap_or(theta);
            chern_tensor_check(theta, other, pres, &sc.kappa)
        }
        "transgression" => {
            let eta = need(&sc.eta, "eta")?;
            let carrier = match &sc.idempotent {
                Some(t) => TraceCarrier::Projective(t.clone()),
                None => TraceCarrier::Free(ctx.connection()?.clone()),
            };
            transgression_check(&carrier, pres, eta, 2).unwrap_or_else(|e| vec![Entry::error(task, e.to_string())])
        }
        "gauge" => {
            let conn = ctx.connection()?;
            let g = sc.gauge.first().ok_or("scenario has no gauge element")?;
            let h = sc.gauge.get(1).unwrap_or(g);
            let b = conn.rank();
            let eta = sc.eta.clone().unwrap_or_else(|| Form::zero(1, pres.len(), (b, b)));
            gauge_certificates(g, h, conn, pres, &eta).unwrap_or_else(|e| vec![Entry::error(task, e.to_string())])
        }
        "localization" => {
            let data = need(&sc.localization, "localization data")?;
            localization_check(ctx.connection()?, pres, data).unwrap_or_else(|e| conn_error(task, e))
        }
        "goldens" => sc.file.goldens.iter().map(|g| golden_entry(ctx, g)).collect(),
        other => return Err(format!("unknown task `{other}`")),
    })
}

fn run_task(ctx: &Context, task: &str) -> Vec<Entry> {
    task_entries(ctx, task).unwrap_or_else(|e| vec![Entry::error(task, e)])
}

/// Validates the selection and returns the tasks to run.
pub fn selected_tasks(sc: &Scenario, selection: &Selection) -> Result<Vec<String>, RunError> {
    let tasks = match selection {
        Selection::All => sc.file.tasks.clone(),
        Selection::Only(t) => {
            if !TASKS.contains(&t.as_str()) {
                return Err(RunError::UnknownTask(t.clone()));
            }
            if !sc.file.tasks.contains(t) {
                return Err(RunError::TaskNotListed { scenario: sc.name().into(), task: t.clone() });
            }
            vec![t.clone()]
        }
        Selection::Tasks(ts) => ts.clone(),
    };
    if let Some(bad) = tasks.iter().find(|t| !TASKS.contains(&t.as_str())) {
        return Err(RunError::UnknownTask(bad.clone()));
    }
    Ok(tasks)
}

/// Runs the selected tasks; entries appear in task order whatever the thread count.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<Report, RunError> {
    let tasks = selected_tasks(sc, &opts.selection)?;
    let ctx = Context::new(sc);
    let mut report = Report::new(sc.name(), sc.ring().order());
    if !opts.lazy && !tasks.iter().any(|t| t == "presentation") {
        // validation failures surface even when the presentation task is not selected
        report.extend(verify_presentation(&sc.pres).into_iter().filter(|e| !e.passed()));
    }
    // tasks share lazily built connections, so they run in order; each is parallel inside
    for t in tasks.iter() {
        report.extend(run_task(&ctx, t));
    }
    Ok(report)
}

/// Exit status for a finished report: 0 when every entry passed, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.all_passed() {
        0
    } else {
        1
    }
}

/// A computed golden value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Frac),
    Matrix(Mat),
}

fn index0<const N: usize>(idx: [usize; N], bounds: [usize; N]) -> Result<[usize; N], String> {
    let mut out = [0; N];
    for k in 0..N {
        if idx[k] == 0 || idx[k] > bounds[k] {
            return Err(format!("index {:?} out of range (1-based)", idx));
        }
        out[k] = idx[k] - 1;
    }
    Ok(out)
}

/// Computes the quantity named by a golden.
pub fn evaluate(sc: &Scenario, q: &Quantity) -> Result<Value, String> {
    evaluate_in(&Context::new(sc), q)
}

fn evaluate_in(ctx: &Context, q: &Quantity) -> Result<Value, String> {
    let pres = ctx.pres();
    let vars = pres.vars();
    let rd = Reader { vars };
    let frac = |s: &str| rd.frac(s, "").map_err(|e| e.to_string());
    let matrix = |m: &Vec<Vec<String>>| rd.matrix(m, "", None).map_err(|e| e.to_string());
    let l = pres.len();
    Ok(match q {
        Quantity::Gamma { source, index } => {
            let (conn, p) = ctx.source(*source)?;
            let b = conn.rank();
            let [i, j, k] = index0(*index, [p.len(), b, b])?;
            Value::Scalar(conn.christoffel(i, j, k).clone())
        }
        Quantity::GammaMatrix { source, generator } => {
            let (conn, p) = ctx.source(*source)?;
            let [i] = index0([*generator], [p.len()])?;
            Value::Matrix(conn.gamma[i].clone())
        }
        Quantity::Curvature { source, pair } => {
            let (conn, p) = ctx.source(*source)?;
            let [i, j] = index0(*pair, [p.len(), p.len()])?;
            Value::Matrix(curvature_matrix(conn, p).get(&[i, j]))
        }
        Quantity::CurvatureEntry { source, index } => {
            let (conn, p) = ctx.source(*source)?;
            let b = conn.rank();
            let [i, j, r, c] = index0(*index, [p.len(), p.len(), b, b])?;
            Value::Scalar(curvature_matrix(conn, p).get(&[i, j]).get(r, c).clone())
        }
        Quantity::Structure { index } => {
            let [i, j, k] = index0(*index, [l, l, l])?;
            Value::Scalar(Frac::from(pres.c(i, j, k).clone()))
        }
        Quantity::Action { generator, expr } => {
            let [i] = index0([*generator], [l])?;
            Value::Scalar(pres.act(i, &frac(expr)?))
        }
        Quantity::FieldAction { field, expr } => {
            if field.len() != vars.n_coords() {
                return Err(format!("field needs {} coefficients", vars.n_coords()));
            }
            let coeffs = rd.polys(field, "").map_err(|e| e.to_string())?;
            Value::Scalar(Derivation::new(coeffs).apply_frac(&frac(expr)?, vars))
        }
        Quantity::Partial { expr, var } => {
            let c = vars.coord_index(var).ok_or_else(|| format!("unknown coordinate `{var}`"))?;
            Value::Scalar(frac(expr)?.partial_derivative(c, vars))
        }
        Quantity::Identity { expr } => Value::Scalar(frac(expr)?),
        Quantity::Metric { index } => {
            let [i, j] = index0(*index, [l, l])?;
            Value::Scalar(ctx.metric()?.get(i, j).clone())
        }
        Quantity::MetricDet => Value::Scalar(metric_determinant(ctx.metric()?)),
        Quantity::Det { matrix: m } => {
            let m = matrix(m)?;
            if m.rows() != m.cols() {
                return Err("determinant of a non-square matrix".into());
            }
            Value::Scalar(det_frac(&(0..m.rows()).map(|r| m.row(r)).collect::<Vec<_>>()))
        }
        Quantity::Matmul { left, right } => {
            let (a, b) = (matrix(left)?, matrix(right)?);
            if a.cols() != b.rows() {
                return Err(format!("cannot multiply {:?} by {:?}", a.shape(), b.shape()));
            }
            Value::Matrix(&a * &b)
        }
        Quantity::KoszulRhs { index } => {
            let [i, j, k] = index0(*index, [l, l, l])?;
            Value::Scalar(koszul_rhs(ctx.metric()?, pres, i, j, k))
        }
        Quantity::Trace { matrix: m } => Value::Scalar(matrix(m)?.trace()),
        Quantity::Chern { degree, tuple } => {
            let ch = ctx.chern()?;
            let piece = ch.piece(*degree).ok_or_else(|| format!("no chern piece of degree {degree}"))?;
            if tuple.len() != *degree || tuple.iter().any(|&i| i == 0 || i > l) {
                return Err(format!("tuple {tuple:?} does not index a {degree}-form"));
            }
            let t: Vec<usize> = tuple.iter().map(|i| i - 1).collect();
            Value::Scalar(piece.form.scalar(&t))
        }
    })
}

fn substitution(g: &Golden, sc: &Scenario) -> Result<Option<Vec<Option<Poly>>>, String> {
    if g.substitute.is_empty() {
        return Ok(None);
    }
    let vars = &sc.vars;
    let rd = Reader { vars };
    let mut images = vec![None; vars.n_coords()];
    for (name, value) in g.substitute.iter() {
        let c = vars.coord_index(name).ok_or_else(|| format!("cannot substitute for `{name}`"))?;
        images[c] = Some(rd.poly(value, "").map_err(|e| e.to_string())?);
    }
    Ok(Some(images))
}

/// Compares a golden against the computed value and reports the outcome.
fn golden_entry(ctx: &Context, g: &Golden) -> Entry {
    let task = format!("golden: {}", g.anchor);
    match golden_compare(ctx, g) {
        Ok(mismatches) if mismatches.is_empty() => Entry::pass(task),
        Ok(mismatches) if g.informational => {
            let mut e = Entry::info(task, "printed value differs from the computed value");
            for (idx, printed, computed) in mismatches {
                e.witnesses.push(Witness::new(&idx, "printed", printed));
                e.witnesses.push(Witness::new(&idx, "computed", computed));
            }
            e.witnesses.sort();
            e
        }
        Ok(mismatches) => Entry::check(
            task,
            mismatches
                .into_iter()
                .map(|(idx, printed, computed)| Witness::new(&idx, format!("expected {printed}"), computed))
                .collect(),
        ),
        Err(e) => Entry::error(task, e),
    }
}

/// Mismatching positions as (index, expected, computed), after substitution and normal form.
pub fn golden_mismatches(sc: &Scenario, g: &Golden) -> Result<Vec<(Vec<usize>, String, String)>, String> {
    golden_compare(&Context::new(sc), g)
}

fn golden_compare(ctx: &Context, g: &Golden) -> Result<Vec<(Vec<usize>, String, String)>, String> {
    let sc = ctx.sc;
    let vars = &sc.vars;
    let rd = Reader { vars };
    let value = evaluate_in(ctx, &g.quantity)?;
    let images = substitution(g, sc)?;
    let free;
    let ring = if g.free {
        free = QuotientRing::free(vars.clone());
        &free
    } else {
        ctx.ring()
    };
    let prep = |x: &Frac| -> Frac {
        let x = match &images {
            Some(im) => x.substitute(im),
            None => x.clone(),
        };
        ring.nf_frac(&x)
    };
    let show = |x: &Frac| x.to_string_with(vars);
    let mut out = Vec::new();
    match (&value, &g.expected) {
        (Value::Scalar(x), Expected::Scalar(s)) => {
            let e = rd.frac(s, "").map_err(|e| e.to_string())?;
            let (a, b) = (prep(&e), prep(x));
            if !ring.frac_eq(&a, &b) {
                out.push((Vec::new(), show(&a), show(&b)));
            }
        }
        (Value::Matrix(m), Expected::Matrix(s)) => {
            let e = rd.matrix(s, "", Some(m.shape())).map_err(|e| e.to_string())?;
            for (r, c, x) in m.entries() {
                let (a, b) = (prep(e.get(r, c)), prep(x));
                if !ring.frac_eq(&a, &b) {
                    out.push((vec![r, c], show(&a), show(&b)));
                }
            }
        }
        (Value::Scalar(_), Expected::Matrix(_)) => return Err("expected a matrix, the quantity is a scalar".into()),
        (Value::Matrix(_), Expected::Scalar(_)) => return Err("expected a scalar, the quantity is a matrix".into()),
    }
    Ok(out)
}
