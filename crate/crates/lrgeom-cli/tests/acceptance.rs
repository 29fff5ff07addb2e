//! Acceptance suite: one line per criterion.
//!
//! Criteria that compare against printed displays are read literally. Where a
//! printed entry is wrong the line reports FAIL and says whether the corrected
//! value passes; the run as a whole succeeds only if exactly those criteria fail.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use lrgeom::chern::{transgression_check, TraceCarrier};
use lrgeom::connection::{
    curvature_matrix, perturbation_defect, second_derivative_defect, Connection, ModuleCarrier, Valued,
};
use lrgeom::constructions::fedosov_connection;
use lrgeom::examples;
use lrgeom::gauge::gauge_certificates;
use lrgeom::lie::{combinations, cup, ddr, Form, Mat};
use lrgeom::poly::Frac;
use lrgeom::random::Sampler;
use lrgeom::report::Entry;
use lrgeom::runner::{golden_mismatches, run, RunOptions, Selection};
use lrgeom::scenario::{load, Golden, MainConnection, Scenario};

/// Criteria whose printed data contain a documented error.
const EXPECTED_FAILURES: [u32; 4] = [1, 2, 4, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn scenario(name: &str) -> Scenario {
    load(examples::build(name).expect("built-in example"), None).expect("built-in example loads")
}

fn run_tasks(sc: &Scenario, tasks: &[&str]) -> Vec<Entry> {
    let selection = Selection::Tasks(tasks.iter().map(|s| s.to_string()).collect());
    run(sc, &RunOptions { selection, lazy: false }).expect("tasks run").entries
}

fn tally(entries: &[Entry]) -> (usize, usize) {
    (entries.iter().filter(|e| e.passed()).count(), entries.len())
}

/// Checks the goldens whose anchor starts with one of `prefixes`.
/// Returns (strict goldens all hold, printed goldens all hold, names of printed mismatches).
fn goldens(sc: &Scenario, prefixes: &[&str]) -> (bool, bool, Vec<String>, usize) {
    let chosen: Vec<&Golden> = sc.file.goldens.iter().filter(|g| prefixes.iter().any(|p| g.anchor.starts_with(p))).collect();
    let (mut strict, mut printed, mut bad) = (true, true, Vec::new());
    for g in chosen.iter() {
        let ok = golden_mismatches(sc, g).map(|m| m.is_empty()).unwrap_or(false);
        if g.informational {
            if !ok {
                printed = false;
                bad.push(g.anchor.clone());
            }
        } else if !ok {
            strict = false;
            bad.push(format!("{} (strict)", g.anchor));
        }
    }
    (strict, printed, bad, chosen.len())
}

fn literal(strict: bool, printed: bool, bad: &[String], checked: usize) -> Outcome {
    let mut detail = format!("{checked} display checks");
    if !bad.is_empty() {
        detail.push_str(&format!("; printed value differs: {}", bad.join(", ")));
    }
    if strict && !printed {
        detail.push_str("; corrected values pass");
    }
    Outcome { pass: strict && printed, detail }
}

fn criterion_1() -> Outcome {
    let sc = scenario("double-cone");
    let metric = sc.metric.as_ref().unwrap();
    let (_, printed) = &sc.references[0];
    let k = tally(&lrgeom::connection::koszul_verify(printed, &sc.pres, metric).unwrap());
    let t = tally(&lrgeom::connection::torsion_check(printed, &sc.pres).unwrap());
    let m = tally(&lrgeom::connection::metric_compat_check(printed, &sc.pres, metric));
    let literal_ok = k.0 == k.1 && t.0 == t.1 && m.0 == m.1;
    let corrected = run_tasks(&sc, &["koszul", "torsion", "metric-compat", "bianchi"]);
    let c = tally(&corrected);
    let koszul_count = corrected.iter().filter(|e| e.task.starts_with("koszul")).count();
    Outcome {
        pass: literal_ok,
        detail: format!(
            "printed Gamma: koszul {}/{}, torsion {}/{}, metric {}/{}; corrected Gamma: {}/{} checks pass ({} koszul triples, Bianchi with order-2 jets)",
            k.0, k.1, t.0, t.1, m.0, m.1, c.0, c.1, koszul_count
        ),
    }
}

fn criterion_2() -> Outcome {
    let sc = scenario("two-dim-metric");
    let solved = tally(&run_tasks(&sc, &["solve"]));
    let (s, p, bad, n) = goldens(&sc, &["Christoffel display F"]);
    let mut o = literal(s && solved.0 == solved.1, p, &bad, n);
    o.detail = format!("solver ok; {}", o.detail);
    o
}

fn criterion_3() -> Outcome {
    let sc = scenario("two-dim-metric");
    let (s, p, bad, n) = goldens(&sc, &["curvature display"]);
    literal(s, p, &bad, n)
}

fn criterion_4() -> Outcome {
    let sc = scenario("a2-orbit");
    let (s, p, bad, n) = goldens(&sc, &["Christoffel display Gamma", "curvature R(zeta1,zeta2)"]);
    let flat = scenario("a2-orbit-flat");
    let f = tally(&run_tasks(&flat, &["solve", "flat"]));
    let mut o = literal(s && f.0 == f.1, p, &bad, n);
    o.detail.push_str(&format!("; constant f flat: {}/{}", f.0, f.1));
    o
}

fn criterion_5() -> Outcome {
    let (s1, _, b1, n1) = goldens(&scenario("double-cone"), &["determinant of the reduced metric"]);
    let (s2, _, b2, n2) = goldens(&scenario("a2-orbit"), &["metric determinant"]);
    let pass = s1 && s2 && n1 == 1 && n2 == 1;
    Outcome { pass, detail: format!("cone Kronecker determinant, -3/4 f^2 Delta{}", if pass { String::new() } else { format!("; failing: {}", [b1, b2].concat().join(", ")) }) }
}

fn criterion_6() -> Outcome {
    let cone = run_tasks(&scenario("cone-flat-families"), &["adjoint", "bott", "poisson", "goldens"]);
    let dirac = run_tasks(&scenario("dirac-qp"), &["dirac"]);
    let (a, b) = (tally(&cone), tally(&dirac));
    Outcome {
        pass: a.0 == a.1 && b.0 == b.1,
        detail: format!("adjoint, Bott (2,0,0,2), Poisson Z=0: {}/{}; Dirac pairing: {}/{}", a.0, a.1, b.0, b.1),
    }
}

fn criterion_7() -> Outcome {
    let sc = scenario("sphere-idempotent");
    let entries = run_tasks(&sc, &["fedosov", "chern", "chern-additivity", "goldens"]);
    let e = tally(&entries);
    let theta = sc.idempotent.as_ref().unwrap();
    let curved = !fedosov_connection(theta, &sc.pres).curvature.is_zero_mod(&sc.pres.ring);
    Outcome {
        pass: e.0 == e.1 && curved,
        detail: format!("idempotent, closed pieces, degree 0 = 2, additivity: {}/{}; curvature nonzero mod I: {curved}", e.0, e.1),
    }
}

fn criterion_8() -> Outcome {
    let sc = scenario("gauge-cone");
    let Some(MainConnection::Given(conn)) = &sc.connection else { unreachable!("gauge-cone gives its connection") };
    let pres = &sc.pres;
    let mut s = Sampler::new(8, pres.vars().n_coords());
    s.max_degree = 1;
    let mut good = 0;
    for _ in 0..20 {
        let g = s.unipotent(2, &pres.ring);
        let h = s.unipotent(2, &pres.ring);
        let eta = s.one_form(pres.len(), 2);
        if gauge_certificates(&g, &h, conn, pres, &eta).map(|es| es.iter().all(Entry::passed)).unwrap_or(false) {
            good += 1;
        }
    }
    Outcome { pass: good == 20, detail: format!("{good}/20 random unipotent elements pass all six identities") }
}

fn criterion_9() -> Outcome {
    let sc = scenario("sphere-idempotent");
    let theta = sc.idempotent.clone().unwrap();
    let pres = &sc.pres;
    let mut s = Sampler::new(9, pres.vars().n_coords());
    s.max_degree = 1;
    s.max_terms = 2;
    let t = theta.matrix();
    let mats: Vec<Mat> = (0..pres.len()).map(|_| (&(t * &s.matrix(3, 3)) * t).nf(&pres.ring)).collect();
    let eta = Form::from_fn(1, pres.len(), (3, 3), |k| mats[k[0]].clone());
    let ok = transgression_check(&TraceCarrier::Projective(theta), pres, &eta, 2)
        .map(|es| es.iter().all(Entry::passed))
        .unwrap_or(false);
    Outcome { pass: ok, detail: "f(x) = x^2, random eta in End of the image".into() }
}

fn criterion_10() -> Outcome {
    let sigma = scenario("sigma3-tables");
    let (s1, p1, b1, n1) = goldens(&sigma, &[""]);
    let a2 = scenario("a2-orbit");
    let (s2, p2, b2, n2) = goldens(&a2, &["bracket", "action table", "discriminant"]);
    literal(s1 && s2, p1 && p2, &[b1, b2].concat(), n1 + n2)
}

fn random_connection(s: &mut Sampler, gens: usize, rank: usize) -> Connection {
    let gamma = (0..gens).map(|_| s.matrix(rank, rank)).collect();
    Connection::new(ModuleCarrier::free(rank), gamma, Vec::new()).unwrap()
}

fn scalar_form(s: &mut Sampler, arity: usize, gens: usize) -> Form {
    let mut f = Form::zero(arity, gens, (1, 1));
    for t in combinations(gens, arity) {
        f.set(&t, Mat::scalar(Frac::from(s.poly())));
    }
    f
}

fn criterion_11() -> Outcome {
    let scs: Vec<Scenario> = ["cone-flat-families", "sphere-idempotent", "a2-orbit-flat", "two-dim-metric"].iter().map(|n| scenario(n)).collect();
    let cases = 100;
    let mut counts = [0usize; 6];
    for seed in 0..cases as u64 {
        let sc = &scs[seed as usize % scs.len()];
        let (pres, ring) = (&sc.pres, &sc.pres.ring);
        let l = pres.len();
        let mut s = Sampler::new(1000 + seed, pres.vars().n_coords());
        let omega = scalar_form(&mut s, (seed % 2) as usize, l);
        counts[0] += ddr(&ddr(&omega, pres), pres).is_zero_mod(ring) as usize;
        let (a, b) = (scalar_form(&mut s, 1, l), scalar_form(&mut s, 1, l));
        counts[1] += cup(&a, &b, ring).add(&cup(&b, &a, ring)).is_zero_mod(ring) as usize;
        let rank = 1 + (seed % 2) as usize;
        let conn = random_connection(&mut s, l, rank);
        let r = curvature_matrix(&conn, pres);
        let id = Mat::identity(rank);
        let nab = |k: usize, m: &Mat| conn.act(pres, k, m, Valued::Section);
        let (i, j) = (0, l - 1);
        let mut direct = &nab(i, &nab(j, &id)) - &nab(j, &nab(i, &id));
        for k in 0..l {
            direct = &direct - &nab(k, &id).scale(&Frac::from(pres.c(i, j, k).clone()));
        }
        counts[2] += ((&direct - &r.get(&[i, j])).is_zero_mod(ring) && (&r.get(&[j, i]) + &r.get(&[i, j])).is_zero_mod(ring)) as usize;
        counts[3] += second_derivative_defect(&conn, pres, &s.matrix(1, rank)).is_zero_mod(ring) as usize;
        counts[4] += perturbation_defect(&conn, pres, &s.one_form(l, rank)).is_zero_mod(ring) as usize;
        let ideal = &ring.ideal;
        let p = s.poly();
        let mut shifted = p.clone();
        for g in ideal.generators() {
            shifted = &shifted + &(&s.poly() * g);
        }
        counts[5] += (ideal.normal_form(&shifted) == ideal.normal_form(&p)) as usize;
    }
    let names = ["d^2=0", "cup supercommutativity", "curvature antisymmetry", "nabla^2=R", "perturbation", "NF confluence"];
    let detail = names.iter().zip(counts).map(|(n, c)| format!("{n} {c}/{cases}")).collect::<Vec<_>>().join(", ");
    Outcome { pass: counts.iter().all(|&c| c == cases), detail }
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lrgeom")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_12() -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios");
    let mut problems = Vec::new();
    let names = examples::names();
    for name in names.iter() {
        let file = format!("{dir}/{name}.json");
        let (c1, a) = cli(&["--threads", "1", "verify", &file]);
        let (c2, b) = cli(&["--threads", "4", "verify", &file]);
        let (c3, c) = cli(&["--threads", "2", "--json", "-", "example", name]);
        let (c4, d) = cli(&["--threads", "3", "--json", "-", "example", name]);
        if a != b || c != d {
            problems.push(format!("{name}: output differs across thread counts"));
        }
        if [c1, c2, c3, c4] != [0; 4] {
            problems.push(format!("{name}: exit codes {:?}", [c1, c2, c3, c4]));
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{} scenarios byte-identical for 1-4 threads, all exit 0", names.len())
        } else {
            problems.join("; ")
        },
    }
}

type Check = (u32, &'static str, fn() -> Outcome, Duration);

fn main() {
    let secs = Duration::from_secs;
    let criteria: [Check; 12] = [
        (1, "double-cone Levi-Civita verification", criterion_1, secs(30)),
        (2, "2D metric solver reproduces F1, F2", criterion_2, secs(5)),
        (3, "2D curvature closed form", criterion_3, secs(30)),
        (4, "A2 orbit space Christoffel symbols and curvature", criterion_4, secs(30)),
        (5, "determinant identities", criterion_5, secs(30)),
        (6, "flat-family certificates", criterion_6, secs(30)),
        (7, "Fedosov connection and Chern character on the sphere", criterion_7, secs(60)),
        (8, "gauge suite", criterion_8, secs(60)),
        (9, "transgression", criterion_9, secs(60)),
        (10, "table reproductions", criterion_10, secs(30)),
        (11, "property suites", criterion_11, secs(120)),
        (12, "CLI determinism", criterion_12, secs(300)),
    ];
    let expected: BTreeSet<u32> = EXPECTED_FAILURES.into_iter().collect();
    let mut failed = BTreeSet::new();
    for (id, title, check, budget) in criteria {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let in_time = took <= budget;
        if !(o.pass && in_time) {
            failed.insert(id);
        }
        let verdict = if o.pass && in_time { "PASS" } else { "FAIL" };
        let late = if in_time { String::new() } else { format!(" over budget {}s", budget.as_secs()) };
        println!("criterion {id:>2} {verdict}: {title} [{:.1}s{late}] {}", took.as_secs_f64(), o.detail);
    }
    println!("acceptance: {} of 12 pass; failing {:?}; expected failing {:?}", 12 - failed.len(), failed, expected);
    if failed != expected {
        eprintln!("acceptance pattern changed");
        std::process::exit(1);
    }
}
