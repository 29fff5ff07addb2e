//! Parallel against sequential evaluation of the heavier kernels.
//!
//! With the default `parallel` feature the two groups use rayon pools of one
//! thread and of all cores. `cargo bench --no-default-features` measures the
//! sequential fallback, where both groups take the same code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lrgeom::chern::chern_character;
use lrgeom::connection::{curvature_matrix, koszul_verify};
use lrgeom::examples;
use lrgeom::scenario::{load, MainConnection, Scenario};

fn scenario(name: &str) -> Scenario {
    load(examples::build(name).unwrap(), None).unwrap()
}

type Work = Box<dyn Fn() + Sync + Send>;

fn workloads() -> Vec<(&'static str, Work)> {
    let cone = scenario("double-cone");
    let Some(MainConnection::Given(conn)) = cone.connection.clone() else { unreachable!() };
    let cone2 = cone.clone();
    let conn2 = conn.clone();
    let sphere = scenario("sphere-idempotent");
    let theta = sphere.idempotent.clone().unwrap();
    vec![
        (
            "cone koszul",
            Box::new(move || {
                koszul_verify(&conn, &cone.pres, cone.metric.as_ref().unwrap()).unwrap();
            }),
        ),
        (
            "cone curvature",
            Box::new(move || {
                curvature_matrix(&conn2, &cone2.pres);
            }),
        ),
        (
            "sphere chern",
            Box::new(move || {
                chern_character(&theta, &sphere.pres, &lrgeom::poly::rat(1, 1));
            }),
        ),
    ]
}

#[cfg(feature = "parallel")]
fn with_threads(n: usize, f: &(dyn Fn() + Sync + Send)) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    pool.install(f);
}

#[cfg(not(feature = "parallel"))]
fn with_threads(_n: usize, f: &(dyn Fn() + Sync + Send)) {
    f();
}

fn bench(c: &mut Criterion) {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut group = c.benchmark_group("parallel-vs-sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_with_input(BenchmarkId::new("sequential", name), &(), |b, _| b.iter(|| with_threads(1, work.as_ref())));
        group.bench_with_input(BenchmarkId::new(format!("parallel-{cores}"), name), &(), |b, _| {
            b.iter(|| with_threads(cores, work.as_ref()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
