use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpspace_core::algebra::{PrimeField, SparsePoly, DEFAULT_PRIME};
use vpspace_core::annihilator::{annihilate, AnnihilateOptions, ExplicitMap};
use vpspace_core::circuit::eval;
use vpspace_core::coeff::{coeff_fn_of_circuit, read_int, stream_mul, CoeffOptions, IntOracle, WorkspaceMeter};
use vpspace_core::corpus::{random_map, random_proj_circuit};
use vpspace_core::detc::{det_circuit, identity_encoder};

fn annihilator(c: &mut Criterion) {
    let z = SparsePoly::var(1, 0);
    let moment = ExplicitMap::from_components(1, &[z.clone(), z.pow(2), z.pow(3)]).unwrap();
    c.bench_function("annihilate moment curve", |b| b.iter(|| annihilate(&moment, &AnnihilateOptions::default()).unwrap()));
    let comps = random_map(1, 3, 2, 3, &mut ChaCha8Rng::seed_from_u64(1));
    let map = ExplicitMap::from_components(1, &comps).unwrap();
    let opts = AnnihilateOptions { build_circuit: false, ..Default::default() };
    c.bench_function("annihilate random m=1 n=3 d=2", |b| b.iter(|| annihilate(&map, &opts).unwrap()));
}

fn determinant(c: &mut Criterion) {
    c.bench_function("det_circuit build N=8", |b| b.iter(|| det_circuit(&identity_encoder(8)).unwrap()));
    let circ = det_circuit(&identity_encoder(8)).unwrap();
    let f = PrimeField::new(DEFAULT_PRIME);
    let pt: Vec<u64> = (0..circ.num_vars() as u64).collect();
    c.bench_function("det_circuit eval N=8", |b| b.iter(|| eval(&circ, &f, &pt).unwrap()));
}

fn streaming(c: &mut Criterion) {
    let a = BigInt::from(0xdead_beefu64);
    let b = -BigInt::from(0x1234_5678u64);
    c.bench_function("stream_mul 32-bit", |bch| {
        bch.iter(|| {
            let o = stream_mul(IntOracle::with_width(a.clone(), 32).unwrap(), IntOracle::with_width(b.clone(), 32).unwrap());
            read_int(o.as_ref(), &mut WorkspaceMeter::new()).unwrap()
        })
    });
}

fn coefficients(c: &mut Criterion) {
    let circ = random_proj_circuit(2, 1, 10, &mut ChaCha8Rng::seed_from_u64(3));
    c.bench_function("coeff_fn all coefficients", |b| {
        b.iter(|| coeff_fn_of_circuit(&circ, CoeffOptions::default()).unwrap().nonzero_coefficients().unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = annihilator, determinant, streaming, coefficients
}
criterion_main!(benches);
