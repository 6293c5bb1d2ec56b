#![allow(dead_code)]

use heiscurv_core::{build_norm, NormSpec, TrigTable};

pub fn families() -> Vec<(&'static str, NormSpec)> {
    vec![
        ("euclidean", NormSpec::Euclidean),
        ("diag(1,4)", NormSpec::InnerProduct { matrix: [[1.0, 0.0], [0.0, 4.0]] }),
        ("tilted", NormSpec::InnerProduct { matrix: [[2.0, 0.5], [0.5, 1.0]] }),
        ("lp4", NormSpec::Lp { p: 4.0 }),
        ("interp(4,0.5)", NormSpec::Interpolated { q: 4.0, t: 0.5 }),
    ]
}

pub fn table(spec: &NormSpec) -> TrigTable {
    TrigTable::new(&build_norm(spec).unwrap(), heiscurv_core::trig::DEFAULT_RESOLUTION).unwrap()
}

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}
