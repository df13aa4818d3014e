//! `bench`: wall-clock cost of the primitives and scheme operations.

use std::hint::black_box;
use std::time::Instant;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::report::{Outcome, Status};
use weak_tt::primitives::{prg_expand, PrfKey, PrfRole, PrfShape, PrgSeed, RunSeed};
use weak_tt::schemes::{decrypt, setup, SchemeKind, SchemeParams};

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    /// Repetitions per operation.
    #[arg(long, default_value_t = 200)]
    pub iterations: u64,
    #[arg(long, default_value_t = 8)]
    pub n: u64,
    #[arg(long, default_value_t = 256)]
    pub m: u64,
}

struct Bench {
    rows: Vec<serde_json::Value>,
    timings: Vec<(String, f64)>,
}

impl Bench {
    fn time(&mut self, op: &str, iterations: u64, mut f: impl FnMut(u64) -> Result<(), CliError>) -> Result<(), CliError> {
        let start = Instant::now();
        for t in 0..iterations {
            f(t)?;
        }
        let per_op_us = start.elapsed().as_secs_f64() * 1e6 / iterations.max(1) as f64;
        self.rows.push(json!({ "op": op, "iterations": iterations }));
        self.timings.push((op.to_owned(), per_op_us));
        Ok(())
    }
}

pub fn run(a: &BenchArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let it = a.iterations;
    let mut b = Bench { rows: Vec::new(), timings: Vec::new() };

    let prg_seed = PrgSeed::new(seed.derive("prg").bytes(8), 128)?;
    b.time("prg-expand", it, |_| {
        black_box(prg_expand(&prg_seed, 128)?);
        Ok(())
    })?;

    let shape = PrfShape::index(64, 1 << 20, 1 << 10, PrfRole::Generic)?;
    let key = PrfKey::random(shape, &seed.derive("prf"));
    b.time("prf-eval", it, |t| {
        black_box(key.eval(t * 7919 % (1 << 20))?);
        Ok(())
    })?;
    b.time("prf-puncture", it, |t| {
        black_box(key.puncture(&[t, t + 1])?);
        Ok(())
    })?;

    for kind in [SchemeKind::ShortCtext, SchemeKind::ShortKey] {
        let params = SchemeParams::new(kind, 64, a.n, Some(a.m))?;
        let setups = (it / 20).max(1);
        b.time(&format!("{kind}-setup"), setups, |t| {
            black_box(setup(&params, &seed.derive("setup").derive(t))?);
            Ok(())
        })?;
        let inst = setup(&params, &seed.derive("instance"))?;
        let j = a.n / 2;
        b.time(&format!("{kind}-encrypt"), it, |t| {
            black_box(inst.encrypt(j, &seed.derive("encrypt").derive(t))?);
            Ok(())
        })?;
        let c = inst.encrypt(j, &seed.derive("challenge"))?;
        let key = inst.user(1)?;
        b.time(&format!("{kind}-decrypt"), it, |_| {
            black_box(decrypt(&key, &c)?);
            Ok(())
        })?;
    }

    let line = b
        .timings
        .iter()
        .map(|(op, us)| format!("{op} {us:.1}us"))
        .collect::<Vec<_>>()
        .join(", ");
    let mut out = Outcome::new(Status::Complete, json!({ "operations": b.rows }), line)?;
    out.timings = b.timings.into_iter().map(|(op, us)| (format!("{op}_us"), us)).collect();
    Ok(out)
}
