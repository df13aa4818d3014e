//! `setup`, `encrypt` and `decrypt`.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{read_json, MDefault, PathArg, SchemeArgs};
use crate::error::CliError;
use crate::report::{Outcome, Status};
use weak_tt::primitives::RunSeed;
use weak_tt::schemes::{self, decrypt, Ciphertext, Instance};

#[derive(Debug, Clone, Args, Serialize)]
pub struct SetupArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: SchemeArgs,
}

pub fn setup(args: &SetupArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let (params, formula) = args.scheme.resolve(MDefault::Scheme)?;
    let inst = schemes::setup(&params, seed)?;
    let summary = format!("{} setup: n = {}, m = {}", params.scheme, params.n, params.m);
    Ok(Outcome::new(Status::Complete, json!({ "params": params, "instance": inst }), summary)?.formula("m", formula))
}

fn load_instance(args: &PathArg) -> Result<Instance, CliError> {
    Ok(serde_json::from_value(read_json(&args.system, "instance")?)?)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EncryptArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: PathArg,
    /// Target index in 0..=n.
    #[arg(long)]
    pub j: u64,
}

pub fn encrypt(args: &EncryptArgs, seed: &RunSeed) -> Result<Outcome, CliError> {
    let inst = load_instance(&args.system)?;
    let c = inst.encrypt(args.j, seed)?;
    let summary = format!("encrypted to j = {}", args.j);
    Outcome::new(Status::Complete, json!({ "j": args.j, "ciphertext": c }), summary)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecryptArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: PathArg,
    /// An `encrypt` report or a bare ciphertext.
    #[arg(long)]
    pub ciphertext: PathBuf,
    /// Decrypt with this user only; every user when omitted.
    #[arg(long)]
    pub i: Option<u64>,
}

pub fn decrypt_cmd(args: &DecryptArgs, _seed: &RunSeed) -> Result<Outcome, CliError> {
    let inst = load_instance(&args.system)?;
    let c: Ciphertext = serde_json::from_value(read_json(&args.ciphertext, "ciphertext")?)?;
    let keys = match args.i {
        Some(i) => vec![inst.user(i)?],
        None => inst.users(),
    };
    let outputs = keys
        .iter()
        .map(|k| Ok((k.index(), decrypt(k, &c)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let bits: Vec<String> = outputs.iter().map(|(_, o)| o.to_string()).collect();
    let outputs: Vec<_> = outputs.iter().map(|(i, o)| json!({ "i": i, "output": o })).collect();
    Outcome::new(Status::Complete, json!({ "outputs": outputs }), format!("outputs: {}", bits.join(" ")))
}
