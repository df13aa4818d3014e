//! Python bindings. Seeds are integers, rationals go in as anything whose
//! `str()` reads `a/b` (so `fractions.Fraction` works) and come back as
//! `Fraction`. Reports are returned as plain dicts.

use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use weak_tt::dp::{privacy_violation_experiment, ExperimentOptions, MechanismKind};
use weak_tt::games::{
    adversary_by_name, input_matching_sweep, run_index_hiding, run_two_index_hiding, xor_identity_exact,
    GameOptions,
};
use weak_tt::primitives::RunSeed;
use weak_tt::schemes::{self, check_correctness, check_hybrids, Coverage, SchemeKind};
use weak_tt::stats::{verify_conditional_hash_lemma, HashFamily};

fn err(e: weak_tt::Error) -> PyErr {
    use weak_tt::Error::*;
    match e {
        Parameter(_) | Configuration(_) | Serialization(_) => PyValueError::new_err(e.to_string()),
        Capacity(_) | SamplingFailure { .. } => PyMemoryError::new_err(e.to_string()),
        InvariantViolation(_) => PyRuntimeError::new_err(e.to_string()),
    }
}

fn seed(master: u64, label: &str) -> RunSeed {
    RunSeed::from_master(master).derive(label)
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<num_rational::BigRational> {
    let s = obj.str()?.to_string();
    s.trim()
        .parse()
        .map_err(|_| PyValueError::new_err(format!("not a rational: {s:?}")))
}

/// JSON to Python, with `{"num", "den"}` objects turned into `Fraction`.
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            if let (2, Some(Value::String(num)), Some(Value::String(den))) = (o.len(), o.get("num"), o.get("den")) {
                let fraction = py.import("fractions")?.getattr("Fraction")?;
                return fraction.call1((format!("{num}/{den}"),));
            }
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py>(py: Python<'py>, r: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Scheme choice and sizes. `m=None` picks the scheme default.
#[pyclass(name = "SchemeParams", frozen, from_py_object)]
#[derive(Clone)]
struct PySchemeParams(schemes::SchemeParams);

#[pymethods]
impl PySchemeParams {
    #[new]
    #[pyo3(signature = (scheme, n, m=None, lambda_bits=64))]
    fn new(scheme: &str, n: u64, m: Option<u64>, lambda_bits: u32) -> PyResult<Self> {
        let kind: SchemeKind = scheme.parse().map_err(err)?;
        schemes::SchemeParams::new(kind, lambda_bits, n, m).map(Self).map_err(err)
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.scheme.name()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn m(&self) -> u64 {
        self.0.m
    }

    #[getter]
    fn lambda_bits(&self) -> u32 {
        self.0.lambda_bits
    }

    fn __repr__(&self) -> String {
        format!(
            "SchemeParams(scheme={:?}, n={}, m={}, lambda_bits={})",
            self.0.scheme.name(),
            self.0.n,
            self.0.m,
            self.0.lambda_bits
        )
    }
}

#[pyclass(name = "Ciphertext", frozen, from_py_object)]
#[derive(Clone)]
struct PyCiphertext(schemes::Ciphertext);

#[pymethods]
impl PyCiphertext {
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// The index in `[m]` for short-ctext ciphertexts.
    #[getter]
    fn index(&self) -> Option<u64> {
        match &self.0 {
            schemes::Ciphertext::ShortCtext(c) => Some(*c),
            schemes::Ciphertext::ShortKey(_) => None,
        }
    }
}

/// Output of setup: user keys and master key together.
#[pyclass(name = "System", frozen)]
struct PySystem(schemes::Instance);

#[pymethods]
impl PySystem {
    #[staticmethod]
    #[pyo3(signature = (params, seed=0))]
    fn setup(params: &PySchemeParams, seed: u64) -> PyResult<Self> {
        schemes::setup(&params.0, &self::seed(seed, "setup")).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> u64 {
        self.0.m()
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.kind().name()
    }

    #[pyo3(signature = (j, seed=0))]
    fn encrypt(&self, j: u64, seed: u64) -> PyResult<PyCiphertext> {
        self.0.encrypt(j, &self::seed(seed, "encrypt")).map(PyCiphertext).map_err(err)
    }

    /// Bit from user `i`'s key, or `None` for ⊥.
    fn decrypt(&self, i: u64, ciphertext: &PyCiphertext) -> PyResult<Option<u8>> {
        let key = self.0.user(i).map_err(err)?;
        Ok(schemes::decrypt(&key, &ciphertext.0).map_err(err)?.as_bit())
    }

    /// Decryptions by every user, in index order.
    fn decrypt_all(&self, ciphertext: &PyCiphertext) -> PyResult<Vec<Option<u8>>> {
        self.0
            .users()
            .iter()
            .map(|k| schemes::decrypt(k, &ciphertext.0).map(|o| o.as_bit()))
            .collect::<weak_tt::Result<_>>()
            .map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

/// Decrypts every covered ciphertext with every key over `setups` setups.
/// Exhaustive for short-ctext up to 2^16 ciphertexts, else `per_index` samples.
#[pyfunction]
#[pyo3(signature = (params, setups=1, per_index=16, seed=0))]
fn correctness<'py>(
    py: Python<'py>,
    params: &PySchemeParams,
    setups: u64,
    per_index: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let coverage = Coverage::default_for(&params.0, per_index);
    let r = py
        .detach(|| check_correctness(&params.0, setups, coverage, &self::seed(seed, "correctness")))
        .map_err(err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (params, i_star=None, seed=0))]
fn hybrids<'py>(
    py: Python<'py>,
    params: &PySchemeParams,
    i_star: Option<u64>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| check_hybrids(&params.0, i_star, &self::seed(seed, "hybrids")))
        .map_err(err)?;
    report(py, &r)
}

/// `game` is `"index-hiding"` or `"two-index"`.
#[pyfunction]
#[pyo3(signature = (params, i_star, adversary="constant", game="index-hiding", trials=10_000, seed=0))]
fn index_hiding<'py>(
    py: Python<'py>,
    params: &PySchemeParams,
    i_star: u64,
    adversary: &str,
    game: &str,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let adv = adversary_by_name(adversary).map_err(err)?;
    let s = self::seed(seed, game);
    let r = py
        .detach(|| match game {
            "index-hiding" => run_index_hiding(&params.0, i_star, adv.as_ref(), trials, &s, GameOptions::default()),
            "two-index" => run_two_index_hiding(&params.0, i_star, adv.as_ref(), trials, &s, GameOptions::default()),
            _ => Err(weak_tt::Error::Configuration(format!("unknown game {game:?}"))),
        })
        .map_err(err)?;
    report(py, &r)
}

#[pyfunction]
fn xor_identity<'py>(
    py: Python<'py>,
    q0: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let r = xor_identity_exact(&rational(q0)?, &rational(q1)?).map_err(err)?;
    report(py, &r)
}

/// Exact optimal advantage in the input-matching game over all tables `[m] → [n]`.
#[pyfunction]
fn input_matching<'py>(py: Python<'py>, n: u64, ms: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| input_matching_sweep(n, &ms)).map_err(err)?;
    report(py, &r)
}

/// Conditional hashing lemma on the family of all functions `[t] → [k]`.
#[pyfunction]
fn hash_lemma<'py>(py: Python<'py>, t: u64, k: u64, target: Vec<u64>, y: u64) -> PyResult<Bound<'py, PyAny>> {
    let family = HashFamily::all_functions(t, k).map_err(err)?;
    let r = verify_conditional_hash_lemma(&family, &target, y).map_err(err)?;
    report(py, &r)
}

/// Tracing attack against a summary. `queries` keeps a random subset of the
/// query family and measures accuracy only.
#[pyfunction]
#[pyo3(signature = (params, mechanism="exact", runs=20, queries=None, seed=0))]
fn attack<'py>(
    py: Python<'py>,
    params: &PySchemeParams,
    mechanism: &str,
    runs: u64,
    queries: Option<u64>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: MechanismKind = mechanism.parse().map_err(err)?;
    let mut opts = ExperimentOptions::standard(kind, runs, params.0.n);
    opts.queries = queries;
    let r = py
        .detach(|| privacy_violation_experiment(&params.0, &opts, &self::seed(seed, "attack")))
        .map_err(err)?;
    report(py, &r)
}

#[pymodule]
#[pyo3(name = "weak_tt")]
fn weak_tt_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchemeParams>()?;
    m.add_class::<PyCiphertext>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(correctness, m)?)?;
    m.add_function(wrap_pyfunction!(hybrids, m)?)?;
    m.add_function(wrap_pyfunction!(index_hiding, m)?)?;
    m.add_function(wrap_pyfunction!(xor_identity, m)?)?;
    m.add_function(wrap_pyfunction!(input_matching, m)?)?;
    m.add_function(wrap_pyfunction!(hash_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    Ok(())
}
