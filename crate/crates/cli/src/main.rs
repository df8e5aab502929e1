use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cgf_core::factor::{
    common_perp_witness, roitman_witness, transvection_witness, two_row_witness, whitehead_witness,
};
use cgf_core::homotopy::{commutator_witness, homotopy_commute, vaserstein_transport, Homotopy};
use cgf_core::json::{
    elem_from_json, error_to_json, mat_from_json, mat_to_json, parse_ring, ring_to_json, row_from_json,
    witness_to_json, word_from_json,
};
use cgf_core::localglobal::{patch, quillen_split, split_at, split_witness, DEFAULT_N_MAX};
use cgf_core::matrices::{Mat, RightInverseCert};
use cgf_core::oracle::{enumerate_orbits_with, ObjectKind, OrbitTable, DEFAULT_BUDGET};
use cgf_core::orthoquot::{
    classify_o2, commutator_harness, commutator_harness_hso, quotient_witness, vaserstein_quotient, Factored,
};
use cgf_core::reduce::{complete_witness, reduce_row_witness, Flavor, OrthOptions};
use cgf_core::harness::{self, Suite};
use cgf_core::rings::{Ring, RingRef};
use cgf_core::{Error, Result};

/// Elementary-group computations with checkable generator-word witnesses.
///
/// JSON arguments may be given inline or as `@path` to read a file.
#[derive(Parser)]
#[command(name = "cgf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a unimodular row to e_1 (linear) or a symplectic row.
    ReduceRow {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        row: String,
        #[arg(long, default_value = "linear")]
        flavor: String,
    },
    /// Complete a right-invertible matrix or isotropic frame.
    Complete {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "linear")]
        flavor: String,
        /// Attempt orthogonal completion below m = n + 2.
        #[arg(long)]
        permissive: bool,
    },
    /// Word for δ ⊥ δ⁻¹.
    Whitehead {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "linear")]
        flavor: String,
    },
    /// Word for I + c·r with r·c = 0.
    Transvection {
        #[arg(long)]
        ring: String,
        /// The column c, as a flat array.
        #[arg(long)]
        column: String,
        #[arg(long)]
        row: String,
    },
    /// Word carrying v1 to v2 given ⟨v1,w⟩ = ⟨v2,w⟩ = 1.
    CommonPerp {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        v1: String,
        #[arg(long)]
        v2: String,
        #[arg(long)]
        w: String,
    },
    /// Word carrying row 1 of a right-invertible 2×n matrix to row 2.
    TwoRow {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
        /// Right inverse; computed when omitted.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Roitman lifting: x to (x_0..x_{k-1}, y).
    Roitman {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        y: String,
    },
    /// δ(T)V = Vσ(T) with ε(T) witnesses. Input: {ring, delta_word | delta_matrix, V}.
    HomotopyCommute {
        #[arg(long)]
        flavor: String,
        #[arg(long)]
        input: String,
        #[arg(long)]
        ring: Option<String>,
    },
    /// αβ = βα·eval(ε) for a word-backed homotopy. Input: {ring, delta_word, beta}.
    Commutator {
        #[arg(long)]
        flavor: String,
        #[arg(long)]
        input: String,
        #[arg(long)]
        ring: Option<String>,
    },
    /// δV = Vσ with σ ⊥ δ⁻¹ elementary.
    Transport {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "linear")]
        flavor: String,
    },
    /// Quillen split of θ. Input: {theta, s1, s2, n_max?, n?}.
    Split {
        #[arg(long)]
        input: String,
    },
    /// Glue chart matrices. Input: {sigma1, sigma2}.
    Patch {
        #[arg(long)]
        input: String,
    },
    /// Shape (diag or antidiag) and unit u of a 2×2 orthogonal matrix
    ClassifyO2 {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
    },
    /// δ ∈ O_2 and an EO word with A = (I ⊥ δ)·eval(word)
    OrthoQuotient {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        matrix: String,
    },
    /// [a,b] ⊥ I_2 as an EO word. Input: {a, b} with each either a matrix
    /// or {delta, word}; or {hso: word over R[T], b}.
    OrthoCommutator {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        input: String,
    },
    /// Orbit table summary.
    Orbits {
        #[arg(long)]
        ring: String,
        /// row, sp or orth.
        #[arg(long, default_value = "row")]
        kind: String,
        /// Row length, or m for frames of shape 2n × 2m.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Read the table from this cache file if it exists, else write it.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Word carrying v1 to v2 from the orbit table.
    Certify {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value = "row")]
        kind: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        v1: String,
        #[arg(long)]
        v2: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Seeded randomized suite: lemmas, homotopy, localglobal or ortho.
    Harness {
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        budget: u64,
    },
}

fn read_json(arg: &str) -> Result<Value> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path, e)))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn ring_arg(arg: &str) -> Result<RingRef> {
    match arg.strip_prefix('@') {
        Some(_) => cgf_core::json::ring_from_json(&read_json(arg)?),
        None => parse_ring(arg),
    }
}

fn mat_arg(arg: &str, ring: &RingRef) -> Result<Mat> {
    mat_from_json(&read_json(arg)?, Some(ring))
}

fn row_arg(arg: &str, ring: &RingRef) -> Result<Mat> {
    row_from_json(&read_json(arg)?, ring)
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("input is missing {:?}", key)))
}

/// Base ring from `--ring` or the input's "ring" field.
fn input_ring(v: &Value, flag: &Option<String>) -> Result<RingRef> {
    match (flag, v.get("ring")) {
        (Some(r), _) => ring_arg(r),
        (None, Some(r)) => cgf_core::json::ring_from_json(r),
        (None, None) => Err(Error::Parse("no ring given".into())),
    }
}

fn object_kind(kind: &str, size: usize, n: usize) -> Result<ObjectKind> {
    match kind {
        "row" => Ok(ObjectKind::Row { len: size }),
        "sp" => Ok(ObjectKind::SpFrame { n, m: size }),
        "orth" => Ok(ObjectKind::OrthFrame { n, m: size }),
        other => Err(Error::Parse(format!("unknown object kind {:?}", other))),
    }
}

fn table(ring: &RingRef, kind: ObjectKind, budget: u64, workers: Option<usize>, cache: &Option<PathBuf>) -> Result<OrbitTable> {
    if let Some(path) = cache {
        if path.exists() {
            let t = OrbitTable::load(path)?;
            if t.ring() == ring && t.kind() == kind {
                return Ok(t);
            }
            return Err(Error::Parse(format!("cache {} holds a different table", path.display())));
        }
        let t = enumerate_orbits_with(ring, kind, budget, workers)?;
        t.save(path)?;
        return Ok(t);
    }
    enumerate_orbits_with(ring, kind, budget, workers)
}

fn factored(v: &Value, ring: &RingRef) -> Result<Factored> {
    match (v.get("delta"), v.get("word")) {
        (Some(d), Some(w)) => Factored::new(mat_from_json(d, Some(ring))?, word_from_json(w, Some(ring))?),
        _ => Factored::from_matrix(&mat_from_json(v, Some(ring))?),
    }
}

fn run(cmd: Command) -> Result<Value> {
    match cmd {
        Command::ReduceRow { ring, row, flavor } => {
            let r = ring_arg(&ring)?;
            let v = row_arg(&row, &r)?;
            Ok(witness_to_json(&reduce_row_witness(&v, Flavor::parse(&flavor)?)?))
        }
        Command::Complete { ring, matrix, flavor, permissive } => {
            let r = ring_arg(&ring)?;
            let v = mat_arg(&matrix, &r)?;
            Ok(witness_to_json(&complete_witness(&v, Flavor::parse(&flavor)?, OrthOptions { permissive })?))
        }
        Command::Whitehead { ring, matrix, flavor } => {
            let r = ring_arg(&ring)?;
            let d = mat_arg(&matrix, &r)?;
            let sp = match Flavor::parse(&flavor)? {
                Flavor::Linear => false,
                Flavor::Symplectic => true,
                Flavor::Orthogonal => return Err(Error::Unsupported("orthogonal Whitehead".into())),
            };
            Ok(witness_to_json(&whitehead_witness(&d, sp)?))
        }
        Command::Transvection { ring, column, row } => {
            let r = ring_arg(&ring)?;
            let c = row_arg(&column, &r)?.transpose();
            Ok(witness_to_json(&transvection_witness(&c, &row_arg(&row, &r)?)?))
        }
        Command::CommonPerp { ring, v1, v2, w } => {
            let r = ring_arg(&ring)?;
            Ok(witness_to_json(&common_perp_witness(&row_arg(&v1, &r)?, &row_arg(&v2, &r)?, &row_arg(&w, &r)?)?))
        }
        Command::TwoRow { ring, matrix, beta } => {
            let r = ring_arg(&ring)?;
            let a = mat_arg(&matrix, &r)?;
            let cert = match beta {
                Some(b) => RightInverseCert::new(a.clone(), mat_arg(&b, &r)?)?,
                None => a.right_inverse()?,
            };
            Ok(witness_to_json(&two_row_witness(&a, &cert)?))
        }
        Command::Roitman { ring, x, k, y } => {
            let r = ring_arg(&ring)?;
            Ok(witness_to_json(&roitman_witness(&row_arg(&x, &r)?, k, &row_arg(&y, &r)?)?))
        }
        Command::HomotopyCommute { flavor, input, ring } => {
            let flavor = Flavor::parse(&flavor)?;
            let v = read_json(&input)?;
            let base = input_ring(&v, &ring)?;
            let var = v.get("var").and_then(Value::as_str).unwrap_or("T");
            let poly = Ring::poly(&base, var);
            let h = match (v.get("delta_word"), v.get("delta_matrix")) {
                (Some(w), _) => Homotopy::from_word(flavor, word_from_json(w, Some(&poly))?)?,
                (None, Some(m)) => Homotopy::from_matrix(flavor, mat_from_json(m, Some(&poly))?)?,
                (None, None) => return Err(Error::Parse("input needs delta_word or delta_matrix".into())),
            };
            let frame = mat_from_json(get(&v, "V")?, Some(&base))?;
            Ok(witness_to_json(&homotopy_commute(&h, &frame)?.witness))
        }
        Command::Commutator { flavor, input, ring } => {
            let flavor = Flavor::parse(&flavor)?;
            let v = read_json(&input)?;
            let base = input_ring(&v, &ring)?;
            let poly = Ring::poly(&base, v.get("var").and_then(Value::as_str).unwrap_or("T"));
            let h = Homotopy::from_word(flavor, word_from_json(get(&v, "delta_word")?, Some(&poly))?)?;
            let b = mat_from_json(get(&v, "beta")?, Some(&base))?;
            Ok(witness_to_json(&commutator_witness(&h, &b)?.1))
        }
        Command::Transport { ring, delta, v, flavor } => {
            let r = ring_arg(&ring)?;
            let (_, _, w) = vaserstein_transport(&mat_arg(&delta, &r)?, &mat_arg(&v, &r)?, Flavor::parse(&flavor)?)?;
            Ok(witness_to_json(&w))
        }
        Command::Split { input } => {
            let v = read_json(&input)?;
            let theta = word_from_json(get(&v, "theta")?, None)?;
            let int = |key: &str| -> Result<num_bigint::BigInt> {
                let x = elem_from_json(&Ring::integers(), get(&v, key)?)?;
                Ok(x.as_int().expect("integer payload").clone())
            };
            let (s1, s2) = (int("s1")?, int("s2")?);
            let split = match v.get("n").and_then(Value::as_u64) {
                Some(n) => split_at(&theta, &s1, &s2, n as u32)?
                    .ok_or_else(|| Error::CheckFailed(format!("N = {} does not split θ", n)))?,
                None => {
                    let n_max = v.get("n_max").and_then(Value::as_u64).map_or(DEFAULT_N_MAX, |n| n as u32);
                    quillen_split(&theta, &s1, &s2, n_max)?
                }
            };
            Ok(witness_to_json(&split_witness(&theta, &split)?))
        }
        Command::Patch { input } => {
            let v = read_json(&input)?;
            let s1 = mat_from_json(get(&v, "sigma1")?, None)?;
            let s2 = mat_from_json(get(&v, "sigma2")?, None)?;
            let glued = patch(&s1, &s2)?;
            Ok(json!({"claim": "patch", "matrix": mat_to_json(&glued)}))
        }
        Command::ClassifyO2 { ring, matrix } => {
            let r = ring_arg(&ring)?;
            let (shape, u) = classify_o2(&mat_arg(&matrix, &r)?)?;
            Ok(json!({
                "claim": "classify_o2",
                "shape": shape.name(),
                "unit": cgf_core::json::elem_to_json(&r, &u),
                "ring": ring_to_json(&r),
            }))
        }
        Command::OrthoQuotient { ring, matrix } => {
            let r = ring_arg(&ring)?;
            let a = mat_arg(&matrix, &r)?;
            let q = vaserstein_quotient(&a)?;
            Ok(witness_to_json(&quotient_witness(&a, &q)?))
        }
        Command::OrthoCommutator { ring, input } => {
            let r = ring_arg(&ring)?;
            let v = read_json(&input)?;
            let b = factored(get(&v, "b")?, &r)?;
            let (_, w) = match v.get("hso") {
                Some(h) => {
                    let poly = Ring::poly(&r, "T");
                    let gamma = Homotopy::from_word(Flavor::Orthogonal, word_from_json(h, Some(&poly))?)?;
                    commutator_harness_hso(&gamma, &b)?
                }
                None => commutator_harness(&factored(get(&v, "a")?, &r)?, &b)?,
            };
            Ok(witness_to_json(&w))
        }
        Command::Orbits { ring, kind, size, n, budget, workers, cache } => {
            let r = ring_arg(&ring)?;
            Ok(table(&r, object_kind(&kind, size, n)?, budget, workers, &cache)?.summary())
        }
        Command::Certify { ring, kind, size, n, v1, v2, budget, cache } => {
            let r = ring_arg(&ring)?;
            let kind = object_kind(&kind, size, n)?;
            let t = table(&r, kind, budget, None, &cache)?;
            let read = |a: &str| match kind {
                ObjectKind::Row { .. } => row_arg(a, &r),
                _ => mat_arg(a, &r),
            };
            Ok(witness_to_json(&t.certify_witness(&read(&v1)?, &read(&v2)?)?))
        }
        Command::Harness { suite, seed, budget } => {
            let report = harness::run(Suite::parse(&suite)?, seed, budget);
            let ok = report.ok;
            let v = serde_json::to_value(report).expect("serializable");
            if ok {
                Ok(v)
            } else {
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                Err(Error::CheckFailed("harness reported failures".into()))
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::ReduceRow { .. } => "reduce-row",
        Command::Complete { .. } => "complete",
        Command::Whitehead { .. } => "whitehead",
        Command::Transvection { .. } => "transvection",
        Command::CommonPerp { .. } => "common-perp",
        Command::TwoRow { .. } => "two-row",
        Command::Roitman { .. } => "roitman",
        Command::HomotopyCommute { .. } => "homotopy-commute",
        Command::Commutator { .. } => "commutator",
        Command::Transport { .. } => "transport",
        Command::Split { .. } => "split",
        Command::Patch { .. } => "patch",
        Command::ClassifyO2 { .. } => "classify-o2",
        Command::OrthoQuotient { .. } => "ortho-quotient",
        Command::OrthoCommutator { .. } => "ortho-commutator",
        Command::Orbits { .. } => "orbits",
        Command::Certify { .. } => "certify",
        Command::Harness { .. } => "harness",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let out = error_to_json(&e, json!({"command": name}));
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            ExitCode::from(2)
        }
    }
}
