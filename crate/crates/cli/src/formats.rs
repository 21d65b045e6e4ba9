//! Sketch and vector file formats.
//!
//! Binary sketch layout (all integers and floats little-endian):
//!
//! ```text
//! magic            8  bytes  b"IPSKETCH"
//! version          u32       currently 1
//! method           u8        0 EMPTY, 1 MH, 2 WMH, 3 KMV, 4 JL, 5 CS
//! strategy         u8        0 none, 1 exact, 2 fast
//! reserved         u16       zero
//! dimension        u64
//! samples          u64       samples / rows / buckets / KMV budget
//! discretization   u64       zero for unweighted methods
//! seed             u64
//! prime            u64       hash modulus the sketch was built over
//! prng             u8 len + bytes, generator identifier
//! payload                    per-method arrays, see below
//! ```
//!
//! Payloads: MH stores `hash_mins` then `sampled_values` (f64 each);
//! WMH adds the stored norm (f64); KMV stores an entry count then hash,
//! index, and value arrays; JL stores the projection; CS stores the
//! repetition count then the `reps x buckets` table row-major.
//!
//! The JSON mirror carries the same fields under the same names, for
//! debugging; `--json` on the CLI selects it.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use ipsketch_core::baselines::{CountSketch, JlSketch, KmvSketch};
use ipsketch_core::hashing::{HASH_MODULUS, PRNG_ID};
use ipsketch_core::minhash::MinHashSketch;
use ipsketch_core::tables::AnySketch;
use ipsketch_core::weighted_minhash::{Strategy, WeightedMinHashSketch};
use ipsketch_core::{Method, SparseVector};
use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 8] = b"IPSKETCH";
pub const FORMAT_VERSION: u32 = 1;

fn method_code(method: Method) -> u8 {
    match method {
        Method::Empty => 0,
        Method::MinHash => 1,
        Method::WeightedMinHash => 2,
        Method::Kmv => 3,
        Method::Jl => 4,
        Method::CountSketch => 5,
    }
}

fn method_from_code(code: u8) -> Result<Method> {
    Ok(match code {
        0 => Method::Empty,
        1 => Method::MinHash,
        2 => Method::WeightedMinHash,
        3 => Method::Kmv,
        4 => Method::Jl,
        5 => Method::CountSketch,
        other => bail!("unknown method code {other}"),
    })
}

fn strategy_code(strategy: Option<Strategy>) -> u8 {
    match strategy {
        None => 0,
        Some(Strategy::Exact) => 1,
        Some(Strategy::Fast) => 2,
    }
}

fn strategy_from_code(code: u8) -> Result<Option<Strategy>> {
    Ok(match code {
        0 => None,
        1 => Some(Strategy::Exact),
        2 => Some(Strategy::Fast),
        other => bail!("unknown strategy code {other}"),
    })
}

struct Header {
    method: Method,
    strategy: Option<Strategy>,
    dimension: u64,
    samples: u64,
    discretization: u64,
    seed: u64,
}

/// Writes a sketch in the binary format.
pub fn write_binary(writer: &mut impl Write, sketch: &AnySketch) -> Result<()> {
    let header = header_of(sketch);
    writer.write_all(MAGIC)?;
    writer.write_all(&FORMAT_VERSION.to_le_bytes())?;
    writer.write_all(&[method_code(header.method), strategy_code(header.strategy)])?;
    writer.write_all(&0u16.to_le_bytes())?;
    for word in [
        header.dimension,
        header.samples,
        header.discretization,
        header.seed,
        HASH_MODULUS,
    ] {
        writer.write_all(&word.to_le_bytes())?;
    }
    let prng = PRNG_ID.as_bytes();
    writer.write_all(&[prng.len() as u8])?;
    writer.write_all(prng)?;
    match sketch {
        AnySketch::Empty { .. } => {}
        AnySketch::MinHash(s) => {
            write_f64s(writer, s.hash_mins())?;
            write_f64s(writer, s.sampled_values())?;
        }
        AnySketch::WeightedMinHash(s) => {
            write_f64s(writer, s.hash_mins())?;
            write_f64s(writer, s.sampled_values())?;
            writer.write_all(&s.stored_norm().to_le_bytes())?;
        }
        AnySketch::Kmv(s) => {
            writer.write_all(&(s.entries().len() as u64).to_le_bytes())?;
            for &(hash, _, _) in s.entries() {
                writer.write_all(&hash.to_le_bytes())?;
            }
            for &(_, index, _) in s.entries() {
                writer.write_all(&index.to_le_bytes())?;
            }
            for &(_, _, value) in s.entries() {
                writer.write_all(&value.to_le_bytes())?;
            }
        }
        AnySketch::Jl(s) => write_f64s(writer, s.projected())?,
        AnySketch::CountSketch(s) => {
            writer.write_all(&(s.reps() as u64).to_le_bytes())?;
            write_f64s(writer, s.table())?;
        }
    }
    Ok(())
}

/// Reads a sketch in the binary format, validating the header.
pub fn read_binary(reader: &mut impl Read) -> Result<AnySketch> {
    let mut magic = [0u8; 8];
    reader.read_exact(&mut magic).context("reading magic")?;
    if &magic != MAGIC {
        bail!("not a sketch file (bad magic)");
    }
    let version = read_u32(reader)?;
    if version != FORMAT_VERSION {
        bail!("unsupported format version {version}");
    }
    let mut codes = [0u8; 2];
    reader.read_exact(&mut codes)?;
    let method = method_from_code(codes[0])?;
    let strategy = strategy_from_code(codes[1])?;
    let mut reserved = [0u8; 2];
    reader.read_exact(&mut reserved)?;
    let dimension = read_u64(reader)?;
    let samples = read_u64(reader)?;
    let discretization = read_u64(reader)?;
    let seed = read_u64(reader)?;
    let prime = read_u64(reader)?;
    if prime != HASH_MODULUS {
        bail!("sketch built over prime {prime}, this build uses {HASH_MODULUS}");
    }
    let mut len = [0u8; 1];
    reader.read_exact(&mut len)?;
    let mut prng = vec![0u8; len[0] as usize];
    reader.read_exact(&mut prng)?;
    if prng != PRNG_ID.as_bytes() {
        bail!(
            "sketch built with generator {:?}, this build uses {PRNG_ID:?}",
            String::from_utf8_lossy(&prng)
        );
    }
    Ok(match method {
        Method::Empty => AnySketch::Empty { dimension },
        Method::MinHash => {
            let hash_mins = read_f64s(reader, samples as usize)?;
            let sampled = read_f64s(reader, samples as usize)?;
            AnySketch::MinHash(MinHashSketch::from_parts(hash_mins, sampled, seed, dimension)?)
        }
        Method::WeightedMinHash => {
            let hash_mins = read_f64s(reader, samples as usize)?;
            let sampled = read_f64s(reader, samples as usize)?;
            let norm = read_f64(reader)?;
            let strategy =
                strategy.ok_or_else(|| anyhow::anyhow!("weighted sketch missing strategy"))?;
            AnySketch::WeightedMinHash(WeightedMinHashSketch::from_parts(
                hash_mins,
                sampled,
                norm,
                discretization,
                seed,
                dimension,
                strategy,
            )?)
        }
        Method::Kmv => {
            let count = read_u64(reader)? as usize;
            let hashes = read_f64s(reader, count)?;
            let indices = read_u64s(reader, count)?;
            let values = read_f64s(reader, count)?;
            let entries = hashes
                .into_iter()
                .zip(indices)
                .zip(values)
                .map(|((h, i), v)| (h, i, v))
                .collect();
            AnySketch::Kmv(KmvSketch::from_parts(entries, samples as usize, seed, dimension)?)
        }
        Method::Jl => {
            let projected = read_f64s(reader, samples as usize)?;
            AnySketch::Jl(JlSketch::from_parts(projected, seed, dimension)?)
        }
        Method::CountSketch => {
            let reps = read_u64(reader)? as usize;
            let table = read_f64s(reader, samples as usize * reps)?;
            AnySketch::CountSketch(CountSketch::from_parts(
                table,
                samples as usize,
                reps,
                seed,
                dimension,
            )?)
        }
    })
}

fn header_of(sketch: &AnySketch) -> Header {
    match sketch {
        AnySketch::Empty { dimension } => Header {
            method: Method::Empty,
            strategy: None,
            dimension: *dimension,
            samples: 0,
            discretization: 0,
            seed: 0,
        },
        AnySketch::MinHash(s) => Header {
            method: Method::MinHash,
            strategy: None,
            dimension: s.dimension(),
            samples: s.samples() as u64,
            discretization: 0,
            seed: s.seed(),
        },
        AnySketch::WeightedMinHash(s) => Header {
            method: Method::WeightedMinHash,
            strategy: Some(s.strategy()),
            dimension: s.dimension(),
            samples: s.samples() as u64,
            discretization: s.discretization(),
            seed: s.seed(),
        },
        AnySketch::Kmv(s) => Header {
            method: Method::Kmv,
            strategy: None,
            dimension: s.dimension(),
            samples: s.budget() as u64,
            discretization: 0,
            seed: s.seed(),
        },
        AnySketch::Jl(s) => Header {
            method: Method::Jl,
            strategy: None,
            dimension: s.dimension(),
            samples: s.rows() as u64,
            discretization: 0,
            seed: s.seed(),
        },
        AnySketch::CountSketch(s) => Header {
            method: Method::CountSketch,
            strategy: None,
            dimension: s.dimension(),
            samples: s.buckets() as u64,
            discretization: 0,
            seed: s.seed(),
        },
    }
}

fn write_f64s(writer: &mut impl Write, values: &[f64]) -> Result<()> {
    for v in values {
        writer.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32(reader: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(reader: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    reader.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64(reader: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    reader.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

fn read_f64s(reader: &mut impl Read, count: usize) -> Result<Vec<f64>> {
    (0..count).map(|_| read_f64(reader)).collect()
}

fn read_u64s(reader: &mut impl Read, count: usize) -> Result<Vec<u64>> {
    (0..count).map(|_| read_u64(reader)).collect()
}

/// JSON mirror of the binary layout, field for field.
#[derive(Serialize, Deserialize)]
pub struct SketchJson {
    pub version: u32,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    pub dimension: u64,
    pub samples: u64,
    pub discretization: u64,
    pub seed: u64,
    pub prime: u64,
    pub prng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hash_mins: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stored_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projected: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

pub fn to_json(sketch: &AnySketch) -> SketchJson {
    let header = header_of(sketch);
    let mut json = SketchJson {
        version: FORMAT_VERSION,
        method: header.method.tag().to_string(),
        strategy: header.strategy.map(|s| s.tag().to_string()),
        dimension: header.dimension,
        samples: header.samples,
        discretization: header.discretization,
        seed: header.seed,
        prime: HASH_MODULUS,
        prng: PRNG_ID.to_string(),
        hash_mins: None,
        sampled_values: None,
        stored_norm: None,
        indices: None,
        values: None,
        projected: None,
        reps: None,
        table: None,
    };
    match sketch {
        AnySketch::Empty { .. } => {}
        AnySketch::MinHash(s) => {
            json.hash_mins = Some(s.hash_mins().to_vec());
            json.sampled_values = Some(s.sampled_values().to_vec());
        }
        AnySketch::WeightedMinHash(s) => {
            json.hash_mins = Some(s.hash_mins().to_vec());
            json.sampled_values = Some(s.sampled_values().to_vec());
            json.stored_norm = Some(s.stored_norm());
        }
        AnySketch::Kmv(s) => {
            json.hash_mins = Some(s.entries().iter().map(|&(h, _, _)| h).collect());
            json.indices = Some(s.entries().iter().map(|&(_, i, _)| i).collect());
            json.values = Some(s.entries().iter().map(|&(_, _, v)| v).collect());
        }
        AnySketch::Jl(s) => json.projected = Some(s.projected().to_vec()),
        AnySketch::CountSketch(s) => {
            json.reps = Some(s.reps() as u64);
            json.table = Some(s.table().to_vec());
        }
    }
    json
}

pub fn from_json(json: &SketchJson) -> Result<AnySketch> {
    if json.version != FORMAT_VERSION {
        bail!("unsupported format version {}", json.version);
    }
    if json.prime != HASH_MODULUS {
        bail!("sketch built over prime {}, this build uses {HASH_MODULUS}", json.prime);
    }
    if json.prng != PRNG_ID {
        bail!("sketch built with generator {:?}, this build uses {PRNG_ID:?}", json.prng);
    }
    let method = Method::from_tag(&json.method)
        .ok_or_else(|| anyhow::anyhow!("unknown method tag {:?}", json.method))?;
    let need = |field: &Option<Vec<f64>>, name: &str| -> Result<Vec<f64>> {
        field.clone().ok_or_else(|| anyhow::anyhow!("missing field {name}"))
    };
    Ok(match method {
        Method::Empty => AnySketch::Empty {
            dimension: json.dimension,
        },
        Method::MinHash => AnySketch::MinHash(MinHashSketch::from_parts(
            need(&json.hash_mins, "hash_mins")?,
            need(&json.sampled_values, "sampled_values")?,
            json.seed,
            json.dimension,
        )?),
        Method::WeightedMinHash => {
            let strategy = json
                .strategy
                .as_deref()
                .and_then(Strategy::from_tag)
                .ok_or_else(|| anyhow::anyhow!("missing or unknown strategy"))?;
            AnySketch::WeightedMinHash(WeightedMinHashSketch::from_parts(
                need(&json.hash_mins, "hash_mins")?,
                need(&json.sampled_values, "sampled_values")?,
                json.stored_norm
                    .ok_or_else(|| anyhow::anyhow!("missing field stored_norm"))?,
                json.discretization,
                json.seed,
                json.dimension,
                strategy,
            )?)
        }
        Method::Kmv => {
            let hashes = need(&json.hash_mins, "hash_mins")?;
            let indices = json
                .indices
                .clone()
                .ok_or_else(|| anyhow::anyhow!("missing field indices"))?;
            let values = need(&json.values, "values")?;
            if hashes.len() != indices.len() || hashes.len() != values.len() {
                bail!("KMV arrays must have equal length");
            }
            let entries = hashes
                .into_iter()
                .zip(indices)
                .zip(values)
                .map(|((h, i), v)| (h, i, v))
                .collect();
            AnySketch::Kmv(KmvSketch::from_parts(
                entries,
                json.samples as usize,
                json.seed,
                json.dimension,
            )?)
        }
        Method::Jl => AnySketch::Jl(JlSketch::from_parts(
            need(&json.projected, "projected")?,
            json.seed,
            json.dimension,
        )?),
        Method::CountSketch => AnySketch::CountSketch(CountSketch::from_parts(
            need(&json.table, "table")?,
            json.samples as usize,
            json.reps.ok_or_else(|| anyhow::anyhow!("missing field reps"))? as usize,
            json.seed,
            json.dimension,
        )?),
    })
}

/// Reads the vector text interchange format: a header line `n=<dimension>`
/// followed by one `index value` pair per line. Blank lines are skipped.
pub fn read_vector_text(text: &str) -> Result<SparseVector> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().context("empty vector file")?;
    let dimension: u64 = header
        .strip_prefix("n=")
        .with_context(|| format!("expected header n=<dimension>, found {header:?}"))?
        .trim()
        .parse()
        .context("parsing dimension")?;
    let mut entries = Vec::new();
    for line in lines {
        let mut parts = line.split_whitespace();
        let index: u64 = parts
            .next()
            .with_context(|| format!("missing index on line {line:?}"))?
            .parse()
            .with_context(|| format!("parsing index on line {line:?}"))?;
        let value: f64 = parts
            .next()
            .with_context(|| format!("missing value on line {line:?}"))?
            .parse()
            .with_context(|| format!("parsing value on line {line:?}"))?;
        if parts.next().is_some() {
            bail!("trailing tokens on line {line:?}");
        }
        entries.push((index, value));
    }
    Ok(SparseVector::new(dimension, entries)?)
}

/// Writes the vector text interchange format.
pub fn write_vector_text(vector: &SparseVector) -> String {
    let mut out = format!("n={}\n", vector.dimension());
    for &(index, value) in vector.entries() {
        out.push_str(&format!("{index} {value}\n"));
    }
    out
}
