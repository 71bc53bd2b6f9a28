//! Records written by `exact` and `simulate`.

use std::io::Write;

use conic_walks::simulation::MCEstimate;
use conic_walks::{ExactRational, FunctionalQuery};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&ExactRational> for ExactValue {
    fn from(r: &ExactRational) -> Self {
        ExactValue { num: r.numer().to_string(), den: r.denom().to_string(), approx: r.to_f64() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Skipped,
}

/// Estimate fields as emitted; the exact reference lives in `exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateFields {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub z: Option<f64>,
    pub rejected: u64,
    pub discarded: u64,
    pub distribution: String,
    pub seed: u64,
}

impl EstimateFields {
    pub fn new(est: &MCEstimate, distribution: &str, seed: u64) -> Self {
        EstimateFields {
            mean: est.mean,
            stderr: est.stderr,
            samples: est.samples,
            z: est.z,
            rejected: est.rejected,
            discarded: est.discarded,
            distribution: distribution.to_string(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub query: FunctionalQuery,
    pub exact: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub citation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimate: Option<EstimateFields>,
    pub status: Status,
}

/// Flat CSV layout. The header is fixed; empty cells mean "not applicable".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub functional: String,
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub l: Option<usize>,
    pub j: Option<usize>,
    pub indices: String,
    pub walks: String,
    pub bridges: String,
    pub conditioned: bool,
    pub dual: bool,
    pub num: String,
    pub den: String,
    pub approx: Option<f64>,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: Option<u64>,
    pub z: Option<f64>,
    pub rejected: Option<u64>,
    pub discarded: Option<u64>,
    pub distribution: String,
    pub seed: Option<u64>,
    pub status: String,
}

pub const CSV_HEADER: &str = "model,n,d,functional,k,m,l,j,indices,walks,bridges,conditioned,dual,num,den,approx,mean,stderr,samples,z,rejected,discarded,distribution,seed,status";

fn join(v: &Option<Vec<usize>>) -> String {
    v.as_ref()
        .map(|v| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

impl From<&OutputRecord> for CsvRow {
    fn from(r: &OutputRecord) -> Self {
        let q = &r.query;
        let e = r.estimate.as_ref();
        CsvRow {
            model: q.model.kind.to_string(),
            n: q.model.n,
            d: q.model.d,
            functional: q.functional.to_string(),
            k: q.indices.k,
            m: q.indices.m,
            l: q.indices.l,
            j: q.indices.j,
            indices: join(&q.indices.tuple),
            walks: join(&q.indices.walks),
            bridges: join(&q.indices.bridges),
            conditioned: q.conditioned,
            dual: q.dual,
            num: r.exact.as_ref().map(|x| x.num.clone()).unwrap_or_default(),
            den: r.exact.as_ref().map(|x| x.den.clone()).unwrap_or_default(),
            approx: r.exact.as_ref().map(|x| x.approx),
            mean: e.map(|e| e.mean),
            stderr: e.map(|e| e.stderr),
            samples: e.map(|e| e.samples),
            z: e.and_then(|e| e.z),
            rejected: e.map(|e| e.rejected),
            discarded: e.map(|e| e.discarded),
            distribution: e.map(|e| e.distribution.clone()).unwrap_or_default(),
            seed: e.map(|e| e.seed),
            status: serde_json::to_value(r.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Emitter<W: Write> {
    format: Format,
    csv: Option<csv::Writer<W>>,
    out: Option<W>,
}

impl<W: Write> Emitter<W> {
    pub fn new(format: Format, out: W) -> Self {
        match format {
            Format::Json => Emitter { format, csv: None, out: Some(out) },
            Format::Csv => {
                // Header written by hand so an empty run still yields it.
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                let _ = w.write_record(CSV_HEADER.split(','));
                Emitter { format, csv: Some(w), out: None }
            }
        }
    }

    pub fn emit(&mut self, record: &OutputRecord) -> std::io::Result<()> {
        match self.format {
            Format::Json => {
                let out = self.out.as_mut().expect("json writer");
                serde_json::to_writer(&mut *out, record)?;
                out.write_all(b"\n")
            }
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.serialize(CsvRow::from(record)).map_err(std::io::Error::other)?;
                w.flush()
            }
        }
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        if let Some(o) = self.out.as_mut() {
            o.flush()?;
        }
        Ok(())
    }
}
