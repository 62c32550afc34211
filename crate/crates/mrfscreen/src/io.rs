//! File formats: model JSON, sample and edge CSV, curve CSV.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use mrf_core::{BasisFamily, BasisKind, Domain, EdgeBlock, EdgeSet, FeatureSpace, Interval, ModelSpec, SampleMatrix};
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Basis family as written in model and hyperparameter files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDto {
    pub kind: KindDto,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindDto {
    Polynomial,
    Harmonic,
}

impl BasisDto {
    pub fn family(&self) -> Result<BasisFamily> {
        let kind = match self.kind {
            KindDto::Polynomial => BasisKind::Polynomial,
            KindDto::Harmonic => BasisKind::Harmonic,
        };
        Ok(BasisFamily::new(kind, self.k)?)
    }

    pub fn of(family: BasisFamily) -> Self {
        let kind = match family.kind {
            BasisKind::Polynomial => KindDto::Polynomial,
            BasisKind::Harmonic => KindDto::Harmonic,
        };
        Self { kind, k: family.k }
    }
}

/// Per-variable intervals and length bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDto {
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub b_l: f64,
    pub b_u: f64,
}

impl DomainDto {
    pub fn domain(&self) -> Result<Domain> {
        ensure!(self.l.len() == self.u.len(), "domain has {} lower and {} upper bounds", self.l.len(), self.u.len());
        let ivs = self.l.iter().zip(&self.u).map(|(&l, &u)| Interval::new(l, u)).collect::<mrf_core::Result<Vec<_>>>()?;
        Ok(Domain::new(ivs, self.b_l, self.b_u)?)
    }

    pub fn of(domain: &Domain) -> Self {
        Self {
            l: domain.intervals().iter().map(|iv| iv.l).collect(),
            u: domain.intervals().iter().map(|iv| iv.u).collect(),
            b_l: domain.b_l(),
            b_u: domain.b_u(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub i: usize,
    pub j: usize,
    /// `k × k` block, rows indexing node `i`.
    pub block: Vec<Vec<f64>>,
}

/// Model file; node indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDto {
    pub p: usize,
    pub basis: BasisDto,
    pub domain: DomainDto,
    pub theta_max: f64,
    pub theta_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub node_params: Vec<Vec<f64>>,
    pub edges: Vec<EdgeDto>,
}

/// A validated model with its variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedModel {
    pub model: ModelSpec,
    pub names: Vec<String>,
}

/// `x1, …, xp`.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("x{i}")).collect()
}

impl ModelDto {
    pub fn validate(&self) -> Result<NamedModel> {
        let domain = self.domain.domain()?;
        ensure!(domain.p() == self.p, "domain lists {} variables, p = {}", domain.p(), self.p);
        let space = FeatureSpace::new(self.basis.family()?, domain)?;
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((e.i, e.j, EdgeBlock::from_rows(&e.block)?)))
            .collect::<Result<Vec<_>>>()?;
        let model = ModelSpec::new(space, self.node_params.clone(), edges, self.theta_max, self.theta_min, self.d)?;
        let names = match &self.names {
            Some(n) => {
                ensure!(n.len() == self.p, "{} names for p = {}", n.len(), self.p);
                n.clone()
            }
            None => default_names(self.p),
        };
        Ok(NamedModel { model, names })
    }

    pub fn of(m: &ModelSpec, names: Option<Vec<String>>) -> Self {
        Self {
            p: m.p(),
            basis: BasisDto::of(m.space().basis().family()),
            domain: DomainDto::of(m.domain()),
            theta_max: m.theta_max(),
            theta_min: m.theta_min(),
            d: Some(m.d()),
            names,
            node_params: m.node_params().to_vec(),
            edges: m.edges().iter().map(|(&(i, j), b)| EdgeDto { i, j, block: b.rows() }).collect(),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path).with_context(|| format!("cannot open {}", path.display()))?.read_to_string(&mut s)?;
    Ok(s)
}

/// Reads and validates a model file; malformed or invalid files are usage errors.
pub fn read_model(path: &Path) -> Result<NamedModel> {
    let text = read_to_string(path)?;
    let dto: ModelDto = serde_json::from_str(&text).map_err(|e| UsageError(format!("model file {}: {e}", path.display())))?;
    dto.validate().map_err(|e| UsageError(format!("model file {}: {e:#}", path.display())).into())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_model(path: &Path, m: &NamedModel) -> Result<()> {
    write_json(path, &ModelDto::of(&m.model, Some(m.names.clone())))
}

/// Float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Samples with their column names.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSamples {
    pub names: Vec<String>,
    pub samples: SampleMatrix,
}

pub fn write_samples<W: Write>(w: W, names: &[String], s: &SampleMatrix) -> Result<()> {
    ensure!(names.len() == s.p(), "{} names for {} columns", names.len(), s.p());
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(names)?;
    for row in s.rows() {
        wr.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_samples_file(path: &Path, names: &[String], s: &SampleMatrix) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_samples(f, names, s)
}

/// Parses a header row of names followed by numeric rows.
pub fn read_samples<R: Read>(r: R) -> Result<NamedSamples> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let names: Vec<String> = rd.headers().context("sample CSV has no header")?.iter().map(str::to_owned).collect();
    ensure!(!names.is_empty() && names.iter().all(|n| !n.is_empty()), "sample CSV header is empty");
    let p = names.len();
    let mut values = Vec::new();
    let mut n = 0;
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.with_context(|| format!("sample CSV row {}", line + 2))?;
        ensure!(rec.len() == p, "sample CSV row {} has {} fields, expected {p}", line + 2, rec.len());
        for field in rec.iter() {
            let v: f64 = field.trim().parse().with_context(|| format!("sample CSV row {}: {field:?} is not a number", line + 2))?;
            ensure!(v.is_finite(), "sample CSV row {}: non-finite value", line + 2);
            values.push(v);
        }
        n += 1;
    }
    Ok(NamedSamples { names, samples: SampleMatrix::new(n, p, values)? })
}

pub fn read_samples_file(path: &Path) -> Result<NamedSamples> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_samples(f).with_context(|| format!("reading {}", path.display()))
}

/// Writes `i,j` rows, 0-based.
pub fn write_edges<W: Write>(w: W, edges: &EdgeSet) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "j"])?;
    for (i, j) in edges.iter() {
        wr.write_record([i.to_string(), j.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_edges<R: Read>(r: R, p: usize) -> Result<EdgeSet> {
    let mut rd = csv::Reader::from_reader(r);
    let mut pairs = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 2 {
            bail!("edge rows need two fields");
        }
        pairs.push((rec[0].trim().parse()?, rec[1].trim().parse()?));
    }
    Ok(EdgeSet::from_pairs(p, pairs)?)
}

/// One row of an experiment curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub trial: usize,
    pub exact_recovery: bool,
    pub linf_error: f64,
    pub seconds: f64,
}

pub fn write_curve<W: Write>(w: W, rows: &[CurveRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["n", "trial", "exact_recovery", "linf_error", "seconds"])?;
    for r in rows {
        wr.write_record([r.n.to_string(), r.trial.to_string(), r.exact_recovery.to_string(), fmt_f64(r.linf_error), fmt_f64(r.seconds)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_curve<R: Read>(r: R) -> Result<Vec<CurveRow>> {
    let mut rd = csv::Reader::from_reader(r);
    rd.deserialize().map(|r| r.map_err(Into::into)).collect()
}
