//! Versioned text formats for every pipeline artifact.
//!
//! Each file opens with `# gblearn <kind> v1`. Ideal files add one
//! `key=value` header line and then hold one flat encoding per line. Label,
//! feature, split and quarantine files are CSV with a column header; rows
//! without a label (quarantined ideals) are written as `NA` so row `i`
//! always refers to ideal `i`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::{ArrayD, IxDyn};

use crate::encoding::{decode_flat, encode_flat};
use crate::error::{Error, PartialStats, Result};
use crate::features::{FeatureVector, FEATURE_COLUMNS};
use crate::labeling::{GbLabel, Target};
use crate::learning::{
    ConstantModel, EvalReport, InputTransform, LinearModel, NetworkConfig, NeuralNet, TrainedModel,
    TrainingCurve,
};
use crate::rng::SplitMix64;
use crate::sampler::{IdealSample, RandomModel, SamplingMode};

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL: &str = concat!("gblearn-", env!("CARGO_PKG_VERSION"));
const NA: &str = "NA";
const LABEL_COLUMNS: &str = "gb_size,gb_max_degree";
const QUARANTINE_COLUMNS: &str = "row,pairs_processed,reductions_to_zero,basis_len";
const SPLIT_COLUMNS: &str = "row,set";
const CURVE_COLUMNS: &str = "epoch,train_loss,val_loss";
const REPORT_COLUMNS: &str = "model,input,target,r_squared,overshoot_rate,accuracy,samples";

/// Generator order recorded in an ideals file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    /// As sampled.
    Given,
    /// Sorted by [`crate::encoding::canonicalize`].
    Canonical,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Given => "given",
            Layout::Canonical => "canonical",
        })
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "given" => Ok(Layout::Given),
            "canonical" => Ok(Layout::Canonical),
            other => Err(Error::InvalidArgument(format!("unknown layout `{other}`"))),
        }
    }
}

/// What a model was trained on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputKind {
    Encodings,
    Features,
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputKind::Encodings => "encodings",
            InputKind::Features => "features",
        })
    }
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "encodings" => Ok(InputKind::Encodings),
            "features" => Ok(InputKind::Features),
            other => Err(Error::InvalidArgument(format!("unknown input kind `{other}`"))),
        }
    }
}

/// Self-description of an ideals file. Model fields are `None` for sets
/// that were not sampled (hand-written or imported ideals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetHeader {
    pub nvars: usize,
    pub degree: Option<u32>,
    pub gens: usize,
    pub mode: Option<SamplingMode>,
    pub seed: Option<u64>,
    pub count: usize,
    pub tool: String,
    pub layout: Layout,
}

impl DatasetHeader {
    pub fn for_model(model: &RandomModel, count: usize) -> Self {
        DatasetHeader {
            nvars: model.nvars,
            degree: Some(model.degree),
            gens: model.gens,
            mode: Some(model.mode),
            seed: Some(model.seed),
            count,
            tool: TOOL.to_string(),
            layout: Layout::Given,
        }
    }

    pub fn unsampled(nvars: usize, gens: usize, count: usize) -> Self {
        DatasetHeader {
            nvars,
            degree: None,
            gens,
            mode: None,
            seed: None,
            count,
            tool: TOOL.to_string(),
            layout: Layout::Given,
        }
    }

    /// The sampling model, when the header records one.
    pub fn model(&self) -> Option<RandomModel> {
        RandomModel::new(self.nvars, self.degree?, self.gens, self.mode?, self.seed?).ok()
    }

    /// Width of one encoded row.
    pub fn row_len(&self) -> usize {
        2 * self.nvars * self.gens
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub samples: Vec<IdealSample>,
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Line-numbered reader that turns problems into [`Error::Parse`].
struct Lines<R> {
    inner: std::io::Lines<R>,
    path: String,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R, path: &str) -> Self {
        Lines {
            inner: reader.lines(),
            path: path.to_string(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(line) => {
                self.line += 1;
                Ok(Some(line?))
            }
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?.ok_or_else(|| {
            self.line += 1;
            self.err(format!("missing {what}"))
        })
    }

    fn magic(&mut self, kind: &str) -> Result<()> {
        let first = self.expect_line("file header")?;
        let prefix = format!("# gblearn {kind} v");
        let version = first
            .strip_prefix(&prefix)
            .ok_or_else(|| self.err(format!("not a gblearn {kind} file (expected `{prefix}{FORMAT_VERSION}`)")))?;
        if version.trim() != FORMAT_VERSION.to_string() {
            return Err(Error::Version {
                expected: FORMAT_VERSION,
                found: version.trim().to_string(),
            });
        }
        Ok(())
    }

    fn columns(&mut self, expected: &str) -> Result<()> {
        let line = self.expect_line("column header")?;
        if line.trim() != expected {
            return Err(self.err(format!("expected columns `{expected}`, found `{}`", line.trim())));
        }
        Ok(())
    }

    /// Remaining nonblank lines with their numbers.
    fn data(&mut self) -> Result<Vec<(usize, String)>> {
        let mut out = Vec::new();
        while let Some(line) = self.next_line()? {
            if !line.trim().is_empty() {
                out.push((self.line, line));
            }
        }
        Ok(out)
    }

    fn at(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }
}

fn open(path: &Path) -> Result<Lines<BufReader<File>>> {
    let file = File::open(path)?;
    Ok(Lines::new(BufReader::new(file), &path.display().to_string()))
}

fn parse_field<T: FromStr>(raw: &str, what: &str) -> std::result::Result<T, String> {
    raw.trim()
        .parse()
        .map_err(|_| format!("invalid {what} `{}`", raw.trim()))
}

fn parse_optional<T: FromStr>(raw: &str, what: &str) -> std::result::Result<Option<T>, String> {
    if raw == "none" {
        Ok(None)
    } else {
        parse_field(raw, what).map(Some)
    }
}

// ---------------------------------------------------------------- ideals

pub fn write_ideals_to(w: &mut impl Write, header: &DatasetHeader, samples: &[IdealSample]) -> Result<()> {
    if header.count != samples.len() {
        return Err(Error::Inconsistent(format!(
            "header announces {} samples, {} given",
            header.count,
            samples.len()
        )));
    }
    writeln!(w, "# gblearn ideals v{FORMAT_VERSION}")?;
    writeln!(
        w,
        "# n={} d={} s={} mode={} seed={} count={} tool={} layout={}",
        header.nvars,
        opt(&header.degree),
        header.gens,
        opt(&header.mode),
        opt(&header.seed),
        header.count,
        header.tool,
        header.layout
    )?;
    let mut line = String::new();
    for sample in samples {
        if sample.nvars != header.nvars || sample.gens.len() != header.gens {
            return Err(Error::Shape {
                expected: format!("n={}, s={}", header.nvars, header.gens),
                found: format!("n={}, s={} at sample {}", sample.nvars, sample.gens.len(), sample.index),
            });
        }
        line.clear();
        for (i, v) in encode_flat(sample, false).values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_ideals(path: impl AsRef<Path>, header: &DatasetHeader, samples: &[IdealSample]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_ideals_to(&mut w, header, samples)?;
    finish(w)
}

fn wrap<T>(lines: &Lines<impl BufRead>, r: std::result::Result<T, String>) -> Result<T> {
    r.map_err(|m| lines.err(m))
}

fn parse_header(lines: &Lines<impl BufRead>, raw: &str) -> Result<DatasetHeader> {
    let body = raw
        .strip_prefix('#')
        .ok_or_else(|| lines.err("expected `# key=value ...` header line"))?;
    let mut fields = std::collections::BTreeMap::new();
    for token in body.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| lines.err(format!("header token `{token}` is not key=value")))?;
        fields.insert(k, v);
    }
    let get = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| lines.err(format!("header lacks `{key}`")))
    };
    let header = DatasetHeader {
        nvars: wrap(lines, parse_field(get("n")?, "n"))?,
        degree: wrap(lines, parse_optional(get("d")?, "d"))?,
        gens: wrap(lines, parse_field(get("s")?, "s"))?,
        mode: wrap(lines, parse_optional(get("mode")?, "mode"))?,
        seed: wrap(lines, parse_optional(get("seed")?, "seed"))?,
        count: wrap(lines, parse_field(get("count")?, "count"))?,
        tool: get("tool")?.to_string(),
        layout: wrap(lines, parse_field(get("layout")?, "layout"))?,
    };
    if header.nvars == 0 || header.gens == 0 {
        return Err(lines.err("n and s must be positive"));
    }
    Ok(header)
}

pub fn read_ideals_from(reader: impl BufRead, path: &str) -> Result<Dataset> {
    let mut lines = Lines::new(reader, path);
    lines.magic("ideals")?;
    let raw = lines.expect_line("model header")?;
    let header = parse_header(&lines, &raw)?;
    let width = header.row_len();
    let mut samples = Vec::with_capacity(header.count);
    for (line_no, line) in lines.data()? {
        let values = line
            .split(',')
            .map(|t| parse_field::<u32>(t, "exponent"))
            .collect::<std::result::Result<Vec<u32>, _>>()
            .map_err(|m| lines.at(line_no, m))?;
        if values.len() != width {
            return Err(lines.at(line_no, format!("expected {width} values, found {}", values.len())));
        }
        let mut sample = decode_flat(&values, header.nvars, header.gens).map_err(|e| lines.at(line_no, e.to_string()))?;
        sample.index = samples.len() as u64;
        samples.push(sample);
    }
    if samples.len() != header.count {
        return Err(lines.at(
            lines.line,
            format!("header announces {} samples, file holds {}", header.count, samples.len()),
        ));
    }
    Ok(Dataset { header, samples })
}

pub fn read_ideals(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_ideals_from(BufReader::new(file), &path.display().to_string())
}

/// Reader for the externally published corpus. Its on-disk schema has not
/// been inspected, so this refuses every input for now.
pub fn import_external(path: impl AsRef<Path>) -> Result<Dataset> {
    Err(Error::InvalidArgument(format!(
        "{}: importing external dataset files is not supported yet",
        path.as_ref().display()
    )))
}

// ---------------------------------------------------------------- labels

pub fn write_labels(path: impl AsRef<Path>, labels: &[Option<GbLabel>]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "# gblearn labels v{FORMAT_VERSION}")?;
    writeln!(w, "{LABEL_COLUMNS}")?;
    for label in labels {
        match label {
            Some(l) => writeln!(w, "{},{}", l.size, l.max_degree)?,
            None => writeln!(w, "{NA},{NA}")?,
        }
    }
    finish(w)
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<Option<GbLabel>>> {
    let mut lines = open(path.as_ref())?;
    lines.magic("labels")?;
    lines.columns(LABEL_COLUMNS)?;
    let mut out = Vec::new();
    for (line_no, line) in lines.data()? {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [NA, NA] => Ok(None),
            [size, deg] => parse_field::<usize>(size, "size")
                .and_then(|size| {
                    if size == 0 {
                        Err("basis size must be positive".to_string())
                    } else {
                        Ok(size)
                    }
                })
                .and_then(|size| {
                    parse_field::<u32>(deg, "max degree").map(|max_degree| Some(GbLabel { size, max_degree }))
                }),
            _ => Err(format!("expected 2 fields, found {}", fields.len())),
        };
        out.push(parsed.map_err(|m| lines.at(line_no, m))?);
    }
    Ok(out)
}

// ------------------------------------------------------------ quarantine

pub fn write_quarantine(path: impl AsRef<Path>, rows: &[(usize, PartialStats)]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "# gblearn quarantine v{FORMAT_VERSION}")?;
    writeln!(w, "{QUARANTINE_COLUMNS}")?;
    for (row, s) in rows {
        writeln!(w, "{row},{},{},{}", s.pairs_processed, s.reductions_to_zero, s.basis_len)?;
    }
    finish(w)
}

pub fn read_quarantine(path: impl AsRef<Path>) -> Result<Vec<(usize, PartialStats)>> {
    let mut lines = open(path.as_ref())?;
    lines.magic("quarantine")?;
    lines.columns(QUARANTINE_COLUMNS)?;
    let mut out = Vec::new();
    for (line_no, line) in lines.data()? {
        let nums = line
            .split(',')
            .map(|t| parse_field::<usize>(t, "count"))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| lines.at(line_no, m))?;
        let [row, pairs_processed, reductions_to_zero, basis_len] = nums[..] else {
            return Err(lines.at(line_no, format!("expected 4 fields, found {}", nums.len())));
        };
        out.push((
            row,
            PartialStats {
                pairs_processed,
                reductions_to_zero,
                basis_len,
            },
        ));
    }
    Ok(out)
}

// -------------------------------------------------------------- features

pub fn write_features(path: impl AsRef<Path>, rows: &[Option<FeatureVector>]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "# gblearn features v{FORMAT_VERSION}")?;
    writeln!(w, "{}", FEATURE_COLUMNS.join(","))?;
    for row in rows {
        match row {
            Some(f) => writeln!(
                w,
                "{},{},{},{},{},{},{}",
                f.min_deg, f.max_deg, f.mean_deg, f.var_deg, f.num_gens, f.dim, f.degree
            )?,
            None => writeln!(w, "{}", [NA; 7].join(","))?,
        }
    }
    finish(w)
}

pub fn read_features(path: impl AsRef<Path>) -> Result<Vec<Option<FeatureVector>>> {
    let mut lines = open(path.as_ref())?;
    lines.magic("features")?;
    lines.columns(&FEATURE_COLUMNS.join(","))?;
    let mut out = Vec::new();
    for (line_no, line) in lines.data()? {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != FEATURE_COLUMNS.len() {
            return Err(lines.at(line_no, format!("expected 7 fields, found {}", f.len())));
        }
        if f.iter().all(|v| *v == NA) {
            out.push(None);
            continue;
        }
        let parsed = (|| -> std::result::Result<FeatureVector, String> {
            Ok(FeatureVector {
                min_deg: parse_field(f[0], "min_deg")?,
                max_deg: parse_field(f[1], "max_deg")?,
                mean_deg: parse_field(f[2], "mean_deg")?,
                var_deg: parse_field(f[3], "var_deg")?,
                num_gens: parse_field(f[4], "num_gens")?,
                dim: parse_field(f[5], "dim")?,
                degree: parse_field(f[6], "degree")?,
            })
        })();
        out.push(Some(parsed.map_err(|m| lines.at(line_no, m))?));
    }
    Ok(out)
}

// ----------------------------------------------------------------- split

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitSet {
    Train,
    Test,
}

/// Seeded shuffle of `0..rows`, the last `round(rows · test_fraction)` of
/// which become the test set. Both index lists come back sorted.
pub fn split_dataset(rows: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if rows == 0 {
        return Err(Error::EmptyInput("dataset to split"));
    }
    if !(0.0..=1.0).contains(&test_fraction) {
        return Err(Error::InvalidArgument(format!("test fraction {test_fraction} outside [0, 1]")));
    }
    let mut order: Vec<usize> = (0..rows).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let n_test = (rows as f64 * test_fraction).round() as usize;
    let mut test = order.split_off(rows - n_test);
    order.sort_unstable();
    test.sort_unstable();
    Ok((order, test))
}

pub fn split_assignment(rows: usize, test: &[usize]) -> Vec<SplitSet> {
    let mut sets = vec![SplitSet::Train; rows];
    for &i in test {
        sets[i] = SplitSet::Test;
    }
    sets
}

pub fn write_split(path: impl AsRef<Path>, sets: &[SplitSet]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "# gblearn split v{FORMAT_VERSION}")?;
    writeln!(w, "{SPLIT_COLUMNS}")?;
    for (i, s) in sets.iter().enumerate() {
        let name = match s {
            SplitSet::Train => "train",
            SplitSet::Test => "test",
        };
        writeln!(w, "{i},{name}")?;
    }
    finish(w)
}

pub fn read_split(path: impl AsRef<Path>) -> Result<Vec<SplitSet>> {
    let mut lines = open(path.as_ref())?;
    lines.magic("split")?;
    lines.columns(SPLIT_COLUMNS)?;
    let mut out = Vec::new();
    for (line_no, line) in lines.data()? {
        let (row, set) = line
            .split_once(',')
            .ok_or_else(|| lines.at(line_no, "expected `row,set`"))?;
        let row: usize = parse_field(row, "row").map_err(|m| lines.at(line_no, m))?;
        if row != out.len() {
            return Err(lines.at(line_no, format!("expected row {}, found {row}", out.len())));
        }
        out.push(match set.trim() {
            "train" => SplitSet::Train,
            "test" => SplitSet::Test,
            other => return Err(lines.at(line_no, format!("unknown set `{other}`"))),
        });
    }
    Ok(out)
}

// ----------------------------------------------------------------- model

/// A trained regressor with what it was trained for.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub model: TrainedModel,
    pub target: Target,
    pub input: InputKind,
    pub seed: u64,
}

fn write_tensor(w: &mut impl Write, name: &str, shape: &[usize], values: impl Iterator<Item = f64>) -> Result<()> {
    let dims: Vec<String> = shape.iter().map(usize::to_string).collect();
    writeln!(w, "tensor {name} {}", dims.join(" "))?;
    let vals: Vec<String> = values.map(|v| format!("{v:e}")).collect();
    writeln!(w, "{}", vals.join(" "))?;
    Ok(())
}

fn config_line(c: &NetworkConfig) -> String {
    let dense: Vec<String> = c.dense.iter().map(usize::to_string).collect();
    format!(
        "input_rows={} input_cols={} conv_filters={} kernel_rows={} kernel_cols={} dense={} \
         dropout_rate={} learning_rate={} batch_size={} epochs={} validation_fraction={} seed={}",
        c.input_rows,
        c.input_cols,
        c.conv_filters,
        c.kernel_rows,
        c.kernel_cols,
        dense.join(","),
        c.dropout_rate,
        c.learning_rate,
        c.batch_size,
        c.epochs,
        c.validation_fraction,
        c.seed
    )
}

fn parse_config(raw: &str) -> std::result::Result<NetworkConfig, String> {
    let mut fields = std::collections::BTreeMap::new();
    for token in raw.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| format!("config token `{token}` is not key=value"))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("config lacks `{k}`"));
    let dense = get("dense")?
        .split(',')
        .map(|d| parse_field::<usize>(d, "dense width"))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(NetworkConfig {
        input_rows: parse_field(get("input_rows")?, "input_rows")?,
        input_cols: parse_field(get("input_cols")?, "input_cols")?,
        conv_filters: parse_field(get("conv_filters")?, "conv_filters")?,
        kernel_rows: parse_field(get("kernel_rows")?, "kernel_rows")?,
        kernel_cols: parse_field(get("kernel_cols")?, "kernel_cols")?,
        dense,
        dropout_rate: parse_field(get("dropout_rate")?, "dropout_rate")?,
        learning_rate: parse_field(get("learning_rate")?, "learning_rate")?,
        batch_size: parse_field(get("batch_size")?, "batch_size")?,
        epochs: parse_field(get("epochs")?, "epochs")?,
        validation_fraction: parse_field(get("validation_fraction")?, "validation_fraction")?,
        seed: parse_field(get("seed")?, "seed")?,
    })
}

pub fn write_model(path: impl AsRef<Path>, file: &ModelFile) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "# gblearn model v{FORMAT_VERSION}")?;
    writeln!(w, "kind {}", file.model.kind())?;
    writeln!(w, "target {}", file.target)?;
    writeln!(w, "input {}", file.input)?;
    writeln!(w, "seed {}", file.seed)?;
    match &file.model {
        TrainedModel::Network(net) => {
            writeln!(w, "config {}", config_line(&net.config))?;
            let len = net.transform.offset.len();
            write_tensor(&mut w, "transform.offset", &[len], net.transform.offset.iter().copied())?;
            write_tensor(&mut w, "transform.scale", &[len], net.transform.scale.iter().copied())?;
            for (name, t) in net.config.param_names().iter().zip(&net.params) {
                write_tensor(&mut w, name, t.shape(), t.iter().copied())?;
            }
        }
        TrainedModel::Linear(m) => {
            write_tensor(&mut w, "weights", &[m.weights.len()], m.weights.iter().copied())?;
            write_tensor(&mut w, "bias", &[1], std::iter::once(m.bias))?;
        }
        TrainedModel::Mean(m) => write_tensor(&mut w, "value", &[1], std::iter::once(m.value))?,
    }
    finish(w)
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let mut lines = open(path.as_ref())?;
    lines.magic("model")?;
    let keyed = |lines: &mut Lines<_>, key: &str| -> Result<String> {
        let line = lines.expect_line(key)?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| lines.err(format!("expected `{key} ...`")))
    };
    let kind = keyed(&mut lines, "kind")?;
    let target: Target = keyed(&mut lines, "target")?.parse().map_err(|e: Error| lines.err(e.to_string()))?;
    let input: InputKind = keyed(&mut lines, "input")?.parse().map_err(|e: Error| lines.err(e.to_string()))?;
    let seed: u64 = parse_field(&keyed(&mut lines, "seed")?, "seed").map_err(|m| lines.err(m))?;
    let config = if kind == "nn" {
        let raw = keyed(&mut lines, "config")?;
        Some(parse_config(&raw).map_err(|m| lines.err(m))?)
    } else {
        None
    };

    let mut tensors: Vec<(String, ArrayD<f64>)> = Vec::new();
    while let Some(head) = lines.next_line()? {
        if head.trim().is_empty() {
            continue;
        }
        let mut parts = head.split_whitespace();
        if parts.next() != Some("tensor") {
            return Err(lines.err("expected `tensor <name> <dims...>`"));
        }
        let name = parts.next().ok_or_else(|| lines.err("tensor without a name"))?.to_string();
        let shape = parts
            .map(|d| parse_field::<usize>(d, "dimension"))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| lines.err(m))?;
        let body = lines.expect_line(&format!("values of {name}"))?;
        let values = body
            .split_whitespace()
            .map(|v| parse_field::<f64>(v, "value"))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| lines.err(m))?;
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(lines.err(format!("{name}: expected {expected} values, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(lines.err(format!("{name}: non-finite value")));
        }
        let t = ArrayD::from_shape_vec(IxDyn(&shape), values).expect("length checked");
        tensors.push((name, t));
    }
    let end = lines.line;
    let missing = |what: &str| Error::Parse {
        path: path.as_ref().display().to_string(),
        line: end,
        msg: format!("model lacks {what}"),
    };
    let take = |tensors: &mut Vec<(String, ArrayD<f64>)>, name: &str| -> Result<ArrayD<f64>> {
        let pos = tensors.iter().position(|(n, _)| n == name).ok_or_else(|| missing(name))?;
        Ok(tensors.remove(pos).1)
    };

    let model = match kind.as_str() {
        "nn" => {
            let config = config.expect("parsed above");
            config.validate()?;
            let offset = take(&mut tensors, "transform.offset")?.into_raw_vec_and_offset().0;
            let scale = take(&mut tensors, "transform.scale")?.into_raw_vec_and_offset().0;
            let mut params = Vec::new();
            for (name, shape) in config.param_names().iter().zip(config.param_shapes()) {
                let t = take(&mut tensors, name)?;
                if t.shape() != shape.as_slice() {
                    return Err(Error::Shape {
                        expected: format!("{name} {shape:?}"),
                        found: format!("{:?}", t.shape()),
                    });
                }
                params.push(t);
            }
            if offset.len() != config.input_len() || scale.len() != config.input_len() {
                return Err(Error::Shape {
                    expected: format!("{} transform entries", config.input_len()),
                    found: format!("{} offsets, {} scales", offset.len(), scale.len()),
                });
            }
            TrainedModel::Network(NeuralNet {
                config,
                params,
                transform: InputTransform { offset, scale },
            })
        }
        "linreg" => {
            let weights = take(&mut tensors, "weights")?.into_raw_vec_and_offset().0;
            let bias = take(&mut tensors, "bias")?;
            TrainedModel::Linear(LinearModel {
                weights,
                bias: bias.first().copied().ok_or_else(|| missing("bias value"))?,
            })
        }
        "mean" => {
            let value = take(&mut tensors, "value")?;
            TrainedModel::Mean(ConstantModel {
                value: value.first().copied().ok_or_else(|| missing("mean value"))?,
            })
        }
        other => return Err(missing(&format!("a known kind (found `{other}`)"))),
    };
    if let Some((name, _)) = tensors.first() {
        return Err(Error::Parse {
            path: path.as_ref().display().to_string(),
            line: end,
            msg: format!("unexpected tensor `{name}` for a {kind} model"),
        });
    }
    Ok(ModelFile {
        model,
        target,
        input,
        seed,
    })
}

// --------------------------------------------------------- curves, reports

pub fn write_curve(path: impl AsRef<Path>, curve: &TrainingCurve) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "{CURVE_COLUMNS}")?;
    for r in &curve.epochs {
        writeln!(w, "{},{},{}", r.epoch, r.train_loss, opt(&r.val_loss).replace("none", NA))?;
    }
    finish(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub input: InputKind,
    pub target: Target,
    pub report: EvalReport,
}

pub fn write_report(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<()> {
    let mut w = create(path.as_ref())?;
    writeln!(w, "{REPORT_COLUMNS}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.model,
            r.input,
            r.target,
            r.report.r_squared,
            r.report.overshoot_rate,
            r.report.accuracy,
            r.report.samples
        )?;
    }
    finish(w)
}
