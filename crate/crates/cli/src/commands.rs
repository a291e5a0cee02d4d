use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use gblearn::algebra::variable_names;
use gblearn::encoding::{canonicalize, encode_flat, euclidean_distance};
use gblearn::error::{Error, Result};
use gblearn::groebner::BuchbergerOptions;
use gblearn::io::{self, Dataset, InputKind, Layout, ModelFile, ReportRow, SplitSet};
use gblearn::labeling::{groebner_of, label_samples, with_workers, LabelOutcome, Target};
use gblearn::learning::{
    evaluate, fit_linear_regression, train_network, ConstantModel, InputTransform, NetworkConfig,
    TrainedModel,
};
use gblearn::sampler::{sample_ideals, RandomModel};

use crate::args::*;

/// Labeling progress is reported once per chunk.
const LABEL_CHUNK: usize = 1000;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Label(a) => label(a),
        Command::Features(a) => features(a),
        Command::Encode(a) => encode(a),
        Command::Split(a) => split(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Gb(a) => gb(a),
        Command::Distance(a) => distance(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let model = RandomModel::new(a.n, a.d, a.s, a.mode.into(), a.seed)?;
    let samples = with_workers(a.workers.count(), || sample_ideals(&model, a.count))?;
    io::write_ideals(&a.out, &io::DatasetHeader::for_model(&model, samples.len()), &samples)?;
    eprintln!("wrote {} ideals to {}", samples.len(), a.out.display());
    Ok(())
}

fn budget(max_pairs: Option<usize>) -> BuchbergerOptions {
    BuchbergerOptions::default().with_max_pairs(max_pairs)
}

fn label_all(data: &Dataset, opts: &BuchbergerOptions, workers: usize, with_features: bool) -> Result<Vec<LabelOutcome>> {
    let total = data.samples.len();
    with_workers(workers, || {
        let mut out = Vec::with_capacity(total);
        for chunk in data.samples.chunks(LABEL_CHUNK) {
            out.extend(label_samples(chunk, opts, with_features)?);
            if total > LABEL_CHUNK {
                eprintln!("labeled {}/{total}", out.len());
            }
        }
        Ok(out)
    })?
}

fn quarantined(outcomes: &[LabelOutcome]) -> Vec<(usize, gblearn::error::PartialStats)> {
    outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, o)| match o {
            LabelOutcome::Quarantined(stats) => Some((i, *stats)),
            LabelOutcome::Labeled { .. } => None,
        })
        .collect()
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn label(a: LabelArgs) -> Result<()> {
    let data = io::read_ideals(&a.ideals)?;
    let outcomes = label_all(&data, &budget(a.max_pairs), a.workers.count(), a.features.is_some())?;
    let labels: Vec<_> = outcomes.iter().map(LabelOutcome::label).collect();
    io::write_labels(&a.out, &labels)?;
    let q = quarantined(&outcomes);
    let q_path = a.quarantine.unwrap_or_else(|| with_suffix(&a.out, ".quarantine.csv"));
    io::write_quarantine(&q_path, &q)?;
    if let Some(path) = &a.features {
        let feats: Vec<_> = outcomes.iter().map(LabelOutcome::features).collect();
        io::write_features(path, &feats)?;
    }
    eprintln!(
        "labeled {} of {} ideals, quarantined {} (listed in {})",
        outcomes.len() - q.len(),
        outcomes.len(),
        q.len(),
        q_path.display()
    );
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    let data = io::read_ideals(&a.ideals)?;
    let outcomes = label_all(&data, &budget(a.max_pairs), a.workers.count(), true)?;
    let feats: Vec<_> = outcomes.iter().map(LabelOutcome::features).collect();
    io::write_features(&a.out, &feats)?;
    let missing = feats.iter().filter(|f| f.is_none()).count();
    eprintln!("wrote {} feature rows ({missing} over budget) to {}", feats.len(), a.out.display());
    Ok(())
}

fn encode(a: EncodeArgs) -> Result<()> {
    let mut data = io::read_ideals(&a.ideals)?;
    if a.canonical {
        data.samples = data.samples.iter().map(canonicalize).collect();
        data.header.layout = Layout::Canonical;
    }
    io::write_ideals(&a.out, &data.header, &data.samples)
}

/// The `kind` of a gblearn file from its first line.
fn sniff(path: &Path) -> Result<String> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    first
        .strip_prefix("# gblearn ")
        .and_then(|rest| rest.split_whitespace().next())
        .map(str::to_string)
        .ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: 1,
            msg: "not a gblearn file".into(),
        })
}

fn count_rows(path: &Path) -> Result<usize> {
    match sniff(path)?.as_str() {
        "ideals" => Ok(io::read_ideals(path)?.samples.len()),
        "labels" => Ok(io::read_labels(path)?.len()),
        "features" => Ok(io::read_features(path)?.len()),
        other => Err(Error::InvalidArgument(format!(
            "{}: cannot count rows of a {other} file",
            path.display()
        ))),
    }
}

fn split(a: SplitArgs) -> Result<()> {
    let rows = count_rows(&a.data)?;
    let (_, test) = io::split_dataset(rows, a.test_fraction, a.seed)?;
    io::write_split(&a.out, &io::split_assignment(rows, &test))?;
    eprintln!("split {rows} rows: {} train, {} test", rows - test.len(), test.len());
    Ok(())
}

/// Model inputs as a dense matrix; rows without values are marked invalid.
struct Inputs {
    kind: InputKind,
    matrix: Array2<f64>,
    valid: Vec<bool>,
    /// Matrix view of one row, as fed to the network.
    shape: (usize, usize),
    degree: Option<u32>,
}

fn load_inputs(path: &Path) -> Result<Inputs> {
    match sniff(path)?.as_str() {
        "ideals" => {
            let data = io::read_ideals(path)?;
            let width = data.header.row_len();
            let mut matrix = Array2::zeros((data.samples.len(), width));
            for (mut row, s) in matrix.rows_mut().into_iter().zip(&data.samples) {
                for (dst, v) in row.iter_mut().zip(encode_flat(s, false).values) {
                    *dst = f64::from(v);
                }
            }
            Ok(Inputs {
                kind: InputKind::Encodings,
                valid: vec![true; data.samples.len()],
                matrix,
                shape: (data.header.gens, 2 * data.header.nvars),
                degree: data.header.degree,
            })
        }
        "features" => {
            let rows = io::read_features(path)?;
            let mut matrix = Array2::zeros((rows.len(), 7));
            for (mut row, f) in matrix.rows_mut().into_iter().zip(&rows) {
                if let Some(f) = f {
                    row.assign(&ndarray::Array1::from(f.to_vec()));
                }
            }
            Ok(Inputs {
                kind: InputKind::Features,
                valid: rows.iter().map(Option::is_some).collect(),
                matrix,
                shape: (1, 7),
                degree: None,
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "{}: expected an ideals or features file, found a {other} file",
            path.display()
        ))),
    }
}

/// Rows of `set` that have both inputs and a label.
fn select(data: &DataArgs, set: SetArg, target: Target) -> Result<(Inputs, Array2<f64>, Vec<f64>)> {
    let inputs = load_inputs(&data.input)?;
    let labels = io::read_labels(&data.labels)?;
    let split = io::read_split(&data.split)?;
    let rows = inputs.matrix.nrows();
    if labels.len() != rows || split.len() != rows {
        return Err(Error::Shape {
            expected: format!("{rows} rows in labels and split"),
            found: format!("{} labels, {} split rows", labels.len(), split.len()),
        });
    }
    let keep: Vec<usize> = (0..rows)
        .filter(|&i| {
            let in_set = match set {
                SetArg::Train => split[i] == SplitSet::Train,
                SetArg::Test => split[i] == SplitSet::Test,
                SetArg::All => true,
            };
            in_set && inputs.valid[i] && labels[i].is_some()
        })
        .collect();
    let x = inputs.matrix.select(ndarray::Axis(0), &keep);
    let y = keep.iter().map(|&i| target.of(labels[i].unwrap())).collect();
    Ok((inputs, x, y))
}

fn train(a: TrainArgs) -> Result<()> {
    let target: Target = a.target.into();
    let (inputs, x, y) = select(&a.data, SetArg::Train, target)?;
    let model = match a.model {
        ModelArg::Mean => TrainedModel::Mean(ConstantModel::mean_of(&y)?),
        ModelArg::Linreg => TrainedModel::Linear(fit_linear_regression(x.view(), &y)?),
        ModelArg::Nn => {
            let (rows, cols) = inputs.shape;
            let config = NetworkConfig {
                conv_filters: a.filters,
                dense: a.dense.clone(),
                dropout_rate: a.dropout,
                learning_rate: a.learning_rate,
                batch_size: a.batch_size,
                epochs: a.epochs,
                validation_fraction: a.validation_fraction,
                seed: a.seed,
                ..NetworkConfig::new(rows, cols)
            };
            let transform = if a.no_normalize {
                InputTransform::identity(rows * cols)
            } else {
                match inputs.kind {
                    InputKind::Encodings => {
                        // scale exponents into [0, 1] by the model degree
                        let d = inputs
                            .degree
                            .map(f64::from)
                            .unwrap_or_else(|| x.iter().copied().fold(1.0, f64::max));
                        InputTransform::uniform_scale(rows * cols, 1.0 / d)
                    }
                    InputKind::Features => InputTransform::standardize(x.view()),
                }
            };
            let quiet = a.quiet;
            let epochs = config.epochs;
            let (net, curve) = train_network(&config, x.view(), &y, Some(transform), |r| {
                if !quiet {
                    let val = r.val_loss.map_or_else(|| "NA".to_string(), |v| format!("{v:.5}"));
                    eprintln!("epoch {}/{epochs} train_loss={:.5} val_loss={val}", r.epoch, r.train_loss);
                }
            })?;
            if let Some(path) = &a.curve {
                io::write_curve(path, &curve)?;
            }
            TrainedModel::Network(net)
        }
    };
    let kind = model.kind();
    io::write_model(
        &a.out,
        &ModelFile {
            model,
            target,
            input: inputs.kind,
            seed: a.seed,
        },
    )?;
    eprintln!("trained {kind} on {} rows; model written to {}", y.len(), a.out.display());
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let file = io::read_model(&a.model)?;
    let (inputs, x, y) = select(&a.data, a.set, file.target)?;
    if inputs.kind != file.input {
        return Err(Error::Shape {
            expected: format!("{} input", file.input),
            found: format!("{} input", inputs.kind),
        });
    }
    let report = evaluate(&file.model, x.view(), &y)?;
    println!(
        "model={} input={} target={} r_squared={:.6} overshoot_rate={:.6} accuracy={:.6} samples={}",
        file.model.kind(),
        file.input,
        file.target,
        report.r_squared,
        report.overshoot_rate,
        report.accuracy,
        report.samples
    );
    if let Some(path) = &a.report {
        let row = ReportRow {
            model: file.model.kind().to_string(),
            input: file.input,
            target: file.target,
            report,
        };
        io::write_report(path, &[row])?;
    }
    Ok(())
}

fn pick(data: &Dataset, row: usize) -> Result<&gblearn::sampler::IdealSample> {
    data.samples.get(row).ok_or_else(|| {
        Error::InvalidArgument(format!("row {row} out of range ({} ideals)", data.samples.len()))
    })
}

fn gb(a: GbArgs) -> Result<()> {
    let data = io::read_ideals(&a.ideals)?;
    let sample = pick(&data, a.row)?;
    let result = groebner_of(sample, &budget(a.max_pairs))?;
    let names = variable_names(sample.nvars);
    for g in &result.basis {
        println!("{}", g.display_with(&names));
    }
    println!(
        "# size={} max_degree={}",
        result.cardinality, result.max_total_degree
    );
    Ok(())
}

fn distance(a: DistanceArgs) -> Result<()> {
    let data = io::read_ideals(&a.ideals)?;
    let u = encode_flat(pick(&data, a.i)?, false);
    let v = encode_flat(pick(&data, a.j)?, false);
    println!("{}", euclidean_distance(&u.values, &v.values)?);
    Ok(())
}
