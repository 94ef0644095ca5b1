use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use closed_curves::classify::{classify_parallel, Exemplar, DEFAULT_REJECT_THRESHOLD};
use closed_curves::features::{feature_names, AngleUnit, FeatureConfig, FEATURE_COUNT};
use closed_curves::heatmap::{render_heatmap, HeatmapSpec};
use closed_curves::mnist::{labeled_digits, parse_idx_images, parse_idx_labels, BinaryMask, ThresholdRule};
use closed_curves::pipeline::{compare_features, curve_features, PipelineConfig};
use closed_curves::potential::{FeatureWeights, PotentialTorus};
use closed_curves::search::{Method, SearchConfig, TieRule, TorusPath};

mod failure;
mod source;

use failure::{Failure, ResultExt};
use source::{load_patterns, SourceSpec};

const DEFAULT_IMAGES: &str = "data/mnist/t10k-images-idx3-ubyte";
const DEFAULT_LABELS: &str = "data/mnist/t10k-labels-idx1-ubyte";

/// Similarity of closed discrete curves traced from binary masks.
#[derive(Parser)]
#[command(name = "closed-curves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the outer borderline of a curve source as `w,h` rows.
    Trace {
        source: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the 60x45 feature matrix as CSV.
    Features {
        source: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the potential torus of two curves, one line per row `i`.
    Potential {
        x: String,
        y: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare two curves and print the canonical path as JSON.
    Match {
        x: String,
        y: String,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Score digits against a pattern set and print a CSV report.
    Classify {
        #[arg(long, default_value = DEFAULT_IMAGES)]
        images: PathBuf,
        #[arg(long, default_value = DEFAULT_LABELS)]
        labels: PathBuf,
        /// Directory holding `0.pattern` .. `9.pattern`; built-in set if absent.
        #[arg(long)]
        patterns: Option<PathBuf>,
        /// Number of leading digits to process.
        #[arg(long)]
        limit: Option<usize>,
        /// Best mean potential above which a digit is rejected.
        #[arg(long, default_value_t = DEFAULT_REJECT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        mask: MaskArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Draw a potential heatmap with the canonical path as binary PPM.
    Render {
        /// Two curve sources; omit when `--potential` is given.
        #[arg(num_args = 0..=2)]
        sources: Vec<String>,
        /// Potential CSV as printed by `potential`.
        #[arg(long, conflicts_with = "sources")]
        potential: Option<PathBuf>,
        /// Path JSON as printed by `match` (a bare path object also works).
        #[arg(long, requires = "potential")]
        path: Option<PathBuf>,
        /// Cell edge in pixels.
        #[arg(long, default_value_t = 6)]
        cell: usize,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct MaskArgs {
    /// Gray level a pixel must exceed to count as inside.
    #[arg(long, default_value_t = 80)]
    gray_limit: u8,
    /// Count pixels equal to the limit as inside too.
    #[arg(long)]
    inclusive: bool,
}

impl MaskArgs {
    fn rule(&self) -> ThresholdRule {
        if self.inclusive {
            ThresholdRule::GreaterOrEqual
        } else {
            ThresholdRule::Greater
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// IDX image file used by `mnist:INDEX` sources.
    #[arg(long, default_value = DEFAULT_IMAGES)]
    images: PathBuf,
    #[command(flatten)]
    mask: MaskArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Degrees,
    Radians,
}

#[derive(Args)]
struct CurveArgs {
    /// Unit of the angle features.
    #[arg(long, value_enum, default_value = "degrees")]
    angle_unit: UnitArg,
    /// Feature weights: `ANGLE,OTHER` or 45 comma-separated values.
    #[arg(long, default_value = "3,1")]
    weights: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Base,
    Multistart,
    Lookahead,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Random,
    Deterministic,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "base")]
    method: MethodArg,
    /// Lookahead depth.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Matrix row whose cells seed the multistart walks.
    #[arg(long, default_value_t = 0)]
    start_row: usize,
    #[arg(long, value_enum, default_value = "random")]
    tie: TieArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CurveArgs {
    fn config(&self, search: SearchConfig) -> Result<PipelineConfig, Failure> {
        let weights = FeatureWeights::parse(&self.weights).parse_err("--weights")?;
        let angle_unit = match self.angle_unit {
            UnitArg::Degrees => AngleUnit::Degrees,
            UnitArg::Radians => AngleUnit::Radians,
        };
        Ok(PipelineConfig {
            features: FeatureConfig {
                angle_unit,
                ..FeatureConfig::default()
            },
            weights,
            search,
            ..PipelineConfig::default()
        })
    }
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        let method = match self.method {
            MethodArg::Base => Method::Base,
            MethodArg::Multistart => Method::MultiStart { row: self.start_row },
            MethodArg::Lookahead => Method::Lookahead { n: self.n },
        };
        let tie_rule = match self.tie {
            TieArg::Random => TieRule::Random { seed: self.seed },
            TieArg::Deterministic => TieRule::Deterministic,
        };
        SearchConfig {
            method,
            tie_rule,
            ..SearchConfig::default()
        }
    }
}

impl OutputArgs {
    fn emit(&self, bytes: &[u8]) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, bytes).io_err(path),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes).and_then(|_| stdout.flush()).io_err("stdout")
            }
        }
    }
}

fn resolve(source: &str, input: &InputArgs) -> Result<BinaryMask, Failure> {
    SourceSpec::parse(source).load(&input.images, input.mask.gray_limit, input.mask.rule())
}

fn csv_rows<'a>(rows: impl Iterator<Item = &'a [f64]>) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn potential_csv(v: &PotentialTorus) -> String {
    csv_rows(v.values.chunks(v.cols))
}

fn parse_potential_csv(text: &str, origin: &Path) -> Result<PotentialTorus, Failure> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|field| field.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .parse_err(format!("{}: line {}", origin.display(), k + 1))?;
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Failure::parse(format!(
            "{}: expected a non-empty rectangular table",
            origin.display()
        )));
    }
    Ok(PotentialTorus::new(rows.len(), cols, rows.concat()))
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum PathDocument {
    Match { path: TorusPath },
    Bare(TorusPath),
}

fn parse_path_json(text: &str, origin: &Path, v: &PotentialTorus) -> Result<TorusPath, Failure> {
    let doc: PathDocument = serde_json::from_str(text).parse_err(origin.display())?;
    let path = match doc {
        PathDocument::Match { path } | PathDocument::Bare(path) => path,
    };
    if path.cells.iter().any(|&(i, j)| i >= v.rows || j >= v.cols) {
        return Err(Failure::parse(format!(
            "{}: path leaves the {}x{} torus",
            origin.display(),
            v.rows,
            v.cols
        )));
    }
    Ok(path)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Trace { source, input, output } => {
            let mask = resolve(&source, &input)?;
            let curve = closed_curves::border::outer_borderline(&mask).stage_err(&source)?;
            let mut out = String::from("w,h\n");
            for p in &curve.points {
                out.push_str(&format!("{},{}\n", p.w, p.h));
            }
            output.emit(out.as_bytes())
        }
        Command::Features {
            source,
            input,
            curve,
            output,
        } => {
            let config = curve.config(SearchConfig::default())?;
            let mask = resolve(&source, &input)?;
            let prepared = curve_features(&mask, &config).stage_err(&source)?;
            let mut out = feature_names().join(",");
            out.push('\n');
            out.push_str(&csv_rows(prepared.features.values.chunks(FEATURE_COUNT)));
            output.emit(out.as_bytes())
        }
        Command::Potential {
            x,
            y,
            input,
            curve,
            output,
        } => {
            let config = curve.config(SearchConfig::default())?;
            let v = potential_of(&x, &y, &input, &config)?;
            output.emit(potential_csv(&v).as_bytes())
        }
        Command::Match {
            x,
            y,
            input,
            curve,
            search,
            output,
        } => {
            let config = curve.config(search.config())?;
            let (_, result) = compare_sources(&x, &y, &input, &config)?;
            let mut json = serde_json::to_string_pretty(&result).expect("match result serializes");
            json.push('\n');
            output.emit(json.as_bytes())
        }
        Command::Classify {
            images,
            labels,
            patterns,
            limit,
            threshold,
            jobs,
            mask,
            curve,
            search,
            output,
        } => {
            let config = curve.config(search.config())?;
            let images = parse_idx_images(&std::fs::read(&images).io_err(&images)?).parse_err(images.display())?;
            let labels = parse_idx_labels(&std::fs::read(&labels).io_err(&labels)?).parse_err(labels.display())?;
            if images.len() != labels.len() {
                return Err(Failure::parse(format!(
                    "{} images but {} labels",
                    images.len(),
                    labels.len()
                )));
            }
            let take = limit.unwrap_or(images.len()).min(images.len());
            let digits = labeled_digits(images.into_iter().take(take).collect(), &labels[..take]);
            let exemplars: Vec<Exemplar> = digits
                .iter()
                .map(|d| Exemplar::from_digit(d, mask.gray_limit, mask.rule()))
                .collect();
            let pattern_masks = load_patterns(patterns.as_deref())?;
            let report = classify_parallel(&exemplars, &pattern_masks, &config, threshold, jobs)
                .map_err(|e| Failure::stage(e.to_string()))?;
            for row in report.rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("digit {}: {}", row.index, row.error.as_deref().unwrap_or_default());
            }
            output.emit(report.to_csv().as_bytes())
        }
        Command::Render {
            sources,
            potential,
            path,
            cell,
            input,
            curve,
            search,
            output,
        } => {
            let spec = HeatmapSpec {
                cell,
                ..HeatmapSpec::default()
            };
            let (v, overlay) = match potential {
                Some(file) => {
                    let v = parse_potential_csv(&std::fs::read_to_string(&file).io_err(&file)?, &file)?;
                    let overlay = match path {
                        Some(p) => Some(parse_path_json(&std::fs::read_to_string(&p).io_err(&p)?, &p, &v)?),
                        None => None,
                    };
                    (v, overlay)
                }
                None => {
                    let [x, y] = <[String; 2]>::try_from(sources)
                        .map_err(|_| Failure::usage("render needs two curve sources or --potential"))?;
                    let config = curve.config(search.config())?;
                    let (v, result) = compare_sources(&x, &y, &input, &config)?;
                    (v, Some(result.path))
                }
            };
            output.emit(&render_heatmap(&v, overlay.as_ref(), &spec))
        }
    }
}

fn potential_of(x: &str, y: &str, input: &InputArgs, config: &PipelineConfig) -> Result<PotentialTorus, Failure> {
    let fx = curve_features(&resolve(x, input)?, config).stage_err(x)?;
    let fy = curve_features(&resolve(y, input)?, config).stage_err(y)?;
    Ok(closed_curves::potential::build_potential(
        &fx.features,
        &fy.features,
        &config.weights,
    ))
}

fn compare_sources(
    x: &str,
    y: &str,
    input: &InputArgs,
    config: &PipelineConfig,
) -> Result<(PotentialTorus, closed_curves::search::MatchResult), Failure> {
    let fx = curve_features(&resolve(x, input)?, config).stage_err(x)?;
    let fy = curve_features(&resolve(y, input)?, config).stage_err(y)?;
    compare_features(&fx.features, &fy.features, &config.weights, &config.search).stage_err("search")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
