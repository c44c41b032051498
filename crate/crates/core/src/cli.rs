//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! invalid model files, models outside a stage's preconditions), 2 on
//! numeric failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::classify::classify_with;
use crate::continuation::{ContinuationConfig, DEFAULT_TAIL_TOLERANCE};
use crate::curve::{CurveAnalytics, CurveConfig, DEFAULT_PRECISION_BITS};
use crate::group::{group_report_for, GroupConfig, DEFAULT_MAX_DENOMINATOR, DEFAULT_TOLERANCE};
use crate::kernel::{degeneracy_test, genus_classify, HalfPlaneClass};
use crate::model::{parse_model, WeightedModel};
use crate::par::Execution;
use crate::report::{
    ConfigSnapshot, ContinuationSection, CurveSection, KernelSection, ReportDocument, SeriesSection, StageError,
};

pub const PRECISION_ENV: &str = "KERNELWALK_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

/// Points sampled for the uniformization residual summary.
pub const CURVE_SAMPLES: usize = 100;
pub const DEFAULT_MAX_STEPS: usize = 10;
pub const DEFAULT_CONTINUATION_SAMPLES: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "kernelwalk",
    version,
    about = "Analyze weighted small-step quarter-plane walks"
)]
struct Cli {
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every sampling-based check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run all batches on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact walk counts q(i,j,k) for k <= K.
    Series {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Check the kernel functional equation modulo t^(N+1).
        #[arg(long, value_name = "N")]
        check_feq: Option<usize>,
    },
    /// Kernel polynomial, discriminants, degeneracy and genus.
    Kernel { file: PathBuf },
    /// Branch points, periods, lattice and uniformization residuals.
    Curve {
        file: PathBuf,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Finiteness of the group of the walk.
    Group {
        file: PathBuf,
        #[command(flatten)]
        precision: PrecisionArg,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Meromorphic continuation residuals on seeded overlap points.
    Continue {
        file: PathBuf,
        #[command(flatten)]
        precision: PrecisionArg,
        #[command(flatten)]
        cont: ContinueArgs,
    },
    /// Differential nature of the generating function.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        precision: PrecisionArg,
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Full pipeline.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, value_name = "N")]
        check_feq: Option<usize>,
        #[command(flatten)]
        precision: PrecisionArg,
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cont: ContinueArgs,
    },
}

#[derive(Debug, Args)]
struct PrecisionArg {
    /// Bits of the certified branch point brackets (default from
    /// KERNELWALK_PRECISION, else 64).
    #[arg(long, value_name = "BITS")]
    precision: Option<u32>,
}

#[derive(Debug, Args)]
struct GroupArgs {
    /// Largest denominator tried when reconstructing omega3/omega2.
    #[arg(long, value_name = "L", default_value_t = DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u64,
}

#[derive(Debug, Args)]
struct ContinueArgs {
    #[arg(long, value_name = "N", default_value_t = DEFAULT_CONTINUATION_SAMPLES)]
    samples: usize,
    /// Series truncation (default: smallest N >= 40 meeting the tail tolerance).
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Self {
        Self {
            code: if e.is_precondition() { EXIT_INPUT } else { EXIT_NUMERIC },
            message: e.to_string(),
        }
    }
}

fn stage<T, E: Into<StageError>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e.into()))
}

/// Runs the CLI on `args` (program name first), printing to stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(PRECISION_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, env.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], with the precision environment value and output streams
/// supplied explicitly.
pub fn run_with<I, T>(args: I, env_precision: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = stream.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, env_precision) {
        Ok(doc) => {
            let text = if cli.json { doc.to_json() + "\n" } else { doc.to_text() };
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "kernelwalk: {}", f.message);
            f.code
        }
    }
}

fn load_model(path: &Path) -> Result<WeightedModel, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure::input(format!("model: {}: {e}", path.display())))
}

fn precision_bits(arg: &PrecisionArg, env: Option<&str>) -> Result<u32, Failure> {
    if let Some(bits) = arg.precision {
        return Ok(bits);
    }
    match env {
        None => Ok(DEFAULT_PRECISION_BITS),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{PRECISION_ENV}={v:?} is not a bit count"))),
    }
}

/// Whether the curve-based stages apply: nondegenerate with no half-plane
/// containing the steps. Returns the reason otherwise.
fn curve_precondition(model: &WeightedModel) -> Option<String> {
    if degeneracy_test(model).degenerate {
        return Some("model is degenerate; curve, group and continuation stages skipped".into());
    }
    let genus = genus_classify(model.step_set());
    if genus.class != HalfPlaneClass::Elliptic {
        return Some("kernel curve has genus zero; curve, group and continuation stages skipped".into());
    }
    None
}

struct Settings {
    seed: u64,
    exec: Execution,
    curve: CurveConfig,
    group: GroupConfig,
}

impl Settings {
    fn new(
        cli: &Cli,
        precision: Option<&PrecisionArg>,
        group: Option<&GroupArgs>,
        env: Option<&str>,
    ) -> Result<Self, Failure> {
        let bits = match precision {
            Some(p) => precision_bits(p, env)?,
            None => DEFAULT_PRECISION_BITS,
        };
        let curve = CurveConfig::with_precision(bits);
        let exec = if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        let group = GroupConfig {
            max_denominator: group.map_or(DEFAULT_MAX_DENOMINATOR, |g| g.max_denominator),
            tolerance: DEFAULT_TOLERANCE,
            seed: cli.seed,
            curve,
            exec,
            ..GroupConfig::default()
        };
        Ok(Self {
            seed: cli.seed,
            exec,
            curve,
            group,
        })
    }

    fn snapshot(&self) -> ConfigSnapshot {
        ConfigSnapshot {
            seed: self.seed,
            precision_bits: self.curve.precision_bits,
            max_denominator: self.group.max_denominator,
            tolerance: self.group.tolerance,
            ..ConfigSnapshot::default()
        }
    }

    fn continuation(&self, model: &WeightedModel, args: &ContinueArgs) -> ContinuationConfig {
        let truncation = args
            .truncation
            .unwrap_or_else(|| ContinuationConfig::auto_truncation(model.t_f64(), DEFAULT_TAIL_TOLERANCE));
        ContinuationConfig {
            truncation,
            ..ContinuationConfig::default()
        }
    }
}

fn execute(cli: &Cli, env: Option<&str>) -> Result<ReportDocument, Failure> {
    match &cli.command {
        Command::Series {
            file,
            max_steps,
            check_feq,
        } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, None, None, env)?;
            let config = ConfigSnapshot {
                max_steps: Some(*max_steps),
                check_feq: *check_feq,
                ..s.snapshot()
            };
            let mut doc = ReportDocument::new("series", config, &model);
            doc.series = Some(SeriesSection::new(&model, *max_steps, *check_feq, s.exec));
            Ok(doc)
        }
        Command::Kernel { file } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, None, None, env)?;
            let mut doc = ReportDocument::new("kernel", s.snapshot(), &model);
            doc.kernel = Some(KernelSection::new(&model));
            Ok(doc)
        }
        Command::Curve { file, precision } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, Some(precision), None, env)?;
            let config = ConfigSnapshot {
                samples: CURVE_SAMPLES,
                ..s.snapshot()
            };
            let mut doc = ReportDocument::new("curve", config, &model);
            let curve = stage(CurveAnalytics::new(&model, &s.curve))?;
            doc.curve = Some(stage(CurveSection::new(&curve, CURVE_SAMPLES, s.seed, s.exec))?);
            Ok(doc)
        }
        Command::Group { file, precision, group } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, Some(precision), Some(group), env)?;
            let mut doc = ReportDocument::new("group", s.snapshot(), &model);
            let curve = stage(CurveAnalytics::new(&model, &s.curve))?;
            doc.group = Some(stage(group_report_for(&curve, &s.group))?);
            Ok(doc)
        }
        Command::Continue { file, precision, cont } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, Some(precision), None, env)?;
            let cc = s.continuation(&model, cont);
            let config = ConfigSnapshot {
                samples: cont.samples,
                truncation: Some(cc.truncation),
                ..s.snapshot()
            };
            let mut doc = ReportDocument::new("continue", config, &model);
            let curve = stage(CurveAnalytics::new(&model, &s.curve))?;
            doc.continuation = Some(stage(ContinuationSection::new(
                &curve,
                cc,
                cont.samples,
                s.seed,
                s.exec,
            ))?);
            Ok(doc)
        }
        Command::Classify { file, precision, group } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, Some(precision), Some(group), env)?;
            let mut doc = ReportDocument::new("classify", s.snapshot(), &model);
            doc.classification = Some(stage(classify_with(&model, &s.group))?);
            Ok(doc)
        }
        Command::Analyze {
            file,
            max_steps,
            check_feq,
            precision,
            group,
            cont,
        } => {
            let model = load_model(file)?;
            let s = Settings::new(cli, Some(precision), Some(group), env)?;
            let cc = s.continuation(&model, cont);
            let check_feq = Some(check_feq.unwrap_or(*max_steps));
            let config = ConfigSnapshot {
                max_steps: Some(*max_steps),
                check_feq,
                samples: cont.samples,
                truncation: Some(cc.truncation),
                ..s.snapshot()
            };
            let mut doc = ReportDocument::new("analyze", config, &model);
            doc.series = Some(SeriesSection::new(&model, *max_steps, check_feq, s.exec));
            doc.kernel = Some(KernelSection::new(&model));
            match curve_precondition(&model) {
                Some(reason) => doc.notes.push(reason),
                None => {
                    let curve = stage(CurveAnalytics::new(&model, &s.curve))?;
                    doc.curve = Some(stage(CurveSection::new(&curve, CURVE_SAMPLES, s.seed, s.exec))?);
                    doc.group = Some(stage(group_report_for(&curve, &s.group))?);
                    doc.continuation = Some(stage(ContinuationSection::new(
                        &curve,
                        cc,
                        cont.samples,
                        s.seed,
                        s.exec,
                    ))?);
                }
            }
            doc.classification = Some(stage(classify_with(&model, &s.group))?);
            Ok(doc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str], env: Option<&str>) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("kernelwalk").chain(args.iter().copied());
        let code = run_with(argv, env, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_flag_is_an_input_error() {
        let (code, _, err) = run_capture(&["kernel", "x.walk", "--bogus"], None);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn unreadable_file_is_an_input_error() {
        let (code, _, err) = run_capture(&["kernel", "/nonexistent/model.walk"], None);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn bad_precision_env_is_an_input_error() {
        let dir = std::env::temp_dir().join("kernelwalk-cli-env-test.walk");
        std::fs::write(&dir, "d 1 0 = 1/4\nd -1 0 = 1/4\nd 0 1 = 1/4\nd 0 -1 = 1/4\nt = 1/2\n").unwrap();
        let path = dir.to_str().unwrap();
        let (code, _, err) = run_capture(&["curve", path], Some("lots"));
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains(PRECISION_ENV));
        let (code, out, _) = run_capture(&["curve", path], Some("48"));
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("a1 = "));
    }
}
