//! JSON run configs and flag merging. Precedence, lowest to highest:
//! built-in defaults, preset, config file, explicit flags.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use phasesplit::CaseLabel;
use serde::{Deserialize, Serialize};

use crate::{usage, AppError, CaseArg, PresetArg, SweepArgs, VarArg};

pub const DEFAULT_STEPS: usize = 20_000;
pub const DEFAULT_TRIALS: usize = 64;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub error_table: ErrorTableSection,
    #[serde(default)]
    pub validate: ValidateSection,
    #[serde(default)]
    pub exact: ExactSection,
    #[serde(default)]
    pub propagate: PropagateSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub var: Option<SweepVar>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub case: Option<String>,
    pub phi: Option<f64>,
    pub area: Option<f64>,
    pub depth: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorTableSection {
    pub epsilons: Option<Vec<f64>>,
    pub depths: Option<Vec<u32>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub trials: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    pub area: Option<f64>,
    pub phi: Option<f64>,
    pub depth: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagateSection {
    pub area: Option<f64>,
    pub pulse: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, AppError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    Area,
    Phase,
    Depth,
}

impl From<VarArg> for SweepVar {
    fn from(value: VarArg) -> SweepVar {
        match value {
            VarArg::Area => SweepVar::Area,
            VarArg::Phase => SweepVar::Phase,
            VarArg::Depth => SweepVar::Depth,
        }
    }
}

pub fn case_label(arg: CaseArg) -> CaseLabel {
    match arg {
        CaseArg::A => CaseLabel::Identical,
        CaseArg::B => CaseLabel::Bichromatic,
        CaseArg::C => CaseLabel::TimeReflected,
        CaseArg::D => CaseLabel::TimeReflectedBichromatic,
    }
}

fn case_from_text(text: &str) -> Result<CaseLabel, AppError> {
    match text {
        "a" => Ok(CaseLabel::Identical),
        "b" => Ok(CaseLabel::Bichromatic),
        "c" => Ok(CaseLabel::TimeReflected),
        "d" => Ok(CaseLabel::TimeReflectedBichromatic),
        other => Err(usage(format!("unknown case {other:?}; expected a, b, c or d"))),
    }
}

/// Effective sweep settings after merging; serialized canonically for the
/// provenance hash.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub command: &'static str,
    pub variable: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub case: CaseLabel,
    pub phi: f64,
    pub area: Option<f64>,
    pub depth: u32,
    pub steps: usize,
    pub seed: u64,
}

struct PresetValues {
    var: SweepVar,
    from: f64,
    to: f64,
    points: usize,
    case: CaseLabel,
    phi: f64,
    area: Option<f64>,
    depth: u32,
}

fn preset_values(preset: PresetArg) -> PresetValues {
    match preset {
        PresetArg::FigAreaScan => PresetValues {
            var: SweepVar::Area,
            from: 0.0,
            to: 6.0 * std::f64::consts::PI,
            points: 600,
            case: CaseLabel::TimeReflectedBichromatic,
            phi: FRAC_PI_2,
            area: None,
            depth: 1,
        },
        PresetArg::FigDepthScan => PresetValues {
            var: SweepVar::Depth,
            from: 0.0,
            to: 3.0,
            points: 4,
            case: CaseLabel::TimeReflectedBichromatic,
            phi: FRAC_PI_2,
            area: Some(2.0),
            depth: 0,
        },
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, preset: Option<T>) -> Option<T> {
    flag.or(file).or(preset)
}

pub fn resolve_sweep(args: &SweepArgs, file: &FileConfig) -> Result<SweepSpec, AppError> {
    let preset = args.preset.map(preset_values);
    let as_ref = preset.as_ref();

    let variable = pick(
        args.var.map(SweepVar::from),
        file.sweep.var,
        as_ref.map(|p| p.var),
    )
    .ok_or_else(|| usage("missing --var (area, phase or depth)"))?;
    let file_case = file.sweep.case.as_deref().map(case_from_text).transpose()?;
    let case = pick(args.case.map(case_label), file_case, as_ref.map(|p| p.case))
        .unwrap_or(CaseLabel::TimeReflectedBichromatic);
    let phi = pick(args.phi, file.sweep.phi, as_ref.map(|p| p.phi)).unwrap_or(FRAC_PI_2);
    let area = pick(args.area, file.sweep.area, as_ref.and_then(|p| p.area));
    let depth = pick(args.depth, file.sweep.depth, as_ref.map(|p| p.depth)).unwrap_or(1);
    let points = pick(args.points, file.sweep.points, as_ref.map(|p| p.points)).unwrap_or(200);
    let (default_from, default_to) = match variable {
        SweepVar::Area => (0.0, 6.0 * std::f64::consts::PI),
        SweepVar::Phase => (0.0, 2.0 * std::f64::consts::PI),
        SweepVar::Depth => (0.0, 3.0),
    };
    let from = pick(args.from, file.sweep.from, as_ref.map(|p| p.from)).unwrap_or(default_from);
    let to = pick(args.to, file.sweep.to, as_ref.map(|p| p.to)).unwrap_or(default_to);
    let steps = pick(args.common.steps, file.steps, None).unwrap_or(DEFAULT_STEPS);
    let seed = pick(args.common.seed, file.seed, None).unwrap_or(0);

    let spec = SweepSpec {
        command: "sweep",
        variable,
        from,
        to,
        points,
        case,
        phi,
        area,
        depth,
        steps,
        seed,
    };
    validate_sweep(&spec)?;
    Ok(spec)
}

fn validate_sweep(spec: &SweepSpec) -> Result<(), AppError> {
    if !(spec.from.is_finite() && spec.to.is_finite() && spec.phi.is_finite()) {
        return Err(usage("sweep range and phi must be finite"));
    }
    match spec.variable {
        SweepVar::Area | SweepVar::Phase => {
            if spec.points < 2 {
                return Err(usage("--points must be at least 2"));
            }
            if spec.from >= spec.to {
                return Err(usage("--from must be below --to"));
            }
        }
        SweepVar::Depth => {
            if spec.from < 0.0 || spec.to < spec.from {
                return Err(usage("depth sweeps need 0 <= from <= to"));
            }
            if spec.to > 12.0 {
                return Err(usage("depth sweeps above n = 12 (4096 pulses) are not supported"));
            }
        }
    }
    if spec.variable == SweepVar::Area && spec.from < 0.0 {
        return Err(usage("pulse areas are non-negative"));
    }
    match spec.variable {
        SweepVar::Area => {}
        _ => {
            let area = spec
                .area
                .ok_or_else(|| usage("this sweep needs a fixed --area"))?;
            if !(area.is_finite() && area > 0.0) {
                return Err(usage("--area must be a positive finite number"));
            }
        }
    }
    let max_depth = match spec.variable {
        SweepVar::Depth => spec.to.floor() as u32,
        _ => spec.depth,
    };
    if max_depth >= 2 && spec.case != CaseLabel::TimeReflectedBichromatic {
        return Err(usage(
            "depths of 2 and above require case d (the construction needs its mirror symmetry)",
        ));
    }
    Ok(())
}

/// Effective error-table settings.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorTableSpec {
    pub command: &'static str,
    pub epsilons: Vec<f64>,
    pub depths: Vec<u32>,
    pub seed: u64,
}

pub fn resolve_error_table(
    epsilons: Option<&[f64]>,
    depths: Option<&[u32]>,
    seed: Option<u64>,
    file: &FileConfig,
) -> Result<ErrorTableSpec, AppError> {
    let epsilons = epsilons
        .map(<[f64]>::to_vec)
        .or_else(|| file.error_table.epsilons.clone())
        .unwrap_or_else(|| vec![0.05, 0.01]);
    let depths = depths
        .map(<[u32]>::to_vec)
        .or_else(|| file.error_table.depths.clone())
        .unwrap_or_else(|| vec![2, 4, 8]);
    for &eps in &epsilons {
        if !(eps.is_finite() && eps > 0.0 && eps < 0.5) {
            return Err(usage(format!("epsilon {eps} is outside (0, 0.5)")));
        }
    }
    for &n in &depths {
        if n == 0 || !n.is_power_of_two() {
            return Err(usage(format!("sequence length {n} is not a power of two")));
        }
    }
    Ok(ErrorTableSpec {
        command: "error-table",
        epsilons,
        depths,
        seed: seed.or(file.seed).unwrap_or(0),
    })
}
