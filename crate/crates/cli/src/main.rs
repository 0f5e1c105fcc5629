//! Command-line front end: phase-diagram grids, consistency reports,
//! factor classifications and zero-temperature tables, emitted as
//! deterministic JSON or CSV.
//!
//! Exit codes: 0 success, 2 configuration error, 3 resource limit,
//! 4 region/domain error.

mod emit;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cayley_ising::factor::{
    classify, half_power_case, quarter_power_case, FactorClassification, Rational, VerdictBasis,
};
use cayley_ising::gibbs::{check_consistency, named_measures, zero_temperature_scan};
use cayley_ising::model::ModelParams;
use cayley_ising::recursion::{
    classify_region, periodic_fixed_points, recursion_check, ti_fixed_points, FieldAssignment,
    Region,
};
use emit::{cell_f64, cell_opt, to_json, Csv};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "cayley-ising",
    about = "Gibbs measures and factor types of the Ising model with competing \
             ternary and binary interactions on the order-2 Cayley tree",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Model parameters, given either as weights (θ, θ₁) or as couplings
/// (J, J₁, β). Exactly one style per invocation.
#[derive(Args)]
struct ParamArgs {
    /// Weight θ = exp(2βJ)
    #[arg(long)]
    theta: Option<f64>,
    /// Weight θ₁ = exp(2βJ₁)
    #[arg(long)]
    theta1: Option<f64>,
    /// Ternary coupling J
    #[arg(long = "J")]
    j: Option<f64>,
    /// Nearest-neighbor coupling J₁
    #[arg(long = "J1")]
    j1: Option<f64>,
    /// Inverse temperature β
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the (θ, θ₁) plane on a grid: region tag, boundary margin,
    /// fixed points
    Regions {
        /// θ value or range `lo:hi`
        #[arg(long)]
        theta: String,
        /// θ₁ value or range `lo:hi`
        #[arg(long)]
        theta1: String,
        /// Points per ranged axis
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write to this path instead of standard output
        #[arg(long)]
        out: Option<String>,
    },
    /// Check Kolmogorov consistency of a boundary field against the
    /// recursion verdict
    GibbsCheck {
        #[command(flatten)]
        params: ParamArgs,
        /// Field: a named measure (1, 2, 3, 12, 21) or `const:<h>`
        #[arg(long)]
        measure: String,
        /// Volume depth n
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Pass tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Classify the von Neumann factor type of a translation-invariant
    /// state
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// State index: 1, 2 or 3
        #[arg(long)]
        measure: Option<u8>,
        /// Commensurability tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Exponent / denominator bound
        #[arg(long = "max-exponent", default_value_t = 64)]
        max_exponent: u32,
        /// Emit a built-in worked scenario instead (3.1 or 3.2)
        #[arg(long)]
        example: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Scan a β schedule at fixed couplings toward the zero-temperature
    /// limits
    ZeroT {
        /// Ternary coupling J
        #[arg(long = "J")]
        j: f64,
        /// Nearest-neighbor coupling J₁ (must be positive)
        #[arg(long = "J1")]
        j1: f64,
        /// β schedule, comma separated and increasing
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        beta: Vec<f64>,
        /// Volume depth n
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
}

enum CliError {
    Config(String),
    Resource(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Domain(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Resource(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<cayley_ising::Error> for CliError {
    fn from(e: cayley_ising::Error) -> Self {
        match e {
            cayley_ising::Error::InvalidParameter(m) => CliError::Config(m),
            cayley_ising::Error::ResourceLimit(m) => CliError::Resource(m),
            cayley_ising::Error::Domain(m) | cayley_ising::Error::Region(m) => {
                CliError::Domain(m)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Regions {
            theta,
            theta1,
            grid,
            format,
            out,
        } => run_regions(&theta, &theta1, grid, format).map(|s| (s, out)),
        Command::GibbsCheck {
            params,
            measure,
            depth,
            tol,
            format,
            out,
        } => run_gibbs_check(&params, &measure, depth, tol, format).map(|s| (s, out)),
        Command::Classify {
            params,
            measure,
            tol,
            max_exponent,
            example,
            format,
            out,
        } => run_classify(&params, measure, tol, max_exponent, example.as_deref(), format)
            .map(|s| (s, out)),
        Command::ZeroT {
            j,
            j1,
            beta,
            depth,
            format,
            out,
        } => run_zero_t(j, j1, &beta, depth, format).map(|s| (s, out)),
    };

    match result {
        Ok((output, out_path)) => match out_path {
            Some(path) => {
                if let Err(e) = std::fs::write(&path, output) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(2);
                }
                ExitCode::SUCCESS
            }
            None => {
                print!("{output}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve_params(args: &ParamArgs) -> Result<ModelParams, CliError> {
    let theta_style = args.theta.is_some() || args.theta1.is_some();
    let coupling_style = args.j.is_some() || args.j1.is_some() || args.beta.is_some();
    match (theta_style, coupling_style) {
        (true, true) => Err(CliError::Config(
            "give either --theta/--theta1 or --J/--J1/--beta, not both".into(),
        )),
        (false, false) => Err(CliError::Config(
            "missing parameters: give --theta/--theta1 or --J/--J1/--beta".into(),
        )),
        (true, false) => {
            let (Some(theta), Some(theta1)) = (args.theta, args.theta1) else {
                return Err(CliError::Config(
                    "the theta style needs both --theta and --theta1".into(),
                ));
            };
            Ok(ModelParams::from_thetas(theta, theta1)?)
        }
        (false, true) => {
            let (Some(j), Some(j1), Some(beta)) = (args.j, args.j1, args.beta) else {
                return Err(CliError::Config(
                    "the coupling style needs --J, --J1 and --beta".into(),
                ));
            };
            Ok(ModelParams::new(j, j1, beta)?)
        }
    }
}

fn region_name(region: Region) -> &'static str {
    match region {
        Region::ThreeTranslationInvariant => "three_translation_invariant",
        Region::ThreePeriodic => "three_periodic",
        Region::Unique => "unique",
    }
}

// ---------------------------------------------------------------- regions

fn parse_axis(spec: &str, name: &str) -> Result<(f64, f64), CliError> {
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Config(format!("cannot parse --{name} value '{s}'")))
    };
    match spec.split_once(':') {
        Some((lo, hi)) => {
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CliError::Config(format!(
                    "--{name} range must be finite with lo < hi, got {spec}"
                )));
            }
            Ok((lo, hi))
        }
        None => {
            let v = parse(spec)?;
            Ok((v, v))
        }
    }
}

fn axis_values(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    if lo == hi {
        vec![lo]
    } else {
        (0..grid)
            .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
            .collect()
    }
}

#[derive(Serialize)]
struct RegionRow {
    theta: f64,
    theta1: f64,
    region: &'static str,
    boundary_distance: f64,
    u1: Option<f64>,
    u3: Option<f64>,
    u_star: Option<f64>,
    v_star: Option<f64>,
}

#[derive(Serialize)]
struct RegionsDoc {
    schema_version: &'static str,
    command: &'static str,
    rows: Vec<RegionRow>,
}

fn run_regions(
    theta_spec: &str,
    theta1_spec: &str,
    grid: usize,
    format: Format,
) -> Result<String, CliError> {
    let (tlo, thi) = parse_axis(theta_spec, "theta")?;
    let (t1lo, t1hi) = parse_axis(theta1_spec, "theta1")?;
    if grid < 2 && (tlo != thi || t1lo != t1hi) {
        return Err(CliError::Config(format!(
            "--grid must be at least 2 for ranged axes, got {grid}"
        )));
    }

    let mut rows = Vec::new();
    for &theta1 in &axis_values(t1lo, t1hi, grid) {
        for &theta in &axis_values(tlo, thi, grid) {
            let params = ModelParams::from_thetas(theta, theta1)?;
            let class = classify_region(&params);
            let ti = ti_fixed_points(&params).nontrivial;
            let pair = periodic_fixed_points(&params).pair;
            rows.push(RegionRow {
                theta,
                theta1,
                region: region_name(class.region),
                boundary_distance: class.boundary_distance,
                u1: ti.map(|(u1, _)| u1),
                u3: ti.map(|(_, u3)| u3),
                u_star: pair.map(|(u, _)| u),
                v_star: pair.map(|(_, v)| v),
            });
        }
    }

    Ok(match format {
        Format::Json => to_json(&RegionsDoc {
            schema_version: SCHEMA_VERSION,
            command: "regions",
            rows,
        }),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "theta",
                "theta1",
                "region",
                "boundary_distance",
                "u1",
                "u3",
                "u_star",
                "v_star",
            ]);
            for r in rows {
                csv.row(&[
                    cell_f64(r.theta),
                    cell_f64(r.theta1),
                    r.region.to_string(),
                    cell_f64(r.boundary_distance),
                    cell_opt(r.u1),
                    cell_opt(r.u3),
                    cell_opt(r.u_star),
                    cell_opt(r.v_star),
                ]);
            }
            csv.finish()
        }
    })
}

// ------------------------------------------------------------ gibbs-check

#[derive(Serialize)]
struct FieldDoc {
    kind: &'static str,
    name: String,
    h: Option<f64>,
    h_even: Option<f64>,
    h_odd: Option<f64>,
}

#[derive(Serialize)]
struct GibbsCheckDoc {
    schema_version: &'static str,
    command: &'static str,
    theta: f64,
    theta1: f64,
    beta: f64,
    field: FieldDoc,
    depth: usize,
    tol: f64,
    consistency_max_discrepancy: f64,
    consistency_pass: bool,
    configs_checked: u64,
    recursion_max_residual: f64,
    recursion_pass: bool,
    equivalent: bool,
}

fn resolve_field(
    params: &ModelParams,
    measure: &str,
) -> Result<(String, FieldAssignment), CliError> {
    if let Some(h) = measure.strip_prefix("const:") {
        let h: f64 = h
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse field value '{h}'")))?;
        return Ok(("const".to_string(), FieldAssignment::constant(h)?));
    }
    let name = format!("mu{measure}");
    if !["mu1", "mu2", "mu3", "mu12", "mu21"].contains(&name.as_str()) {
        return Err(CliError::Config(format!(
            "--measure must be 1, 2, 3, 12, 21 or const:<h>, got '{measure}'"
        )));
    }
    named_measures(params)
        .into_iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| {
            CliError::Domain(format!(
                "measure {name} does not exist at theta={}, theta1={}",
                params.theta(),
                params.theta1()
            ))
        })
}

fn field_doc(name: &str, field: &FieldAssignment) -> FieldDoc {
    match field {
        FieldAssignment::Constant(h) => FieldDoc {
            kind: "constant",
            name: name.to_string(),
            h: Some(*h),
            h_even: None,
            h_odd: None,
        },
        FieldAssignment::Parity { even, odd } => FieldDoc {
            kind: "parity",
            name: name.to_string(),
            h: None,
            h_even: Some(*even),
            h_odd: Some(*odd),
        },
        FieldAssignment::Explicit(_) => FieldDoc {
            kind: "explicit",
            name: name.to_string(),
            h: None,
            h_even: None,
            h_odd: None,
        },
    }
}

fn run_gibbs_check(
    args: &ParamArgs,
    measure: &str,
    depth: usize,
    tol: f64,
    format: Format,
) -> Result<String, CliError> {
    if matches!(format, Format::Csv) {
        return Err(CliError::Config(
            "gibbs-check emits a JSON report; csv is not supported".into(),
        ));
    }
    let params = resolve_params(args)?;
    let (name, field) = resolve_field(&params, measure)?;
    let consistency = check_consistency(&params, &field, depth, tol)?;
    let recursion = recursion_check(&params, &field, depth, tol)?;

    Ok(to_json(&GibbsCheckDoc {
        schema_version: SCHEMA_VERSION,
        command: "gibbs_check",
        theta: params.theta(),
        theta1: params.theta1(),
        beta: params.beta(),
        field: field_doc(&name, &field),
        depth,
        tol,
        consistency_max_discrepancy: consistency.max_discrepancy,
        consistency_pass: consistency.pass,
        configs_checked: consistency.configs_checked,
        recursion_max_residual: recursion.max_residual,
        recursion_pass: recursion.pass,
        equivalent: consistency.pass == recursion.pass,
    }))
}

// --------------------------------------------------------------- classify

#[derive(Serialize)]
struct ClassificationDoc {
    measure: u8,
    type_tag: &'static str,
    delta: Option<f64>,
    exponents: Vec<i64>,
    excluded: Vec<usize>,
    field_exponent: Option<i64>,
    modular_period: Option<f64>,
    subfactor_r: Option<Rational>,
    basis: &'static str,
    tol: f64,
    max_exponent: u32,
}

impl From<&FactorClassification> for ClassificationDoc {
    fn from(c: &FactorClassification) -> Self {
        ClassificationDoc {
            measure: c.measure,
            type_tag: c.factor_type.tag(),
            delta: c.factor_type.delta(),
            exponents: c.exponents.clone(),
            excluded: c.excluded.clone(),
            field_exponent: c.field_exponent,
            modular_period: c.modular_period,
            subfactor_r: c.subfactor_r,
            basis: match c.basis {
                VerdictBasis::Structured => "structured",
                VerdictBasis::Numerical => "numerical",
            },
            tol: c.tol,
            max_exponent: c.max_exponent,
        }
    }
}

#[derive(Serialize)]
struct ClassifyDoc {
    schema_version: &'static str,
    command: &'static str,
    theta: f64,
    theta1: f64,
    beta: f64,
    classification: ClassificationDoc,
}

#[derive(Serialize)]
struct QuarterCaseDoc {
    schema_version: &'static str,
    command: &'static str,
    example: &'static str,
    theta_tilde: f64,
    cubic_residual: f64,
    h1: f64,
    surd_identity_residual: f64,
    arctanh_relation_residual: f64,
    fixed_point_residual: f64,
    theta1: f64,
    delta: f64,
    delta1: f64,
    unordered: ClassificationDoc,
    ordered: ClassificationDoc,
    pass: bool,
}

#[derive(Serialize)]
struct HalfCaseDoc {
    schema_version: &'static str,
    command: &'static str,
    example: &'static str,
    theta: f64,
    phase_condition: bool,
    u3: f64,
    u3_residual: f64,
    delta: f64,
    delta1: f64,
    modular_sum_residual: f64,
    t0: f64,
    t0_delta1: f64,
    unordered: ClassificationDoc,
    ordered: ClassificationDoc,
    pass: bool,
}

fn run_classify(
    args: &ParamArgs,
    measure: Option<u8>,
    tol: f64,
    max_exponent: u32,
    example: Option<&str>,
    format: Format,
) -> Result<String, CliError> {
    if matches!(format, Format::Csv) {
        return Err(CliError::Config(
            "classify emits a JSON report; csv is not supported".into(),
        ));
    }
    if let Some(which) = example {
        return match which {
            "3.1" => {
                let case = quarter_power_case()?;
                Ok(to_json(&QuarterCaseDoc {
                    schema_version: SCHEMA_VERSION,
                    command: "classify_example",
                    example: "3.1",
                    theta_tilde: case.theta_tilde,
                    cubic_residual: case.cubic_residual,
                    h1: case.h1,
                    surd_identity_residual: case.surd_identity_residual,
                    arctanh_relation_residual: case.arctanh_relation_residual,
                    fixed_point_residual: case.fixed_point_residual,
                    theta1: case.theta1,
                    delta: case.delta,
                    delta1: case.delta1,
                    unordered: (&case.unordered).into(),
                    ordered: (&case.ordered).into(),
                    pass: case.pass,
                }))
            }
            "3.2" => {
                let case = half_power_case()?;
                Ok(to_json(&HalfCaseDoc {
                    schema_version: SCHEMA_VERSION,
                    command: "classify_example",
                    example: "3.2",
                    theta: case.theta,
                    phase_condition: case.phase_condition,
                    u3: case.u3,
                    u3_residual: case.u3_residual,
                    delta: case.delta,
                    delta1: case.delta1,
                    modular_sum_residual: case.modular_sum_residual,
                    t0: case.t0,
                    t0_delta1: case.t0_delta1,
                    unordered: (&case.unordered).into(),
                    ordered: (&case.ordered).into(),
                    pass: case.pass,
                }))
            }
            other => Err(CliError::Config(format!(
                "--example must be 3.1 or 3.2, got '{other}'"
            ))),
        };
    }

    let params = resolve_params(args)?;
    let measure = measure.ok_or_else(|| {
        CliError::Config("--measure (1, 2 or 3) is required without --example".into())
    })?;
    let classification = classify(&params, measure, tol, max_exponent)?;
    Ok(to_json(&ClassifyDoc {
        schema_version: SCHEMA_VERSION,
        command: "classify",
        theta: params.theta(),
        theta1: params.theta1(),
        beta: params.beta(),
        classification: (&classification).into(),
    }))
}

// ----------------------------------------------------------------- zero-t

#[derive(Serialize)]
struct ZeroTRowDoc {
    beta: f64,
    theta: f64,
    theta1: f64,
    region: &'static str,
    u3: Option<f64>,
    mu3_root_plus: Option<f64>,
    mu3_sigma_plus: Option<f64>,
    u1: Option<f64>,
    mu1_root_minus: Option<f64>,
    mu1_sigma_minus: Option<f64>,
    mu2_root_plus: f64,
    monotone: bool,
}

#[derive(Serialize)]
struct ZeroTDoc {
    schema_version: &'static str,
    command: &'static str,
    j: f64,
    j1: f64,
    depth: usize,
    rows: Vec<ZeroTRowDoc>,
}

fn run_zero_t(
    j: f64,
    j1: f64,
    schedule: &[f64],
    depth: usize,
    format: Format,
) -> Result<String, CliError> {
    if j1 <= 0.0 {
        return Err(CliError::Config(format!(
            "--J1 must be positive for the zero-temperature scan, got {j1}"
        )));
    }
    let rows = zero_temperature_scan(j, j1, schedule, depth)?;
    let docs: Vec<ZeroTRowDoc> = rows
        .iter()
        .map(|r| ZeroTRowDoc {
            beta: r.beta,
            theta: r.theta,
            theta1: r.theta1,
            region: region_name(r.region),
            u3: r.u3,
            mu3_root_plus: r.mu3_root_plus,
            mu3_sigma_plus: r.mu3_sigma_plus,
            u1: r.u1,
            mu1_root_minus: r.mu1_root_minus,
            mu1_sigma_minus: r.mu1_sigma_minus,
            mu2_root_plus: r.mu2_root_plus,
            monotone: r.monotone,
        })
        .collect();

    Ok(match format {
        Format::Json => to_json(&ZeroTDoc {
            schema_version: SCHEMA_VERSION,
            command: "zero_t",
            j,
            j1,
            depth,
            rows: docs,
        }),
        Format::Csv => {
            let mut csv = Csv::new(&[
                "beta",
                "theta",
                "theta1",
                "region",
                "u3",
                "mu3_root_plus",
                "mu3_sigma_plus",
                "u1",
                "mu1_root_minus",
                "mu1_sigma_minus",
                "mu2_root_plus",
                "monotone",
            ]);
            for r in docs {
                csv.row(&[
                    cell_f64(r.beta),
                    cell_f64(r.theta),
                    cell_f64(r.theta1),
                    r.region.to_string(),
                    cell_opt(r.u3),
                    cell_opt(r.mu3_root_plus),
                    cell_opt(r.mu3_sigma_plus),
                    cell_opt(r.u1),
                    cell_opt(r.mu1_root_minus),
                    cell_opt(r.mu1_sigma_minus),
                    cell_f64(r.mu2_root_plus),
                    r.monotone.to_string(),
                ]);
            }
            csv.finish()
        }
    })
}
