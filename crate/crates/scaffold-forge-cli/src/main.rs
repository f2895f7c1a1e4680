//! Command-line front end: group -> tower -> breaks -> scaffold ->
//! certificates, driven by declarative job files or inline flags.
//!
//! Exit codes: 0 = pass, 2 = hypotheses fail, 3 = input error.

mod job;
mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use scaffold_forge::generic::{
    build_generic_with, verify_level, GenericTower, SectionRule, TowerConfig,
};
use scaffold_forge::pgroup::PFilteredGroup;
use scaffold_forge::ramification::{check_ramfilt, RamReport};
use scaffold_forge::scaffold::{
    analyze, precision_c, search_breaks, ScaffoldInput, SearchMode,
};

use job::{input_error, InputError, JobSpec};
use render::{
    GenericReport, GroupReport, Report, ScaffoldOut, SearchReport, TowerReport, VerifyMark,
};

#[derive(Parser)]
#[command(
    name = "scaffold-forge",
    version,
    about = "Exact Galois p-extension towers of F_p((pi)): ramification breaks, scaffolds, and associated orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Declarative job file (JSON); one command per job.
    #[arg(long)]
    job: Option<PathBuf>,
    /// Output format (overrides the job's output.format).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print mu_ij as truncated Laurent series up to this
    /// exponent.
    #[arg(long)]
    series_precision: Option<i64>,
    /// Preset group family (cyclic, elem_abelian, dihedral2,
    /// quaternion, heisenberg), as an alternative to --job.
    #[arg(long)]
    preset: Option<String>,
    /// Field characteristic (with --preset).
    #[arg(short, long)]
    p: Option<u64>,
    /// log_p of the group order (with --preset).
    #[arg(short, long)]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Series orders, sigma set, rank profile, and Frattini subgroup.
    Group {
        #[command(flatten)]
        common: Common,
    },
    /// Build the generic tower: D_i, cochains, action tables.
    Generic {
        #[command(flatten)]
        common: Common,
    },
    /// Check realizability of an upper ramification break sequence.
    Tower {
        #[command(flatten)]
        common: Common,
        /// Upper breaks, comma separated.
        #[arg(long, value_delimiter = ',')]
        u: Option<Vec<i64>>,
        /// Per-level a_i values (Laurent fraction syntax).
        #[arg(long, value_delimiter = ',')]
        a_list: Option<Vec<String>>,
        /// Base element a (with --omegas).
        #[arg(long)]
        a: Option<String>,
        /// Scale factors omega_1..omega_n.
        #[arg(long, value_delimiter = ',')]
        omegas: Option<Vec<String>>,
    },
    /// Scaffold precision, certificates, Theta generators, and the
    /// associated-order display.
    Scaffold {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: Option<String>,
        #[arg(long, value_delimiter = ',')]
        omegas: Option<Vec<String>>,
    },
    /// Greedy minimal break sequences meeting a precision floor.
    Search {
        #[command(flatten)]
        common: Common,
        /// "scaffold" or "hopf".
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        c_min: Option<i64>,
        #[arg(long)]
        u1: Option<i64>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Group { common } => cmd_group(common),
        Command::Generic { common } => cmd_generic(common),
        Command::Tower {
            common,
            u,
            a_list,
            a,
            omegas,
        } => cmd_tower(common, u, a_list, a, omegas),
        Command::Scaffold { common, a, omegas } => cmd_scaffold(common, a, omegas),
        Command::Search {
            common,
            mode,
            c_min,
            u1,
        } => cmd_search(common, mode, c_min, u1),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

/// The effective job: from --job when given (whose command must match
/// the verb), otherwise synthesized from inline flags.
fn effective_job(common: &Common, verb: &str) -> Result<(JobSpec, PathBuf), InputError> {
    match &common.job {
        Some(path) => {
            let spec = job::load_job(path)?;
            if spec.command != verb {
                return Err(InputError(format!(
                    "job file command is '{}', but the '{verb}' verb was invoked",
                    spec.command
                )));
            }
            let base = path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            Ok((spec, base))
        }
        None => {
            let p = common
                .p
                .ok_or_else(|| InputError("need --job or --preset with -p/-n".into()))?;
            let spec = JobSpec {
                command: verb.to_string(),
                field: job::FieldSpec { p },
                group: job::GroupSpec {
                    preset: common.preset.clone(),
                    n: common.n,
                    p: None,
                    cayley: None,
                    series: None,
                    names: None,
                    file: None,
                },
                series: None,
                u: None,
                a_list: None,
                a: None,
                omegas: None,
                search: None,
                output: None,
            };
            Ok((spec, PathBuf::from(".")))
        }
    }
}

fn tower_config() -> TowerConfig {
    let mut config = TowerConfig::default();
    if let Ok(value) = std::env::var("SCAFFOLD_FORGE_DEGREE_CEILING") {
        if let Ok(ceiling) = value.parse::<u32>() {
            config.degree_ceiling = ceiling;
        }
    }
    config
}

fn build_tower(group: &PFilteredGroup) -> Result<GenericTower, InputError> {
    build_generic_with(group, &tower_config()).map_err(input_error)
}

fn emit(common: &Common, job: &JobSpec, report: &Report) -> Result<(), InputError> {
    let format = common
        .format
        .or_else(|| {
            job.output
                .as_ref()
                .and_then(|o| o.format.as_deref())
                .map(|f| match f {
                    "json" => Format::Json,
                    _ => Format::Text,
                })
        })
        .unwrap_or(Format::Text);
    let rendered = match format {
        Format::Text => report.to_text(),
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| InputError(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn cmd_group(common: &Common) -> Result<i32, InputError> {
    let (spec, base) = effective_job(common, "group")?;
    let group = spec.build_group(&base)?;
    let sigma: Vec<usize> = group.sigma_set().into_iter().collect();
    let report = Report::Group(GroupReport {
        p: group.p(),
        n: group.n(),
        order: group.order(),
        series_orders: (0..=group.n()).map(|i| group.series(i).len()).collect(),
        rank_profile: (0..=group.n()).map(|i| group.rank(i)).collect(),
        frattini_order: group.frattini().map_err(input_error)?.len(),
        sigma,
    });
    emit(common, &spec, &report)?;
    Ok(0)
}

fn cmd_generic(common: &Common) -> Result<i32, InputError> {
    let (spec, base) = effective_job(common, "generic")?;
    let group = spec.build_group(&base)?;
    let tower = build_tower(&group)?;
    let verify: Vec<VerifyMark> = (1..=group.n())
        .map(|i| {
            let lvl = tower.level(i);
            let checks =
                verify_level(&tower, i, SectionRule::MinimalRep, &lvl.cochain, &lvl.d)
                    .map_err(input_error)?;
            Ok(VerifyMark { level: i, checks })
        })
        .collect::<Result<_, InputError>>()?;
    let report = Report::Generic(GenericReport {
        tower: tower.export(),
        verify,
    });
    emit(common, &spec, &report)?;
    Ok(0)
}

/// Resolves the tower command's break sequence from whichever input
/// shape the job supplies.
fn resolve_breaks(spec: &JobSpec) -> Result<Vec<i64>, InputError> {
    if let Some(u) = &spec.u {
        return Ok(u.clone());
    }
    if let Some(a_list) = &spec.a_list {
        let fracs = spec.parse_fracs(a_list)?;
        return fracs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                a.valuation()
                    .map(|v| -v)
                    .ok_or_else(|| InputError(format!("a_{} is zero", i + 1)))
            })
            .collect();
    }
    if let (Some(a), Some(omegas)) = (&spec.a, &spec.omegas) {
        let a = spec.parse_fracs(std::slice::from_ref(a))?.remove(0);
        let omegas = spec.parse_fracs(omegas)?;
        let input = ScaffoldInput::new(spec.field.p, a, omegas).map_err(input_error)?;
        return Ok(input.upper_breaks().to_vec());
    }
    Err(InputError(
        "tower command needs u, a_list, or a with omegas".into(),
    ))
}

fn cmd_tower(
    common: &Common,
    u: &Option<Vec<i64>>,
    a_list: &Option<Vec<String>>,
    a: &Option<String>,
    omegas: &Option<Vec<String>>,
) -> Result<i32, InputError> {
    let (mut spec, base) = effective_job(common, "tower")?;
    if u.is_some() {
        spec.u = u.clone();
    }
    if a_list.is_some() {
        spec.a_list = a_list.clone();
    }
    if a.is_some() {
        spec.a = a.clone();
    }
    if omegas.is_some() {
        spec.omegas = omegas.clone();
    }
    let group = spec.build_group(&base)?;
    let tower = build_tower(&group)?;
    let breaks = resolve_breaks(&spec)?;
    let ram: RamReport = check_ramfilt(&tower, &breaks).map_err(input_error)?;
    let pass = ram.pass;
    let report = Report::Tower(TowerReport {
        check: "ramfilt".to_string(),
        ram,
    });
    emit(common, &spec, &report)?;
    Ok(if pass { 0 } else { 2 })
}

fn cmd_scaffold(
    common: &Common,
    a: &Option<String>,
    omegas: &Option<Vec<String>>,
) -> Result<i32, InputError> {
    let (mut spec, base) = effective_job(common, "scaffold")?;
    if a.is_some() {
        spec.a = a.clone();
    }
    if omegas.is_some() {
        spec.omegas = omegas.clone();
    }
    let group = spec.build_group(&base)?;
    let tower = build_tower(&group)?;
    let a = spec
        .a
        .clone()
        .ok_or_else(|| InputError("scaffold command needs a".into()))?;
    let omegas = spec
        .omegas
        .clone()
        .ok_or_else(|| InputError("scaffold command needs omegas".into()))?;
    let a = spec.parse_fracs(&[a])?.remove(0);
    let omegas = spec.parse_fracs(&omegas)?;
    let input = ScaffoldInput::new(spec.field.p, a, omegas).map_err(input_error)?;
    let report = analyze(&tower, &input).map_err(input_error)?;
    let pass = report.c.is_some();
    let series_precision = common
        .series_precision
        .or_else(|| spec.output.as_ref().and_then(|o| o.series_precision));
    let mu_series = match series_precision {
        None => None,
        Some(prec) => {
            let mu = scaffold_forge::scaffold::mu_matrix(&input).map_err(input_error)?;
            let mut map = BTreeMap::new();
            for (&(i, j), value) in mu.iter() {
                let series = value.series(prec).map_err(input_error)?;
                map.insert(format!("{i},{j}"), render_series(&series, prec));
            }
            Some(map)
        }
    };
    let report = Report::Scaffold(ScaffoldOut { report, mu_series });
    emit(common, &spec, &report)?;
    Ok(if pass { 0 } else { 2 })
}

fn render_series(series: &[(i64, u64)], prec: i64) -> String {
    let mut parts: Vec<String> = Vec::new();
    for &(e, c) in series {
        if c == 0 {
            continue;
        }
        let mono = match e {
            0 => "1".to_string(),
            1 => "pi".to_string(),
            _ => format!("pi^{e}"),
        };
        parts.push(if c == 1 { mono } else { format!("{c}*{mono}") });
    }
    let head = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    };
    format!("{head} + O(pi^{})", prec + 1)
}

fn cmd_search(
    common: &Common,
    mode: &Option<String>,
    c_min: &Option<i64>,
    u1: &Option<i64>,
) -> Result<i32, InputError> {
    let (mut spec, base) = effective_job(common, "search")?;
    if let Some(mode) = mode {
        spec.search = Some(job::SearchSpec {
            mode: mode.clone(),
            c_min: c_min.or(spec.search.as_ref().and_then(|s| s.c_min)),
            u1: u1.or(spec.search.as_ref().and_then(|s| s.u1)),
        });
    }
    let search = spec
        .search
        .clone()
        .ok_or_else(|| InputError("search command needs a mode".into()))?;
    let group = spec.build_group(&base)?;
    let tower = build_tower(&group)?;
    let p = group.p() as i64;
    let n = group.n();
    let (mode_enum, c_floor) = match search.mode.as_str() {
        "scaffold" => {
            let c = search.c_min.unwrap_or(1);
            (SearchMode::Scaffold { c_min: c }, c.max(1))
        }
        "hopf" => (SearchMode::Hopf, p.pow(n as u32) - 1),
        other => return Err(InputError(format!("unknown search mode '{other}'"))),
    };
    let u = search_breaks(&tower, mode_enum, search.u1).map_err(input_error)?;
    let step = p.pow(n as u32 - 1);
    let omega_exponents: Vec<i64> = u.iter().map(|&ui| -((ui - u[0]) / step)).collect();
    let input = ScaffoldInput::from_breaks(group.p(), &u).map_err(input_error)?;
    let achieved = precision_c(&tower, &input)
        .map(|(c, _)| c.to_string())
        .unwrap_or_else(|_| "hypotheses fail".to_string());
    let breaks = input.breaks().map_err(input_error)?;
    let report = Report::Search(SearchReport {
        mode: search.mode.clone(),
        c_min: c_floor,
        u: u.clone(),
        b: breaks.lower,
        a: input.a().to_string(),
        omegas: input.omegas().iter().map(|o| o.to_string()).collect(),
        omega_exponents,
        achieved_c: achieved,
    });
    emit(common, &spec, &report)?;
    Ok(0)
}
