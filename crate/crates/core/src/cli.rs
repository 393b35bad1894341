//! Command-line front end. Every subcommand writes plain data files (CSV,
//! P2 graymaps, JSON) into the output directory; nothing is plotted.
//!
//! Exit codes: 0 success, 2 usage error, 3 validation or domain error,
//! 4 I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::comparison::{power_sweep, ComparisonSetup};
use crate::dimensioning::{
    dimensioning_curve, dimensioning_table, pathloss_curve, DimensioningQuery, GeometryMode, RhoDRule,
};
use crate::error::{Error, Result};
use crate::placement::{bs_coverage, evaluate_candidates, greedy_place, coverage_report};
use crate::propagation::{
    fspl_gain, knife_edge_loss_db, knife_edge_loss_from_v, loss_db, ris_path_gain, two_ray_gain,
    umi_path_loss_db, wavelength, LinkModelParams, PathGeometry,
};
use crate::scene::{load_scene, Scene};
use crate::step_range;
use crate::table::fmt_sig;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Validation(_) | Error::Parse(_) => EXIT_VALIDATION,
        Error::Io { .. } => EXIT_IO,
    }
}

#[derive(Debug, Parser)]
#[command(name = "risplan", version, about = "RIS coverage, dimensioning and power planning")]
pub struct Cli {
    /// Scene file (JSON); required by `los-map` and `place`.
    #[arg(long, global = true)]
    pub scene: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Restrict written files to these formats (default: all that apply).
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Vec<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pgm,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direct BS line-of-sight map over the scene grid.
    LosMap,
    /// Greedy RIS placement and the resulting coverage map.
    Place {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Path-loss and required-size sweeps.
    Dimension(DimensionArgs),
    /// Minimum transmit power of direct, relayed and RIS-assisted links.
    Compare(CompareArgs),
    /// Evaluate a single propagation model and print the loss in dB.
    Pathloss {
        #[command(subcommand)]
        model: PathlossModel,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 10e6)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 10.0)]
    pub noise_figure: f64,
    /// Spectral-efficiency target, bit/s/Hz.
    #[arg(long, default_value_t = 4.0)]
    pub rate: f64,
    /// Unit-cell reflection amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

impl ParamArgs {
    fn build(&self, frequency_hz: f64) -> Result<LinkModelParams> {
        let mut p = LinkModelParams::new(frequency_hz)?;
        p.bandwidth_hz = self.bandwidth;
        p.noise_figure_db = self.noise_figure;
        p.rate_bps_per_hz = self.rate;
        p.ris_amplitude = self.alpha;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    FixedRhoT,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhoDArg {
    RightAngle,
    Collinear,
}

#[derive(Debug, Clone, Args)]
pub struct DimensionArgs {
    #[arg(long, default_value_t = 6e9)]
    pub freq: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
    pub mode: ModeArg,
    /// Tx-RIS distance for `fixed-rho-t`.
    #[arg(long, default_value_t = 20.0)]
    pub rho_t: f64,
    #[arg(long, default_value_t = 20.0)]
    pub blockage_db: f64,
    /// Element counts for the RIS path-loss columns.
    #[arg(long, value_delimiter = ',', default_value = "121,484,625,2500")]
    pub n: Vec<u32>,
    #[arg(long, value_enum, default_value_t = RhoDArg::RightAngle)]
    pub rho_d_rule: RhoDArg,
    #[arg(long, default_value_t = 1.0)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub rho_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub rho_step: f64,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// One CSV is written per frequency.
    #[arg(long, value_delimiter = ',', default_value = "6e9,27e9")]
    pub freq: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "25,250")]
    pub n: Vec<u32>,
    /// Append energy-efficiency columns.
    #[arg(long)]
    pub ee: bool,
    /// Static power added to every transmit power in the efficiency columns, W.
    #[arg(long, default_value_t = 0.0)]
    pub ee_overhead: f64,
    #[arg(long, default_value_t = 80.0)]
    pub d_bs_ris: f64,
    #[arg(long, default_value_t = 10.0)]
    pub lateral_offset: f64,
    #[arg(long, default_value_t = 20.0)]
    pub d1_min: f64,
    #[arg(long, default_value_t = 120.0)]
    pub d1_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d1_step: f64,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum PathlossModel {
    /// Free space.
    Fspl {
        #[arg(long)]
        f: f64,
        #[arg(long)]
        d: f64,
    },
    /// Urban micro street canyon.
    Umi {
        #[arg(long)]
        f: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        nlos: bool,
    },
    /// Direct plus ground-reflected ray.
    TwoRay {
        #[arg(long)]
        f: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        ht: f64,
        #[arg(long)]
        hr: f64,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        gamma: f64,
    },
    /// Single knife edge; give either `--v` or all of `--f --d1 --d2 --h`.
    Knife {
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["f", "d1", "d2", "h"])]
        v: Option<f64>,
        #[arg(long, requires_all = ["d1", "d2", "h"])]
        f: Option<f64>,
        #[arg(long)]
        d1: Option<f64>,
        #[arg(long)]
        d2: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        h: Option<f64>,
    },
    /// Reflected path through an RIS of `--n` half-wavelength elements.
    Ris {
        #[arg(long)]
        f: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        rho_t: f64,
        #[arg(long)]
        rho_r: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_i: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_r: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
}

/// Files written and text for stdout.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub message: String,
}

struct OutDir<'a> {
    dir: &'a Path,
    formats: &'a [Format],
    files: Vec<PathBuf>,
}

impl<'a> OutDir<'a> {
    fn create(dir: &'a Path, formats: &'a [Format]) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutDir {
            dir,
            formats,
            files: Vec::new(),
        })
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.is_empty() || self.formats.contains(&f)
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<CommandOutput> {
    let scene = || -> Result<Scene> {
        let path = cli
            .scene
            .as_ref()
            .ok_or_else(|| Error::Usage("--scene is required for this command".into()))?;
        load_scene(path)
    };
    match &cli.command {
        Command::LosMap => cmd_los_map(&scene()?, &cli.out, &cli.format),
        Command::Place { k } => cmd_place(&scene()?, *k as usize, &cli.out, &cli.format),
        Command::Dimension(args) => cmd_dimension(args, &cli.out, &cli.format),
        Command::Compare(args) => cmd_compare(args, &cli.out, &cli.format),
        Command::Pathloss { model } => cmd_pathloss(model).map(|db| CommandOutput {
            files: vec![],
            message: format!("{} dB", fmt_sig(db)),
        }),
    }
}

pub fn cmd_los_map(scene: &Scene, out: &Path, formats: &[Format]) -> Result<CommandOutput> {
    let grid = bs_coverage(scene);
    let mut dir = OutDir::create(out, formats)?;
    if dir.wants(Format::Csv) {
        dir.write("los_map.csv", &grid.to_table().to_csv())?;
    }
    if dir.wants(Format::Pgm) {
        dir.write("los_map.pgm", &grid.to_pgm())?;
    }
    let covered = grid.count(crate::placement::CoverageLabel::BsLos);
    Ok(CommandOutput {
        files: dir.files,
        message: format!("bs_los {covered} of {}", grid.labels.len()),
    })
}

pub fn cmd_place(scene: &Scene, k: usize, out: &Path, formats: &[Format]) -> Result<CommandOutput> {
    if k == 0 {
        return Err(Error::Usage("--k must be at least 1".into()));
    }
    let (plan, _) = greedy_place(scene, k)?;
    let report = coverage_report(scene, &plan)?;
    let candidates = evaluate_candidates(scene)?;

    let mut summary = report.summary.render();
    if plan.truncated() {
        summary.push_str(&format!(
            "truncated {} of {} requested placements\n",
            plan.placements.len(),
            plan.requested
        ));
    }
    summary.push_str("candidate raw_los fov_best orientation_deg\n");
    for c in &candidates {
        summary.push_str(&format!(
            "{} {} {} {}\n",
            c.candidate_index,
            c.raw_los_count,
            c.fov_count,
            fmt_sig(c.best_orientation_deg)
        ));
    }

    let mut dir = OutDir::create(out, formats)?;
    if dir.wants(Format::Json) {
        dir.write("plan.json", &plan.to_json())?;
    }
    if dir.wants(Format::Csv) {
        dir.write("coverage.csv", &report.grid.to_table().to_csv())?;
    }
    if dir.wants(Format::Pgm) {
        dir.write("coverage.pgm", &report.grid.to_pgm())?;
    }
    dir.write("summary.txt", &summary)?;
    Ok(CommandOutput {
        files: dir.files,
        message: summary,
    })
}

pub fn cmd_dimension(args: &DimensionArgs, out: &Path, formats: &[Format]) -> Result<CommandOutput> {
    let mut params = args.params.build(args.freq)?;
    params.blockage_db = args.blockage_db;
    params.validate()?;
    let mode = match args.mode {
        ModeArg::FixedRhoT => GeometryMode::FixedRhoT(args.rho_t),
        ModeArg::Symmetric => GeometryMode::Symmetric,
    };
    let mut query = DimensioningQuery::new(params, mode);
    query.rho_d_rule = match args.rho_d_rule {
        RhoDArg::RightAngle => RhoDRule::RightAngle,
        RhoDArg::Collinear => RhoDRule::Collinear,
    };
    let distances = step_range(args.rho_min, args.rho_max, args.rho_step);
    let losses = pathloss_curve(&query, &args.n, &distances)?;
    let sizes = dimensioning_curve(&query, &distances)?;

    let mut message = String::new();
    for (i, n) in losses.n_values.iter().enumerate() {
        match losses.first_crossover(i) {
            Some(d) => message.push_str(&format!("N={n}: RIS loss exceeds blocked path from {} m\n", fmt_sig(d))),
            None => message.push_str(&format!("N={n}: RIS loss stays below blocked path\n")),
        }
    }

    let mut dir = OutDir::create(out, formats)?;
    if dir.wants(Format::Csv) {
        dir.write("pathloss.csv", &losses.to_table().to_csv())?;
        dir.write("dimensioning.csv", &dimensioning_table(&sizes).to_csv())?;
    }
    Ok(CommandOutput {
        files: dir.files,
        message,
    })
}

pub fn cmd_compare(args: &CompareArgs, out: &Path, formats: &[Format]) -> Result<CommandOutput> {
    let mut tables = Vec::new();
    for &f in &args.freq {
        let mut setup = ComparisonSetup::new(args.params.build(f)?);
        setup.n_values = args.n.clone();
        setup.d_bs_ris_m = args.d_bs_ris;
        setup.lateral_offset_m = args.lateral_offset;
        setup.d1_values = step_range(args.d1_min, args.d1_max, args.d1_step);
        let sweep = power_sweep(&setup)?;
        let table = sweep.to_table(&setup.params, args.ee.then_some(args.ee_overhead))?;
        tables.push((format!("power_sweep_{}GHz.csv", fmt_sig(f / 1e9)), table));
    }
    let mut dir = OutDir::create(out, formats)?;
    if dir.wants(Format::Csv) {
        for (name, t) in &tables {
            dir.write(name, &t.to_csv())?;
        }
    }
    Ok(CommandOutput {
        files: dir.files,
        message: String::new(),
    })
}

/// Loss in dB of the selected model.
pub fn cmd_pathloss(model: &PathlossModel) -> Result<f64> {
    match *model {
        PathlossModel::Fspl { f, d } => Ok(loss_db(fspl_gain(wavelength(f), d)?)),
        PathlossModel::Umi { f, d, nlos } => umi_path_loss_db(f, d, !nlos),
        PathlossModel::TwoRay { f, d, ht, hr, gamma } => {
            two_ray_gain(wavelength(f), d, ht, hr, Complex64::new(gamma, 0.0)).map(loss_db)
        }
        PathlossModel::Knife { v, f, d1, d2, h } => match (v, f, d1, d2, h) {
            (Some(v), ..) => Ok(knife_edge_loss_from_v(v)),
            (None, Some(f), Some(d1), Some(d2), Some(h)) => knife_edge_loss_db(wavelength(f), d1, d2, h),
            _ => Err(Error::Usage("knife needs --v or all of --f --d1 --d2 --h".into())),
        },
        PathlossModel::Ris {
            f,
            n,
            rho_t,
            rho_r,
            theta_i,
            theta_r,
            alpha,
        } => {
            let mut p = LinkModelParams::new(f)?;
            p.ris_elements = n;
            p.ris_amplitude = alpha;
            // ρd does not enter the reflected-path gain.
            let geom = PathGeometry::new(rho_t.hypot(rho_r), rho_t, rho_r)?;
            ris_path_gain(&p, &geom, theta_i, theta_r).map(loss_db)
        }
    }
}
