//! Command-line front end. Every number in a report is taken unchanged from
//! the library; the only arithmetic here is converting input units to SI.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::atomic_data::{builtin_names, builtin_species, builtin_species_all, load_species_file, IonSpecies, QubitKind};
use crate::beam::{Polarization, DEFAULT_RISE_TIME};
use crate::chain::ChainGeometry;
use crate::constants::angular;
use crate::error::{Error, Result};
use crate::planner::{
    mechanical_check, mode_collisions, pair_gate_plan, phase_ledger, plan_case_a, plan_case_b, AddressingPlan,
    CaseATargets, PairBeamTemplate, PlannerConfig,
};
use crate::report::{Cell, OutputFormat, Provenance, Report, Table};
use crate::stark::{required_power, zeeman_at_wavelength, zeeman_optimum, BeamPlacement, ShiftMode, StarkProfile, StarkResponse};
use crate::sweep::{run_sweep, Scenario, Spacing, SweepSpec, SweepVariable, TargetSplitting};

pub const DEFAULT_SPECIES: &str = "Ca40+";
pub const DEFAULT_OMEGA_Z_MHZ: f64 = 1.0;
pub const DEFAULT_WAIST_UM: f64 = 30.0;
pub const DEFAULT_WAVELENGTH_NM: f64 = 1064.0;
pub const DEFAULT_GAMMA_RES_HZ: f64 = 1e3;
pub const DEFAULT_PROBE_NM: f64 = 729.0;
pub const DEFAULT_PULSE_US: f64 = 10.0;
pub const DEFAULT_MAX_POWER_W: f64 = 10.0;

#[derive(Debug, Parser)]
#[command(name = "acstark", version, about = "Ac Stark shift addressing design for trapped-ion chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium positions and axial normal modes
    Chain(ChainArgs),
    /// Required power and scattering over a range of one parameter
    Sweep(SweepArgs),
    /// Individual-addressing plan with mechanical and phase checks
    Address(AddressArgs),
    /// Beam giving two ions a shared resonance
    Pair(PairArgs),
    /// Optimum Stark beam for a ground-state Zeeman qubit
    Zeeman(ZeemanArgs),
    /// Inspect species data
    #[command(subcommand)]
    Species(SpeciesCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementArg {
    HalfWaist,
    Optimal,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizationArg {
    Pi,
    SigmaPlus,
    SigmaMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum CaseArg {
    #[value(name = "A", alias = "a")]
    #[serde(alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    #[serde(alias = "b")]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetsArg {
    Carrier,
    CarrierAndSidebands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarArg {
    /// nm
    Wavelength,
    /// um
    Waist,
    /// MHz
    OmegaZ,
    /// um
    Offset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingArg {
    Linear,
    Log,
}

/// Flags shared by the physics commands.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Species name (built-in or from --species-file)
    #[arg(long)]
    pub species: Option<String>,
    /// TOML species data file
    #[arg(long)]
    pub species_file: Option<PathBuf>,
    /// Axial trap frequency wz / 2 pi, MHz
    #[arg(long)]
    pub omega_z_mhz: Option<f64>,
    /// Number of ions
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub waist_um: Option<f64>,
    #[arg(long)]
    pub wavelength_nm: Option<f64>,
    /// half-hbar-omega, hbar-omega:F or joules:X
    #[arg(long)]
    pub target_e: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Addressing-laser resolution gamma_res / 2 pi, Hz
    #[arg(long)]
    pub gamma_res_hz: Option<f64>,
    #[arg(long, value_enum)]
    pub placement: Option<PlacementArg>,
    /// Beam offset for --placement fixed, um
    #[arg(long, allow_hyphen_values = true)]
    pub offset_um: Option<f64>,
    #[arg(long, value_enum)]
    pub polarization: Option<PolarizationArg>,
    #[arg(long)]
    pub rise_time_us: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// TOML scenario file; flags override its values
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Record the run time in the provenance block
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Swept quantity; range units are nm, um, MHz and um respectively
    #[arg(long, value_enum)]
    pub var: Option<VarArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
}

#[derive(Debug, Clone, Args)]
pub struct AddressArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Target transitions kept resolved in case A
    #[arg(long, value_enum)]
    pub targets: Option<TargetsArg>,
    /// Addressing (probe) wavelength for Lamb-Dicke factors, nm
    #[arg(long)]
    pub probe_nm: Option<f64>,
    #[arg(long)]
    pub thermal_n: Option<u32>,
    /// Stark pulse length for the phase ledger, us
    #[arg(long)]
    pub pulse_us: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// The two ions (1-based)
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pub ions: Option<Vec<usize>>,
    #[arg(long)]
    pub max_power_w: Option<f64>,
    #[arg(long)]
    pub waist_min_um: Option<f64>,
    #[arg(long)]
    pub waist_max_um: Option<f64>,
    #[arg(long)]
    pub waist_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ZeemanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum SpeciesCommand {
    /// List built-in species, or those in a file
    List {
        #[arg(long)]
        species_file: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Load and validate a species data file
    Validate {
        path: PathBuf,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
}

/// Scenario file contents: the same keys as the flags, in snake case.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub species: Option<String>,
    pub species_file: Option<PathBuf>,
    pub omega_z_mhz: Option<f64>,
    pub n: Option<usize>,
    pub waist_um: Option<f64>,
    pub wavelength_nm: Option<f64>,
    pub target_e: Option<String>,
    pub mode: Option<ModeArg>,
    pub gamma_res_hz: Option<f64>,
    pub placement: Option<PlacementArg>,
    pub offset_um: Option<f64>,
    pub polarization: Option<PolarizationArg>,
    pub rise_time_us: Option<f64>,
    pub format: Option<OutputFormat>,
    pub var: Option<VarArg>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<SpacingArg>,
    pub case: Option<CaseArg>,
    pub targets: Option<TargetsArg>,
    pub probe_nm: Option<f64>,
    pub thermal_n: Option<u32>,
    pub pulse_us: Option<f64>,
    pub ions: Option<Vec<usize>>,
    pub max_power_w: Option<f64>,
    pub waist_min_um: Option<f64>,
    pub waist_max_um: Option<f64>,
    pub waist_steps: Option<usize>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut file: ScenarioFile = toml::from_str(&text).map_err(|e| Error::Parse {
            key: path.display().to_string(),
            message: e.message().to_string(),
        })?;
        // species files named in a scenario are relative to the scenario
        if let (Some(sf), Some(dir)) = (&file.species_file, path.parent()) {
            if sf.is_relative() {
                file.species_file = Some(dir.join(sf));
            }
        }
        Ok(file)
    }
}

macro_rules! overlay {
    ($flags:expr, $file:expr; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.clone(); } )*
    };
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Validation(format!("{name} must be positive (got {value})")))
    }
}

impl CommonArgs {
    fn merged(mut self, file: &ScenarioFile) -> Self {
        overlay!(self, file; species, species_file, omega_z_mhz, n, waist_um, wavelength_nm, target_e, mode,
            gamma_res_hz, placement, offset_um, polarization, rise_time_us, format);
        self
    }

    fn file(&self) -> Result<ScenarioFile> {
        self.scenario.as_deref().map(ScenarioFile::load).transpose().map(Option::unwrap_or_default)
    }

    pub fn species(&self) -> Result<IonSpecies> {
        let name = self.species.as_deref();
        match &self.species_file {
            Some(path) => {
                let all = load_species_file(path)?;
                match name {
                    None if all.len() == 1 => Ok(all.into_iter().next().expect("one species")),
                    None => Err(Error::Validation(format!(
                        "{} holds {} species; choose one with --species",
                        path.display(),
                        all.len()
                    ))),
                    Some(n) => {
                        let available = all.iter().map(|s| s.name.clone()).collect();
                        all.into_iter()
                            .find(|s| s.name.eq_ignore_ascii_case(n))
                            .ok_or(Error::NotFound { name: n.into(), available })
                    }
                }
            }
            None => builtin_species(name.unwrap_or(DEFAULT_SPECIES)),
        }
    }

    fn scenario(&self, species: IonSpecies, default_wavelength_nm: f64) -> Result<Scenario> {
        let omega_z = angular(positive("omega-z-mhz", self.omega_z_mhz.unwrap_or(DEFAULT_OMEGA_Z_MHZ))? * 1e6);
        let n = self.n.unwrap_or(2);
        let waist = positive("waist-um", self.waist_um.unwrap_or(DEFAULT_WAIST_UM))? * 1e-6;
        let wavelength = positive("wavelength-nm", self.wavelength_nm.unwrap_or(default_wavelength_nm))? * 1e-9;
        let mut s = Scenario::new(species, omega_z, n, waist, wavelength);
        if let Some(t) = &self.target_e {
            s.target = t.parse::<TargetSplitting>()?;
        }
        if let Some(m) = self.mode {
            s.mode = match m {
                ModeArg::Coarse => ShiftMode::Coarse,
                ModeArg::Fine => ShiftMode::Fine,
            };
        }
        s.placement = match (self.placement, self.offset_um) {
            (Some(PlacementArg::HalfWaist), _) => BeamPlacement::HalfWaist,
            (Some(PlacementArg::Optimal), _) => BeamPlacement::Optimal,
            (Some(PlacementArg::Fixed), Some(o)) | (None, Some(o)) => BeamPlacement::Fixed(o * 1e-6),
            (Some(PlacementArg::Fixed), None) => {
                return Err(Error::Validation("--placement fixed needs --offset-um".into()))
            }
            (None, None) => BeamPlacement::Optimal,
        };
        if let Some(p) = self.polarization {
            s.polarization = match p {
                PolarizationArg::Pi => Polarization::LinearPi,
                PolarizationArg::SigmaPlus => Polarization::SigmaPlus,
                PolarizationArg::SigmaMinus => Polarization::SigmaMinus,
            };
        }
        s.rise_time = self.rise_time_us.map_or(Ok(DEFAULT_RISE_TIME), |t| positive("rise-time-us", t).map(|t| t * 1e-6))?;
        Ok(s)
    }

    fn gamma_res(&self) -> Result<f64> {
        Ok(angular(positive("gamma-res-hz", self.gamma_res_hz.unwrap_or(DEFAULT_GAMMA_RES_HZ))?))
    }

    fn provenance(&self, species: &IonSpecies) -> Provenance {
        let p = Provenance::new(&[species]);
        if self.stamp {
            p.stamped()
        } else {
            p
        }
    }
}

fn echo_scenario(report: &mut Report, s: &Scenario) {
    report.echo("species", s.species.name.as_str());
    report.echo("n_ions", s.n_ions);
    report.echo("omega_z_rad_s", Cell::num(s.omega_z));
    report.echo("waist_m", Cell::num(s.waist));
    report.echo("wavelength_m", Cell::num(s.wavelength));
    report.echo("target_e_J", Cell::num(s.target_e()));
    report.echo("mode", format!("{:?}", s.mode).to_lowercase());
    report.echo(
        "placement",
        match s.placement {
            BeamPlacement::HalfWaist => "half_waist".to_string(),
            BeamPlacement::Optimal => "optimal".to_string(),
            BeamPlacement::Fixed(o) => format!("fixed:{o}"),
        },
    );
    report.echo("polarization", s.polarization.name());
    report.echo("rise_time_s", Cell::num(s.rise_time));
}

fn chain_tables(report: &mut Report, g: &ChainGeometry) {
    let mut positions = Table::new("positions", &["ion", "z_m"]);
    for (i, z) in g.positions.iter().enumerate() {
        positions.push(vec![(i + 1).into(), Cell::num(*z)]);
    }
    let mut modes = Table::new("modes", &["mode", "frequency_rad_s", "frequency_over_omega_z"]);
    for (k, f) in g.mode_frequencies.iter().enumerate() {
        modes.push(vec![(k + 1).into(), Cell::num(*f), Cell::num(f / g.omega_z())]);
    }
    let summary = Table::key_values(
        "chain",
        vec![
            ("delta_z_m", Cell::opt(g.min_spacing)),
            ("sigma_z_m", Cell::num(g.sigma_z)),
            ("length_scale_m", Cell::num(g.trap.length_scale())),
            ("residual", Cell::num(g.residual)),
        ],
    );
    report.tables.extend([summary, positions, modes]);
    report.warn_all(g.warnings.iter().cloned());
}

pub fn cmd_chain(args: ChainArgs) -> Result<(Report, i32)> {
    let file = args.common.file()?;
    let common = args.common.merged(&file);
    let species = common.species()?;
    let scenario = common.scenario(species, DEFAULT_WAVELENGTH_NM)?;
    let g = scenario.geometry()?;
    let mut report = Report::new("chain", common.provenance(&scenario.species));
    report.echo("species", scenario.species.name.as_str());
    report.echo("n_ions", scenario.n_ions);
    report.echo("omega_z_rad_s", Cell::num(scenario.omega_z));
    chain_tables(&mut report, &g);
    Ok((report, 0))
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(Report, i32)> {
    let file = args.common.file()?;
    let common = args.common.clone().merged(&file);
    let species = common.species()?;
    let scenario = common.scenario(species, DEFAULT_WAVELENGTH_NM)?;
    let var = args.var.or(file.var).unwrap_or(VarArg::Wavelength);
    let (variable, unit) = match var {
        VarArg::Wavelength => (SweepVariable::Wavelength, 1e-9),
        VarArg::Waist => (SweepVariable::Waist, 1e-6),
        VarArg::OmegaZ => (SweepVariable::OmegaZ, 2.0 * PI * 1e6),
        VarArg::Offset => (SweepVariable::Offset, 1e-6),
    };
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Validation(format!("sweep needs --{name}")));
    let spec = SweepSpec {
        variable,
        min: need(args.min.or(file.min), "min")? * unit,
        max: need(args.max.or(file.max), "max")? * unit,
        points: args.points.or(file.points).unwrap_or(50),
        spacing: match args.spacing.or(file.spacing).unwrap_or(SpacingArg::Linear) {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        },
        scenario,
    };
    let rows = run_sweep(&spec)?;
    let mut report = Report::new("sweep", common.provenance(&spec.scenario.species));
    echo_scenario(&mut report, &spec.scenario);
    report.echo("variable", spec.variable.name());
    report.echo("min_si", Cell::num(spec.min));
    report.echo("max_si", Cell::num(spec.max));
    report.echo("points", spec.points);
    let mut table = Table::new(
        "sweep",
        &[
            "index",
            "value_si",
            "wavelength_m",
            "waist_m",
            "omega_z_rad_s",
            "offset_m",
            "power_W",
            "scatter_Hz",
            "coherence_time_s",
            "kappa",
            "psi_rad_s_per_W_m2",
            "gap",
        ],
    );
    for r in &rows {
        table.push(vec![
            r.index.into(),
            Cell::num(r.value),
            Cell::num(r.wavelength),
            Cell::num(r.waist),
            Cell::num(r.omega_z),
            Cell::opt(r.offset),
            Cell::opt(r.power),
            Cell::opt(r.total_scatter),
            Cell::opt(r.coherence_time),
            Cell::opt(r.kappa),
            Cell::opt(r.psi),
            r.gap.is_some().into(),
        ]);
        report.warn_all(r.warnings.iter().cloned());
    }
    report.tables.push(table);
    let gaps = rows.iter().filter(|r| r.gap.is_some()).count();
    report.verdict("complete", gaps == 0, format!("{} of {} points evaluated", rows.len() - gaps, rows.len()));
    Ok((report, 0))
}

fn ion_table(profile: &StarkProfile, g: &ChainGeometry, margins: Option<&[f64]>) -> Table {
    let mut t = Table::new("ions", &["ion", "z_m", "intensity_W_m2", "shift_rad_s", "scatter_Hz", "margin_rad_s"]);
    for i in 0..profile.n_ions() {
        t.push(vec![
            (i + 1).into(),
            Cell::num(g.positions[i]),
            Cell::num(profile.intensities[i]),
            Cell::num(profile.per_ion_shift[i]),
            Cell::num(profile.per_ion_scatter[i]),
            margins.map_or(Cell::Empty, |m| Cell::num(m[i])),
        ]);
    }
    t
}

fn plan_table(plan: &AddressingPlan, profile: &StarkProfile) -> Table {
    Table::key_values(
        "plan",
        vec![
            ("regime", Cell::text(format!("{:?}", plan.regime))),
            ("gamma_res_rad_s", Cell::num(plan.gamma_res)),
            ("selectivity_margin_rad_s", Cell::num(plan.selectivity_margin)),
            ("crosstalk_bound", Cell::num(plan.crosstalk_bound)),
            ("mode_collisions", plan.mode_collision_flags.len().into()),
            ("feasible", plan.feasible.into()),
            ("total_scatter_Hz", Cell::num(profile.total_scatter)),
            ("coherence_time_s", Cell::num(profile.coherence_time)),
        ],
    )
}

fn collision_warnings(collisions: &[crate::planner::ModeCollision]) -> Vec<String> {
    collisions
        .iter()
        .map(|c| {
            format!(
                "mode collision: |E_{},{}|/hbar = {:.6e} rad/s is within the collision window of mode {} ({:.6e} rad/s)",
                c.ions.0 + 1,
                c.ions.1 + 1,
                c.splitting,
                c.mode_index + 1,
                c.mode_frequency
            )
        })
        .collect()
}

fn response_table(response: &StarkResponse) -> Table {
    let mut t = Table::new(
        "lines",
        &["line", "omega_rad_s", "gamma_rad_s", "weight", "shift_rad_s_per_W_m2", "scatter_Hz_per_W_m2"],
    );
    for c in &response.per_line_contributions {
        t.push(vec![
            Cell::text(c.label.clone()),
            Cell::num(c.omega),
            Cell::num(c.gamma),
            Cell::num(c.weight),
            Cell::num(c.shift_coefficient),
            Cell::num(c.scatter_coefficient),
        ]);
    }
    t
}

fn require_optical(species: &IonSpecies) -> Result<()> {
    if species.qubit_kind != QubitKind::OpticalSd {
        return Err(Error::Configuration(format!(
            "{} is configured as a Zeeman qubit; use the zeeman command",
            species.name
        )));
    }
    Ok(())
}

pub fn cmd_address(args: AddressArgs) -> Result<(Report, i32)> {
    let file = args.common.file()?;
    let common = args.common.clone().merged(&file);
    let species = common.species()?;
    require_optical(&species)?;
    let scenario = common.scenario(species, DEFAULT_WAVELENGTH_NM)?;
    let gamma_res = common.gamma_res()?;
    let case = args.case.or(file.case).unwrap_or(CaseArg::A);
    let probe = positive("probe-nm", args.probe_nm.or(file.probe_nm).unwrap_or(DEFAULT_PROBE_NM))? * 1e-9;
    let pulse = args.pulse_us.or(file.pulse_us).unwrap_or(DEFAULT_PULSE_US) * 1e-6;
    let config = PlannerConfig {
        thermal_n: args.thermal_n.or(file.thermal_n).unwrap_or(0),
        case_a_targets: match args.targets.or(file.targets).unwrap_or(TargetsArg::Carrier) {
            TargetsArg::Carrier => CaseATargets::CarrierOnly,
            TargetsArg::CarrierAndSidebands => CaseATargets::CarrierAndSidebands,
        },
        ..PlannerConfig::default()
    };

    let g = scenario.geometry()?;
    if g.n_ions() < 2 {
        return Err(Error::Configuration("addressing needs at least two ions".into()));
    }
    let solution = required_power(
        &scenario.species,
        &g,
        scenario.waist,
        scenario.wavelength,
        scenario.target_e(),
        scenario.mode,
        scenario.placement,
        scenario.polarization,
    )?;
    let beam = solution.beam.clone().with_rise_time(scenario.rise_time);
    let profile = &solution.profile;

    let mut report = Report::new("address", common.provenance(&scenario.species));
    echo_scenario(&mut report, &scenario);
    report.echo("case", format!("{case:?}"));
    report.echo("gamma_res_rad_s", Cell::num(gamma_res));
    report.echo("probe_wavelength_m", Cell::num(probe));
    report.echo("pulse_s", Cell::num(pulse));
    report.tables.push(Table::key_values(
        "beam",
        vec![
            ("offset_m", Cell::num(beam.center_offset)),
            ("power_W", Cell::num(solution.power)),
            ("peak_intensity_W_m2", Cell::num(solution.peak_intensity)),
            ("psi_rad_s_per_W_m2", Cell::num(solution.response.psi)),
            ("kappa", Cell::num(solution.kappa)),
            ("upshifted_ion", (solution.upshifted_ion + 1).into()),
        ],
    ));
    report.warn_all(profile.warnings.iter().cloned());

    let planned = match case {
        CaseArg::A => plan_case_a(profile, &g, gamma_res, &config),
        CaseArg::B => {
            let early = mode_collisions(&profile.per_ion_shift, &g.mode_frequencies, config.collision_factor * gamma_res);
            report.warn_all(collision_warnings(&early));
            plan_case_b(profile, &g, gamma_res, 2.0 * PI / probe, &config)
        }
    };
    let mut code = 0;
    match planned {
        Ok(plan) => {
            report.tables.push(ion_table(profile, &g, Some(&plan.per_ion_margin)));
            report.tables.push(plan_table(&plan, profile));
            report.warn_all(collision_warnings(&plan.mode_collision_flags));
            report.warn_all(plan.warnings.iter().cloned());
            let required = config.feasibility_factor * gamma_res;
            report.verdict(
                "addressing",
                plan.feasible,
                format!(
                    "margin {:.6e} rad/s against required {:.6e} rad/s, {} mode collisions",
                    plan.selectivity_margin,
                    required,
                    plan.mode_collision_flags.len()
                ),
            );
            if !plan.feasible {
                code = 2;
            }
        }
        Err(e @ (Error::Regime(_) | Error::LambDicke { .. })) => {
            report.tables.push(ion_table(profile, &g, None));
            report.warn_all([e.to_string()]);
            report.verdict("addressing", false, e.to_string());
            code = 2;
        }
        Err(e) => return Err(e),
    }

    let mech = mechanical_check(profile, &g, &beam)?;
    report.tables.push(Table::key_values(
        "mechanical",
        vec![
            ("f_grad_N", Cell::num(mech.f_grad)),
            ("f_grad_exact_N", Cell::num(mech.f_grad_exact)),
            ("trap_force_N", Cell::num(mech.trap_force)),
            ("force_ratio", Cell::num(mech.force_ratio)),
            ("delta_z_shift_m", Cell::num(mech.delta_z_shift)),
            ("spread_ratio", Cell::num(mech.spread_ratio)),
            ("min_rise_time_s", Cell::num(mech.min_rise_time)),
            ("rise_time_s", Cell::num(mech.rise_time)),
        ],
    ));
    report.verdict(
        "mechanical",
        mech.pass,
        format!("force ratio {:.3e}, spread ratio {:.3e}, min rise time {:.3e} s", mech.force_ratio, mech.spread_ratio, mech.min_rise_time),
    );

    let ledger = phase_ledger(profile, pulse)?;
    let mut phases = Table::new("phases", &["ion", "phase_rad", "phase_wrapped_rad"]);
    for i in 0..ledger.per_ion_phase.len() {
        phases.push(vec![(i + 1).into(), Cell::num(ledger.per_ion_phase[i]), Cell::num(ledger.per_ion_phase_wrapped[i])]);
    }
    report.tables.push(phases);
    Ok((report, code))
}

pub fn cmd_pair(args: PairArgs) -> Result<(Report, i32)> {
    let file = args.common.file()?;
    let common = args.common.clone().merged(&file);
    let species = common.species()?;
    require_optical(&species)?;
    let scenario = common.scenario(species, DEFAULT_WAVELENGTH_NM)?;
    let gamma_res = common.gamma_res()?;
    let ions = args.ions.or(file.ions).ok_or_else(|| Error::Validation("pair needs --ions I J".into()))?;
    let (i, j) = match ions.as_slice() {
        [i, j] if *i >= 1 && *j >= 1 => (i - 1, j - 1),
        _ => return Err(Error::Validation("--ions takes two 1-based ion indices".into())),
    };
    let waist_min = args.waist_min_um.or(file.waist_min_um).map_or(scenario.waist, |w| w * 1e-6);
    let waist_max = args.waist_max_um.or(file.waist_max_um).map_or(waist_min.max(scenario.waist), |w| w * 1e-6);
    let template = PairBeamTemplate {
        wavelength: scenario.wavelength,
        waist_min: positive("waist-min-um", waist_min)?,
        waist_max: positive("waist-max-um", waist_max)?,
        waist_steps: args.waist_steps.or(file.waist_steps).unwrap_or(if waist_max > waist_min { 25 } else { 1 }),
        max_power: positive("max-power-w", args.max_power_w.or(file.max_power_w).unwrap_or(DEFAULT_MAX_POWER_W))?,
        polarization: scenario.polarization,
        rise_time: scenario.rise_time,
    };
    let g = scenario.geometry()?;
    let config = PlannerConfig::default();
    let pair = pair_gate_plan(&g, &scenario.species, &template, i, j, gamma_res, scenario.mode, &config)?;

    let mut report = Report::new("pair", common.provenance(&scenario.species));
    echo_scenario(&mut report, &scenario);
    report.echo("ions", format!("{} {}", i + 1, j + 1));
    report.echo("gamma_res_rad_s", Cell::num(gamma_res));
    report.echo("max_power_W", Cell::num(template.max_power));
    report.tables.push(Table::key_values(
        "beam",
        vec![
            ("offset_m", Cell::num(pair.beam.center_offset)),
            ("waist_m", Cell::num(pair.beam.waist)),
            ("power_W", Cell::num(pair.beam.power())),
            ("peak_intensity_W_m2", Cell::num(pair.beam.peak_intensity())),
        ],
    ));
    report.tables.push(ion_table(&pair.profile, &g, Some(&pair.plan.per_ion_margin)));
    report.tables.push(plan_table(&pair.plan, &pair.profile));
    report.warn_all(collision_warnings(&pair.plan.mode_collision_flags));
    report.warn_all(pair.plan.warnings.iter().cloned());
    report.verdict(
        "pair",
        pair.plan.feasible,
        format!("separation {:.6e} rad/s from the other ions", pair.plan.selectivity_margin),
    );
    Ok((report, if pair.plan.feasible { 0 } else { 2 }))
}

pub fn cmd_zeeman(args: ZeemanArgs) -> Result<(Report, i32)> {
    let file = args.common.file()?;
    let common = args.common.clone().merged(&file);
    let species = common.species()?.with_qubit_kind(QubitKind::ZeemanGround)?;
    let fixed_wavelength = common.wavelength_nm;
    // the wavelength is optimized unless given explicitly
    let scenario = common.scenario(species, DEFAULT_WAVELENGTH_NM)?;
    let g = scenario.geometry()?;
    let result = match fixed_wavelength {
        Some(nm) => zeeman_at_wavelength(
            &scenario.species,
            &g,
            scenario.waist,
            nm * 1e-9,
            scenario.target_e(),
            scenario.polarization,
            scenario.placement,
        )?,
        None => zeeman_optimum(&scenario.species, &g, scenario.waist, scenario.target_e(), scenario.polarization, scenario.placement)?,
    };
    let mut report = Report::new("zeeman", common.provenance(&scenario.species));
    report.echo("species", scenario.species.name.as_str());
    report.echo("n_ions", scenario.n_ions);
    report.echo("omega_z_rad_s", Cell::num(scenario.omega_z));
    report.echo("waist_m", Cell::num(scenario.waist));
    report.echo("target_e_J", Cell::num(scenario.target_e()));
    report.echo("polarization", scenario.polarization.name());
    report.echo("wavelength", if fixed_wavelength.is_some() { "fixed" } else { "optimized" });
    report.tables.push(Table::key_values(
        "zeeman",
        vec![
            ("wavelength_m", Cell::num(result.wavelength)),
            ("power_W", Cell::num(result.power)),
            ("scatter_Hz", Cell::num(result.total_scatter)),
            ("coherence_time_s", Cell::num(result.profile.coherence_time)),
            ("psi_rad_s_per_W_m2", Cell::num(result.response.psi)),
            ("offset_m", Cell::num(result.beam.center_offset)),
        ],
    ));
    report.tables.push(ion_table(&result.profile, &g, None));
    report.tables.push(response_table(&result.response));
    report.warn_all(result.profile.warnings.iter().cloned());
    Ok((report, 0))
}

fn species_table(all: &[IonSpecies]) -> Table {
    let mut t = Table::new("species", &["name", "mass_amu", "qubit_kind", "lines", "series_truncation", "d52_lifetime_s"]);
    for s in all {
        t.push(vec![
            Cell::text(s.name.clone()),
            Cell::num(s.mass_amu),
            Cell::text(match s.qubit_kind {
                QubitKind::OpticalSd => "optical_SD",
                QubitKind::ZeemanGround => "zeeman_ground",
            }),
            s.transitions.len().into(),
            s.series_truncation.map_or(Cell::Empty, |n| (n as usize).into()),
            Cell::opt(s.d52_lifetime),
        ]);
    }
    t
}

pub fn cmd_species(cmd: SpeciesCommand) -> Result<(Report, i32, OutputFormat)> {
    match cmd {
        SpeciesCommand::List { species_file, format } => {
            let all = match &species_file {
                Some(p) => load_species_file(p)?,
                None => builtin_species_all(),
            };
            let refs: Vec<&IonSpecies> = all.iter().collect();
            let mut report = Report::new("species list", Provenance::new(&refs));
            report.echo("source", species_file.map_or("built-in".to_string(), |p| p.display().to_string()));
            report.tables.push(species_table(&all));
            Ok((report, 0, format.unwrap_or_default()))
        }
        SpeciesCommand::Validate { path, format } => {
            let all = load_species_file(&path)?;
            let refs: Vec<&IonSpecies> = all.iter().collect();
            let mut report = Report::new("species validate", Provenance::new(&refs));
            report.echo("source", path.display().to_string());
            report.tables.push(species_table(&all));
            report.verdict("valid", true, format!("{} species loaded", all.len()));
            Ok((report, 0, format.unwrap_or_default()))
        }
    }
}

/// Run one parsed command, returning the report, exit code and format.
pub fn execute(cli: Cli) -> Result<(Report, i32, OutputFormat)> {
    let with_format = |common: &CommonArgs, r: Result<(Report, i32)>| -> Result<(Report, i32, OutputFormat)> {
        let file_format = common.file().ok().and_then(|f| f.format);
        let (report, code) = r?;
        Ok((report, code, common.format.or(file_format).unwrap_or_default()))
    };
    match cli.command {
        Command::Chain(a) => {
            let c = a.common.clone();
            with_format(&c, cmd_chain(a))
        }
        Command::Sweep(a) => {
            let c = a.common.clone();
            with_format(&c, cmd_sweep(a))
        }
        Command::Address(a) => {
            let c = a.common.clone();
            with_format(&c, cmd_address(a))
        }
        Command::Pair(a) => {
            let c = a.common.clone();
            with_format(&c, cmd_pair(a))
        }
        Command::Zeeman(a) => {
            let c = a.common.clone();
            with_format(&c, cmd_zeeman(a))
        }
        Command::Species(s) => cmd_species(s),
    }
}

/// Parse arguments, run, and write the report; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli).and_then(|(report, code, format)| report.render(format).map(|text| (text, code))) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Names accepted by `--species` without a data file.
pub fn available_species() -> Vec<String> {
    builtin_names()
}
