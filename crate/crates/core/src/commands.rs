//! Command-line front end. Every subcommand reads JSON (or plain arguments),
//! runs one library operation and emits a JSON report that embeds an
//! [`ExperimentManifest`]. Reports contain no timing data, so identical
//! manifests give byte-identical output.
//!
//! Exit codes: 0 clean, 1 property violation, 2 usage or I/O error,
//! 3 budget exhausted or search inconclusive.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::axioms::ideal_axioms_check;
use crate::coloring::PartialColoring;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::ideal::{IdealSpec, RadiusFn};
use crate::join::{check_join, check_local, derived_join_from_local, JoinFn};
use crate::oracle::{self, Outcome};
use crate::packing::{self, RadiusSeq};
use crate::radius::Radius;
use crate::reduction::{soundness_check, SoundnessBounds};
use crate::sim::{self, patterns::extract_patterns, sparse, SimulationConfig};

#[derive(Clone, Debug, Parser, Serialize)]
#[command(
    name = "shiftcolor",
    version,
    about = "Colorings of shift actions on finite windows"
)]
pub struct Cli {
    /// Seed for every random choice; overrides the seed inside config files.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Work budget; its unit depends on the subcommand.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    IdealAxioms,
    Local,
    Join,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// List `Ball(center, r)` in canonical order.
    Ball {
        group: String,
        radius: String,
        /// Lattice points as `x` or `x,y,...`; free-group words over `abAB...`.
        #[arg(long)]
        center: Option<String>,
    },
    /// Minimal packing radii `d_0 < ... < d_C`. Budget: largest radius tried.
    Dseq { group: String, count: usize },
    /// Minimal annulus radius for `d`. Budget: largest radius tried.
    Annulus { group: String, d: String },
    /// Test an ideal spec. Budget: patterns for `local`; samples otherwise.
    Check {
        spec: PathBuf,
        #[arg(long, value_enum)]
        mode: CheckMode,
        /// Join radius as JSON; defaults to the spec's, then to the locality radius.
        #[arg(long)]
        join: Option<String>,
        #[arg(long, default_value_t = 4)]
        tuple_max: usize,
    },
    /// Build the product-coded local ideal and check it exhaustively.
    Reduce {
        spec: PathBuf,
        #[arg(long)]
        join: Option<String>,
        #[arg(long, default_value_t = 3)]
        ball_radius: u64,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        h_max: u32,
        #[arg(long, default_value_t = 2)]
        c_max: u32,
    },
    /// Run the randomized greedy procedure from a config file.
    Simulate {
        config: PathBuf,
        /// Include every step and the final coloring.
        #[arg(long)]
        dump: bool,
    },
    /// Sparse coloring from greedy colorings of distance graphs.
    Sparse {
        group: String,
        /// Comma-separated radii.
        #[arg(long)]
        d: String,
        #[arg(long)]
        window: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dump: bool,
    },
    /// Exhaustive search over colorings of `Ball(1, d_c)`. Budget: assignments.
    VerifyInfty {
        group: String,
        #[arg(long)]
        d: String,
        #[arg(long)]
        c: usize,
    },
    /// Search for an extension of a coloring to its `rho`-neighborhood.
    /// Budget: assignments.
    OracleExtend {
        spec: PathBuf,
        /// JSON file holding the partial coloring.
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        palette_max: u32,
    },
    /// Count shift-normalized patterns of a coloring.
    Extract {
        coloring: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 1)]
        min_occurrences: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Dseq { .. } => "dseq",
            Command::Annulus { .. } => "annulus",
            Command::Check { .. } => "check",
            Command::Reduce { .. } => "reduce",
            Command::Simulate { .. } => "simulate",
            Command::Sparse { .. } => "sparse",
            Command::VerifyInfty { .. } => "verify-infty",
            Command::OracleExtend { .. } => "oracle-extend",
            Command::Extract { .. } => "extract",
        }
    }

    fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Command::Check { spec, .. } | Command::Reduce { spec, .. } => vec![spec.clone()],
            Command::Simulate { config, .. } => vec![config.clone()],
            Command::OracleExtend { spec, phi, .. } => vec![spec.clone(), phi.clone()],
            Command::Extract { coloring, .. } => vec![coloring.clone()],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub seed: u64,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
    pub tool_version: String,
    /// SHA-256 over the arguments and the contents of every input file.
    pub config_hash: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Violation,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Clean => 0,
            Verdict::Violation => 1,
            Verdict::Inconclusive => 3,
        }
    }

    fn from_clean(clean: bool) -> Self {
        if clean {
            Verdict::Clean
        } else {
            Verdict::Violation
        }
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => 3,
        _ => 2,
    }
}

pub fn parse_element(group: &Group, s: &str) -> Result<Element> {
    let s = s.trim();
    let g = match group {
        Group::Lattice { .. } => {
            let body = s.trim_start_matches('(').trim_end_matches(')');
            let v = body
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("invalid lattice point {s:?}: {e}")))?;
            Element::Lattice(v)
        }
        Group::Free { .. } if s == "1" || s.is_empty() => Element::Word(Vec::new()),
        Group::Free { .. } => Element::word(s)?,
    };
    group.check(&g)?;
    Ok(g)
}

pub fn parse_radius_list(s: &str) -> Result<RadiusSeq> {
    s.split(',')
        .map(|x| Radius::from_str(x.trim()))
        .collect::<Result<Vec<_>>>()
        .map(RadiusSeq)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_join(s: &str) -> Result<JoinFn> {
    Ok(serde_json::from_str(s)?)
}

fn join_for(spec: &IdealSpec, given: &Option<String>) -> Result<JoinFn> {
    if let Some(s) = given {
        return parse_join(s);
    }
    if let Some(j) = &spec.join {
        return Ok(j.clone());
    }
    spec.locality_fn()
        .map(derived_join_from_local)
        .ok_or_else(|| {
            Error::Config("no join radius given and the ideal has no locality radius".into())
        })
}

fn locality_for(spec: &IdealSpec) -> Result<RadiusFn> {
    spec.locality_fn()
        .ok_or_else(|| Error::Config("the ideal has no finite locality radius".into()))
}

fn manifest(cli: &Cli, seed: u64) -> Result<ExperimentManifest> {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(&json!({
        "command": &cli.command,
        "seed": seed,
        "budget": cli.budget,
    }))?);
    for p in cli.command.inputs() {
        let bytes = fs::read(&p)?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(ExperimentManifest {
        command: cli.command.name().to_string(),
        inputs: cli.command.inputs(),
        seed,
        budget: cli.budget,
        out: cli.out.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: format!("{:x}", hasher.finalize()),
    })
}

fn outcome_verdict(o: Outcome, verified: Option<bool>) -> Verdict {
    match o {
        Outcome::Inconclusive => Verdict::Inconclusive,
        _ if verified == Some(false) => Verdict::Violation,
        _ => Verdict::Clean,
    }
}

fn run_command(cli: &Cli, seed: u64) -> Result<(Value, Verdict)> {
    let budget = cli.budget;
    let out = match &cli.command {
        Command::Ball {
            group,
            radius,
            center,
        } => {
            let g: Group = group.parse()?;
            let c = match center {
                Some(s) => parse_element(&g, s)?,
                None => g.identity(),
            };
            let pts = g.ball(&c, Radius::from_str(radius)?)?;
            (json!({ "size": pts.len(), "points": pts }), Verdict::Clean)
        }
        Command::Dseq { group, count } => {
            let g: Group = group.parse()?;
            let seq =
                packing::d_sequence(&g, *count, budget.unwrap_or(packing::DEFAULT_RADIUS_BUDGET))?;
            let mut verified = true;
            for w in &seq.witnesses {
                verified &= packing::verify_packing(&g, w)?;
            }
            (
                json!({ "values": seq.values, "witnesses": seq.witnesses, "witnesses_verified": verified }),
                Verdict::from_clean(verified),
            )
        }
        Command::Annulus { group, d } => {
            let g: Group = group.parse()?;
            let (big_d, center) = packing::annulus_d(
                &g,
                Radius::from_str(d)?,
                budget.unwrap_or(packing::DEFAULT_RADIUS_BUDGET),
            )?;
            (json!({ "D": big_d, "center": center }), Verdict::Clean)
        }
        Command::Check {
            spec,
            mode,
            join,
            tuple_max,
        } => {
            let spec: IdealSpec = read_json(spec)?;
            spec.validate()?;
            match mode {
                CheckMode::IdealAxioms => {
                    let r = ideal_axioms_check(&spec, budget.unwrap_or(200) as usize, seed)?;
                    (serde_json::to_value(&r)?, Verdict::from_clean(r.is_clean()))
                }
                CheckMode::Local => {
                    let r = check_local(
                        &spec,
                        &locality_for(&spec)?,
                        budget.unwrap_or(2000) as usize,
                        seed,
                    )?;
                    (serde_json::to_value(&r)?, Verdict::from_clean(r.is_clean()))
                }
                CheckMode::Join => {
                    let j = join_for(&spec, join)?;
                    let r =
                        check_join(&spec, &j, *tuple_max, budget.unwrap_or(500) as usize, seed)?;
                    (
                        json!({ "join": j, "report": serde_json::to_value(&r)? }),
                        Verdict::from_clean(r.is_clean()),
                    )
                }
            }
        }
        Command::Reduce {
            spec,
            join,
            ball_radius,
            max_size,
            h_max,
            c_max,
        } => {
            let base: IdealSpec = read_json(spec)?;
            let j = join_for(&base, join)?;
            let reduced = IdealSpec::reduced(base, j)?;
            let bounds = SoundnessBounds {
                ball_radius: *ball_radius,
                max_size: *max_size,
                h_max: *h_max,
                c_max: *c_max,
                ..Default::default()
            };
            let r = soundness_check(&reduced, bounds)?;
            (
                json!({ "reduced": reduced, "soundness": serde_json::to_value(&r)? }),
                Verdict::from_clean(r.is_clean()),
            )
        }
        Command::Simulate { config, dump } => {
            let mut config: SimulationConfig = read_json(config)?;
            config.seed = seed;
            let trace = sim::run(&config)?;
            let r = locality_for(&config.ideal)?;
            let validation = sim::trace_validate(&trace, &config.ideal, &r)?;
            let conflicts = trace.same_step_conflicts();
            let monotone = trace.is_monotone();
            let clean = monotone && conflicts.is_empty() && validation.is_clean();
            let mut v = json!({
                "config": config,
                "region_size": trace.region_size,
                "interior_size": trace.interior_size,
                "fill": trace.fill_fractions(),
                "final_fill": trace.final_fill(),
                "monotone": monotone,
                "same_step_conflicts": conflicts.len(),
                "validation": serde_json::to_value(&validation)?,
            });
            if *dump {
                v["trace"] = serde_json::to_value(&trace)?;
            }
            (v, Verdict::from_clean(clean))
        }
        Command::Sparse {
            group,
            d,
            window,
            m,
            dump,
        } => {
            let g: Group = group.parse()?;
            let d = parse_radius_list(d)?;
            let run = sparse::sparse_run(&g, &d, *window, *m, seed)?;
            let violations = sparse::separation_violations(&run.coloring, &d)?;
            let mut v = json!({
                "window_size": run.window_size,
                "covered": run.covered,
                "coverage": run.coverage,
                "eta_max": run.eta_max,
                "thresholds": run.thresholds,
                "separation_violations": violations.len(),
            });
            if *dump {
                v["coloring"] = serde_json::to_value(&run.coloring)?;
            }
            (v, Verdict::from_clean(violations.is_empty()))
        }
        Command::VerifyInfty { group, d, c } => {
            let g: Group = group.parse()?;
            let d = parse_radius_list(d)?;
            let r = oracle::infty_check(&g, &d, *c, budget.unwrap_or(oracle::DEFAULT_WORK_BUDGET))?;
            let mut v = serde_json::to_value(&r)?;
            if g == (Group::Lattice { dim: 1 }) {
                if let Some((cap, size)) = oracle::z1_counting_bound(&d, *c) {
                    v["counting_bound"] = json!({ "capacity": cap, "ball_size": size });
                }
            }
            // a witness would mean the separation bound is wrong
            let verdict = match r.outcome {
                Outcome::Refuted => Verdict::Clean,
                Outcome::Witness => Verdict::Violation,
                Outcome::Inconclusive => Verdict::Inconclusive,
            };
            (v, verdict)
        }
        Command::OracleExtend {
            spec,
            phi,
            rho,
            palette_max,
        } => {
            let spec: IdealSpec = read_json(spec)?;
            let phi: PartialColoring = read_json(phi)?;
            let r = oracle::extension_oracle(
                &spec,
                &phi,
                Radius::from_str(rho)?,
                *palette_max,
                budget.unwrap_or(oracle::DEFAULT_WORK_BUDGET),
            )?;
            (
                serde_json::to_value(&r)?,
                outcome_verdict(r.outcome, r.witness_verified),
            )
        }
        Command::Extract {
            coloring,
            rho,
            min_occurrences,
        } => {
            let omega: PartialColoring = read_json(coloring)?;
            let pats = extract_patterns(&omega, Radius::from_str(rho)?, *min_occurrences)?;
            (
                json!({ "count": pats.len(), "patterns": pats }),
                Verdict::Clean,
            )
        }
    };
    Ok(out)
}

/// Run a parsed command line and render its report.
pub fn execute(cli: &Cli) -> Result<(String, Verdict)> {
    let seed = match (&cli.command, cli.seed) {
        (_, Some(s)) => s,
        (Command::Simulate { config, .. }, None) => read_json::<SimulationConfig>(config)?.seed,
        _ => 0,
    };
    let (report, verdict) = run_command(cli, seed)?;
    let m = manifest(cli, seed)?;
    let mut text = serde_json::to_string_pretty(&json!({ "manifest": m, "report": report }))?;
    text.push('\n');
    Ok((text, verdict))
}

/// Parse arguments, run, write the report and return the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, verdict)) => {
            let written = match &cli.out {
                Some(p) => fs::write(p, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => verdict.exit_code(),
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
