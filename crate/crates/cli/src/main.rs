//! `glueprint`: distortion invariants of glued 3-manifold descriptions.

mod report;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glueprint_core::gluing_engine::{atoroidal_vertex_bound_check, fiber_matched_ends};
use glueprint_core::rational::parse_rational;
use glueprint_core::seifert_arithmetic::{distortion_budget, enumerate_targets};
use glueprint_core::shearing_enumerator::DEFAULT_CELL_CAP;
use glueprint_core::{
    distortion_report, entire_cover, entire_double_cover, enumerate_gluings, loopless_cover,
    loopless_double_cover, select_component, DominationBudget, Error, ManifoldDocument,
    SeifertInvariants, Q,
};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "glueprint",
    version,
    about = "Exact distortion invariants of glued graph manifolds"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Edge, vertex and primary distortions of a glued document.
    Distortion { file: PathBuf },
    /// Validate a document and report nondegeneracy and boundary-form checks.
    Check { file: PathBuf },
    /// All nondegenerate gluings of a preglue graph below a distortion budget.
    EnumerateGluings {
        file: PathBuf,
        #[arg(long, value_parser = rational)]
        budget: Q,
        /// Maximum number of sweep cells.
        #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
        cap: u64,
    },
    /// Double cover without semi-edges (--entire) or without loops (--loopless).
    Cover {
        file: PathBuf,
        #[arg(
            long,
            conflicts_with = "loopless",
            required_unless_present = "loopless"
        )]
        entire: bool,
        #[arg(long)]
        loopless: bool,
        /// Connected component of the cover to keep (default: the one over copy 0 of the lowest vertex).
        #[arg(long)]
        component: Option<usize>,
        /// Write the cover as a manifold document.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Invariants of the Seifert space (g; b0, b1/a1, ...).
    #[command(allow_negative_numbers = true)]
    Seifert {
        genus: u32,
        b0: i64,
        /// Exceptional fibers as b/a; put negative ones after `--`.
        pairs: Vec<String>,
    },
    /// Candidate Seifert targets of a domination under the budget.
    Targets {
        #[command(flatten)]
        budget: BudgetArgs,
        /// Maximum number of search steps.
        #[arg(long, default_value_t = 10_000_000)]
        limit: u64,
    },
    /// Distortion budget and piece-count bounds.
    Budget {
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Document whose budget section is used as the starting point.
    file: Option<PathBuf>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long, value_parser = rational)]
    eps3: Option<Q>,
    #[arg(long, value_parser = rational)]
    sv_m: Option<Q>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    h1_mod_d: Option<u64>,
    #[arg(long)]
    tor_m: Option<u64>,
    #[arg(long)]
    lens_cap: Option<u64>,
}

fn rational(s: &str) -> Result<Q, String> {
    parse_rational(s).ok_or_else(|| format!("expected a rational p/q, got {s:?}"))
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Resource { .. }) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "{m}"),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ManifoldDocument, Failure> {
    Ok(ManifoldDocument::parse(&read_text(path)?)?)
}

fn budget_from(args: &BudgetArgs) -> Result<DominationBudget, Failure> {
    let mut b = match &args.file {
        Some(p) => load(p)?.budget.unwrap_or_default(),
        None => DominationBudget::default(),
    };
    if let Some(t) = args.t {
        b.t = t;
    }
    if let Some(h) = args.h {
        b.h = h;
    }
    if let Some(e) = &args.eps3 {
        b.eps3 = e.clone();
    }
    if args.sv_m.is_some() {
        b.sv_m = args.sv_m.clone();
    }
    b.d = args.d.or(b.d);
    b.h1_mod_d_order = args.h1_mod_d.or(b.h1_mod_d_order);
    b.tor_m_order = args.tor_m.or(b.tor_m_order);
    b.lens_order_cap = args.lens_cap.or(b.lens_order_cap);
    b.validate().map_err(|e| e.at("budget"))?;
    Ok(b)
}

fn parse_pair(i: usize, s: &str) -> Result<(i64, i64), Failure> {
    let bad = || {
        Error::validation(
            format!("pairs[{i}]"),
            format!("expected b/a with integers, got {s:?}"),
        )
    };
    let (b, a) = s.split_once('/').ok_or_else(bad)?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

struct Output {
    text: String,
    json: Value,
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Distortion { file } => {
            let doc = load(file)?;
            let r = distortion_report(&doc.preglue, doc.require_gluing()?)?;
            let mut text = String::new();
            report::distortion_lines(&r, &mut text, "");
            Ok(Output {
                text,
                json: report::distortion_json(&r),
            })
        }
        Command::Check { file } => {
            let doc = load(file)?;
            let pg = &doc.preglue;
            let matched = doc.gluing.as_ref().map(|phi| fiber_matched_ends(pg, phi));
            let mut atoroidal = Vec::new();
            if let Some(phi) = &doc.gluing {
                for v in pg.graph().vertices() {
                    if !pg.piece(v.id).is_seifert() && pg.graph().valence(v.id) > 0 {
                        atoroidal.push((v.id, atoroidal_vertex_bound_check(pg, phi, v.id)?));
                    }
                }
            }
            let (nv, ne) = (pg.graph().vertices().len(), pg.graph().edges().len());
            Ok(Output {
                text: report::check_text(nv, ne, matched.as_deref(), &atoroidal),
                json: report::check_json(nv, ne, matched.as_deref(), &atoroidal),
            })
        }
        Command::EnumerateGluings { file, budget, cap } => {
            let doc = load(file)?;
            let found = enumerate_gluings(&doc.preglue, budget, *cap)?;
            Ok(Output {
                text: report::enumeration_text(budget, &found),
                json: report::enumeration_json(budget, &found),
            })
        }
        Command::Cover {
            file,
            entire,
            component,
            output,
            ..
        } => {
            let doc = load(file)?;
            let base = doc.preglue.graph();
            let mode = if *entire { "entire" } else { "loopless" };
            let full = if *entire {
                entire_double_cover(base).0
            } else {
                loopless_double_cover(base)?.0
            };
            let components = full.components();
            let (cover_doc, map) = match &doc.gluing {
                Some(phi) => {
                    let (pg, g, map) = if *entire {
                        entire_cover(&doc.preglue, phi, *component)?
                    } else {
                        loopless_cover(&doc.preglue, phi, *component)?
                    };
                    (
                        Some(ManifoldDocument::new(pg, Some(g), doc.budget.clone())?),
                        map,
                    )
                }
                None => {
                    let (g, m) = if *entire {
                        entire_double_cover(base)
                    } else {
                        loopless_double_cover(base)?
                    };
                    (None, select_component(&g, &m, *component)?.1)
                }
            };
            let selected = match component {
                Some(i) => *i,
                None => components.iter().position(|c| c.contains(&0)).unwrap_or(0),
            };
            if let Some(path) = output {
                let d = cover_doc.as_ref().ok_or_else(|| {
                    Error::validation("gluing", "writing a cover document needs a gluing section")
                })?;
                std::fs::write(path, d.to_json())
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            let summary = report::CoverSummary {
                mode,
                base: (base.vertices().len(), base.edges().len()),
                cover: (full.vertices().len(), full.edges().len()),
                components: components.len(),
                selected,
                map: &map,
                document: cover_doc
                    .as_ref()
                    .map(|d| serde_json::from_str(&d.to_json()).expect("valid JSON")),
            };
            Ok(Output {
                text: report::cover_text(&summary),
                json: report::cover_json(&summary),
            })
        }
        Command::Seifert { genus, b0, pairs } => {
            let raw = pairs
                .iter()
                .enumerate()
                .map(|(i, s)| parse_pair(i, s))
                .collect::<Result<Vec<_>, _>>()?;
            let inv = SeifertInvariants::normalize(*genus, *b0, &raw)?;
            let torsion = inv.torsion_order().ok();
            let input = format!("{genus} {b0} {}", pairs.join(" "));
            Ok(Output {
                text: report::seifert_text(&inv, torsion),
                json: report::seifert_json(input.trim(), &inv, torsion),
            })
        }
        Command::Targets { budget, limit } => {
            let b = budget_from(budget)?;
            let r = enumerate_targets(&b, *limit)?;
            Ok(Output {
                text: report::targets_text(&r),
                json: report::targets_json(&r),
            })
        }
        Command::Budget { budget } => {
            let b = budget_from(budget)?;
            let r = distortion_budget(&b)?;
            Ok(Output {
                text: report::budget_text(&r),
                json: report::budget_json(&r),
            })
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("GLUEPRINT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Io(format!(
            "GLUEPRINT_THREADS: expected a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(format!("GLUEPRINT_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| run(&cli));
    match result {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let body = if cli.json {
                let mut s = serde_json::to_string_pretty(&out.json).expect("serializable");
                s.push('\n');
                s
            } else {
                out.text
            };
            let _ = stdout.write_all(body.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
