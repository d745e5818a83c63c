//! Command-line front end: parse poset files, enumerate tubings, realize the
//! polytopes, verify them against the brute-force oracle, and export DOT,
//! OFF, and H-representation files.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use posetpoly::io::{self, InputObject};
use posetpoly::oracle;
use posetpoly::realization::{self, AlphaVariant};
use posetpoly::system::{parse_rat, rat_string, HalfSpaceSystem, Point};
use posetpoly::tubing::TubingEngine;
use posetpoly::Poset;

#[derive(Parser)]
#[command(
    name = "posetpoly",
    about = "Exact realizations of poset associahedra and affine poset cyclohedra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate proper or maximal tubings of a finite poset.
    Tubings {
        input: PathBuf,
        /// Only the maximal tubings (the vertices).
        #[arg(long)]
        maximal: bool,
        /// Emit the reverse-inclusion face lattice as DOT instead.
        #[arg(long)]
        lattice: bool,
    },
    /// Build a half-space system and print it with its vertex list.
    Realize {
        input: PathBuf,
        #[command(flatten)]
        build: BuildFlags,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print each maximal tubing with its exact vertex.
    Vertices {
        input: PathBuf,
        #[arg(long, default_value = "covers")]
        variant: String,
    },
    /// f- and h-vector of the poset associahedron.
    Fvector {
        input: PathBuf,
        /// Also compute the outdegree histogram of a generic direction.
        #[arg(long)]
        outdegree: bool,
        /// Seed for the generic-direction search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the full brute-force verification report.
    Verify {
        input: PathBuf,
        /// Machine-readable JSON report.
        #[arg(long)]
        json: bool,
        /// Seed for the sampled diameter-bounds check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample count for the diameter-bounds check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Contract a tube of a finite poset and print the quotient.
    Contract {
        input: PathBuf,
        /// Comma-separated element names of the tube.
        #[arg(long)]
        tube: String,
        /// Print the quotient Hasse diagram as DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Export DOT, OFF, or H-representation files.
    Export {
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[command(flatten)]
        build: BuildFlags,
        /// Output path (stdout when absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BuildFlags {
    /// Tube functional: covers, all-pairs, or minmax.
    #[arg(long, default_value = "covers")]
    variant: String,
    /// Which system to build for finite posets.
    #[arg(long, value_enum, default_value_t = SystemKind::Associahedron)]
    system: SystemKind,
    /// Epsilon as an exact rational `a/b` (epsilon realization only).
    #[arg(long)]
    epsilon: Option<String>,
    /// Slice constant for the order polytope.
    #[arg(long, default_value = "1")]
    constant: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SystemKind {
    Associahedron,
    OrderPolytope,
    Stanley,
    Epsilon,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Ine,
    Off,
    Dot,
}

struct AppError(String);

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: std::error::Error> From<E> for AppError {
    fn from(e: E) -> Self {
        AppError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &PathBuf) -> Result<InputObject, AppError> {
    let text = fs::read_to_string(path)?;
    Ok(io::parse_input(&text)?)
}

fn finite(path: &PathBuf) -> Result<Poset, AppError> {
    match read_input(path)? {
        InputObject::Finite(p) => Ok(p),
        InputObject::Affine(_) => Err(AppError("this subcommand needs a finite poset".to_string())),
    }
}

fn parse_variant(s: &str) -> Result<AlphaVariant, AppError> {
    AlphaVariant::parse(s).ok_or_else(|| {
        AppError(format!(
            "unknown variant `{s}` (expected covers, all-pairs, or minmax)"
        ))
    })
}

fn build_system(object: &InputObject, flags: &BuildFlags) -> Result<HalfSpaceSystem, AppError> {
    let variant = parse_variant(&flags.variant)?;
    match object {
        InputObject::Affine(ap) => Ok(ap.build_cyclohedron()?),
        InputObject::Finite(p) => {
            let kind = if flags.epsilon.is_some() && flags.system == SystemKind::Associahedron {
                SystemKind::Epsilon
            } else {
                flags.system
            };
            match kind {
                SystemKind::Associahedron => Ok(realization::build_associahedron_with(p, variant)?),
                SystemKind::OrderPolytope => {
                    let c = parse_rat(&flags.constant)?;
                    Ok(realization::order_polytope(p, &c)?)
                }
                SystemKind::Stanley => Ok(realization::stanley_normalized(p)?),
                SystemKind::Epsilon => {
                    let text = flags.epsilon.as_deref().ok_or_else(|| {
                        AppError("--epsilon is required for the epsilon system".to_string())
                    })?;
                    let eps = parse_rat(text)?;
                    Ok(realization::epsilon_realization(p, &eps)?)
                }
            }
        }
    }
}

fn point_string(p: &Point) -> String {
    let coords: Vec<String> = p.coords().iter().map(rat_string).collect();
    format!("({})", coords.join(", "))
}

fn system_text(sys: &HalfSpaceSystem) -> Result<String, AppError> {
    let mut out = String::new();
    out.push_str(&format!("variables: {}\n", sys.var_names.join(", ")));
    for (f, rhs) in &sys.equalities {
        out.push_str(&format!(
            "equality: {} = {}\n",
            sys.functional_string(f),
            rat_string(rhs)
        ));
    }
    for (label, f, rhs) in &sys.inequalities {
        out.push_str(&format!(
            "inequality {}: {} >= {}\n",
            sys.label_string(label),
            sys.functional_string(f),
            rat_string(rhs)
        ));
    }
    let vertices = oracle::brute_force_vertices(sys)?;
    out.push_str(&format!("vertices: {}\n", vertices.len()));
    for v in &vertices {
        let tight: Vec<String> = v.tight.iter().map(|l| sys.label_string(l)).collect();
        out.push_str(&format!(
            "vertex {} tight [{}]\n",
            point_string(&v.point),
            tight.join(", ")
        ));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match cli.command {
        Command::Tubings {
            input,
            maximal,
            lattice,
        } => {
            let p = finite(&input)?;
            let eng = TubingEngine::new(&p)?;
            if lattice {
                print!("{}", eng.lattice_dot());
                return Ok(ExitCode::SUCCESS);
            }
            let tubings = if maximal {
                eng.maximal_tubings()
            } else {
                eng.proper_tubings()
            };
            for t in &tubings {
                println!("{}", eng.tubing_string(t));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Realize {
            input,
            build,
            format,
        } => {
            let object = read_input(&input)?;
            let sys = build_system(&object, &build)?;
            match format {
                Format::Text => print!("{}", system_text(&sys)?),
                Format::Ine => print!("{}", io::write_ine(&sys)),
                Format::Off => print!("{}", io::write_off(&sys)?),
                Format::Dot => {
                    return Err(AppError(
                        "DOT output belongs to `tubings --lattice` or `export --format dot`"
                            .to_string(),
                    ))
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Vertices { input, variant } => {
            let variant = parse_variant(&variant)?;
            match read_input(&input)? {
                InputObject::Finite(p) => {
                    let eng = TubingEngine::new(&p)?;
                    for t in eng.maximal_tubings() {
                        let members = eng.members(&t);
                        let v = realization::vertex_of_tubing_with(&p, &members, variant)?;
                        println!(
                            "tubing {} vertex {}",
                            eng.tubing_string(&t),
                            point_string(&v)
                        );
                    }
                }
                InputObject::Affine(ap) => {
                    for t in ap.maximal_tubings() {
                        let v = ap.vertex_of_tubing(&t)?;
                        let orbits: Vec<String> = t
                            .iter()
                            .map(|o| {
                                let parts: Vec<String> =
                                    o.members.iter().map(|z| z.to_string()).collect();
                                format!("[{}]", parts.join(","))
                            })
                            .collect();
                        println!("tubing [{}] vertex {}", orbits.join(","), point_string(&v));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fvector {
            input,
            outdegree,
            seed,
        } => {
            let p = finite(&input)?;
            let fh = realization::f_vector(&p)?;
            let fmt_vec = |v: &[u64]| {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", parts.join(", "))
            };
            println!("f: {}", fmt_vec(&fh.f));
            println!("h: {}", fmt_vec(&fh.h));
            if outdegree {
                let (_, hist) = realization::h_vector_by_outdegree_seeded(&p, seed)?;
                println!("outdegree: {}", fmt_vec(&hist));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            input,
            json,
            seed,
            samples,
        } => {
            let instance = input
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "input".to_string());
            let report = match read_input(&input)? {
                InputObject::Finite(p) => {
                    oracle::verify_poset_realization(&p, &instance, seed, samples)?
                }
                InputObject::Affine(ap) => oracle::verify_affine_realization(&ap, &instance)?,
            };
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            if report.all_pass() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Contract { input, tube, dot } => {
            let p = finite(&input)?;
            let mut members = posetpoly::ElemSet::EMPTY;
            for name in tube.split(',') {
                let name = name.trim();
                let idx = p
                    .index_of(name)
                    .ok_or_else(|| AppError(format!("unknown element `{name}`")))?;
                members.insert(idx);
            }
            let q = p.contract(members)?;
            if dot {
                print!("{}", q.to_dot());
            } else {
                print!("{}", io::poset_to_text(&q));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Export {
            input,
            format,
            build,
            output,
        } => {
            let object = read_input(&input)?;
            let text = match format {
                Format::Dot => match &object {
                    InputObject::Finite(p) => p.to_dot(),
                    InputObject::Affine(_) => {
                        return Err(AppError("DOT export is for finite posets".to_string()))
                    }
                },
                Format::Ine => io::write_ine(&build_system(&object, &build)?),
                Format::Off => io::write_off(&build_system(&object, &build)?)?,
                Format::Text => system_text(&build_system(&object, &build)?)?,
            };
            match output {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
