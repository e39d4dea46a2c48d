use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pgroup::autom::{construct_noninner, Endo, NonInnerCertificate};
use pgroup::deriv::{derivation_space, Derivation};
use pgroup::fpmod::{self, FpModule};
use pgroup::group::{self, DEFAULT_ENUMERATION_CAP};
use pgroup::oracle::{self, DEFAULT_ORACLE_CAP};
use pgroup::series;
use pgroup::{catalog, Error, Group, PcPresentation};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pgroup", version, about = "Finite p-groups: series, H^1, derivations and non-inner automorphisms of order p")]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Refuse to enumerate groups larger than this.
    #[arg(long, global = true, env = "PGROUP_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u128,
    /// Worker threads for batch commands (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupArg {
    /// Catalog name, e.g. `heisenberg:3` or `meta:3*cyclic:3,1`.
    #[arg(long, conflicts_with = "file")]
    group: Option<String>,
    /// Presentation JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Replace the group by a quotient.
    #[arg(long, value_enum)]
    quotient: Option<QuotientBy>,
}

#[derive(ValueEnum, Clone, Copy)]
enum QuotientBy {
    /// G / Φ(G)
    Frattini,
    /// G / γ_3(G) G^p
    Gamma3p,
    /// G / Z(G)
    Center,
}

#[derive(Subcommand)]
enum Command {
    /// Central series, Frattini data, the chain P_0 > ... > P_T and hypothesis checks.
    Series {
        #[command(flatten)]
        g: GroupArg,
        /// Also run the presentation consistency check.
        #[arg(long)]
        check: bool,
    },
    /// Dimensions of Der, Ider and H^1 for a module.
    H1 {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value = "trivial")]
        module: String,
    },
    /// Bases of Der and of H^1 representatives, or validate a derivation file.
    Derivations {
        #[command(flatten)]
        g: GroupArg,
        #[arg(long, default_value = "trivial")]
        module: String,
        /// Derivation JSON to validate.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Construct and certify a non-inner automorphism of order p, or check a certificate.
    Noninner {
        #[command(flatten)]
        g: GroupArg,
        /// Certificate JSON to verify.
        #[arg(long)]
        check: Option<PathBuf>,
        /// Print the construction trace to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Compare the pipeline with exhaustive search.
    Verify {
        #[command(flatten)]
        g: GroupArg,
        /// Every catalog group for the prime up to the order bound.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long = "max-order", default_value_t = 243)]
        max_order: u128,
    },
    /// Enumerate Aut(G) by brute force.
    OracleAut {
        #[command(flatten)]
        g: GroupArg,
        /// Include every automorphism in the output.
        #[arg(long)]
        list: bool,
    },
    /// Print the presentation JSON.
    Export {
        #[command(flatten)]
        g: GroupArg,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TooLarge { .. } => 2,
        Error::Parse(_) | Error::InvalidPresentation(_) | Error::InvalidModule(_) | Error::IndexOutOfRange { .. } => 3,
        Error::OutOfScope(_) => 4,
        Error::Verification(_) | Error::NotDerivation(_) | Error::NotHomomorphism(_) => 5,
        _ => 1,
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_presentation(arg: &GroupArg) -> Result<PcPresentation, Error> {
    match (&arg.group, &arg.file) {
        (Some(name), None) => catalog::parse(name),
        (None, Some(path)) => PcPresentation::from_json(&read(path)?),
        _ => Err(Error::Parse("give exactly one of --group or --file".into())),
    }
}

fn load_group(arg: &GroupArg, cap: u128) -> Result<Group, Error> {
    let g = Group::with_cap(Arc::new(load_presentation(arg)?), cap)?;
    let Some(q) = arg.quotient else { return Ok(g) };
    let (n, tag) = match q {
        QuotientBy::Frattini => (series::frattini(&g), "Frattini"),
        QuotientBy::Gamma3p => (series::gamma3_agemo(&g), "gamma3p"),
        QuotientBy::Center => (series::center(&g), "center"),
    };
    if n.order() == g.order() {
        return Err(Error::OutOfScope(format!("quotient by the whole group ({tag})")));
    }
    let (pres, _) = group::quotient(&g, n.members())?;
    Group::with_cap(Arc::new(pres.with_name(format!("{}/{tag}", g.name()))), cap)
}

fn module_for(g: &Group, spec: &str) -> Result<Arc<FpModule>, Error> {
    match spec.strip_prefix("file:") {
        Some(path) => Ok(Arc::new(FpModule::from_json(g.presentation_arc(), &read(&PathBuf::from(path))?)?)),
        None => fpmod::module_from_spec(g, spec),
    }
}

fn derivation_json(d: &Derivation) -> Value {
    json!({ "gen_images": d.images() })
}

struct Output {
    value: Value,
    code: u8,
}

impl From<Value> for Output {
    fn from(value: Value) -> Self {
        Output { value, code: 0 }
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Series { g, check } => {
            let g = load_group(g, cli.cap)?;
            if *check {
                g.check_consistency(10_000, cli.seed)?;
            }
            Ok(serde_json::to_value(series::series_report(&g)).expect("report serializes").into())
        }
        Command::H1 { g, module } => {
            let g = load_group(g, cli.cap)?;
            let m = module_for(&g, module)?;
            let space = derivation_space(&m)?;
            let cr = fpmod::is_cr(&g, &m, &[])?;
            let mut v = serde_json::to_value(space.dims()).expect("dims serialize");
            v["group"] = json!(g.name());
            v["module"] = json!(module);
            v["cr"] = json!(cr.is_cr);
            Ok(v.into())
        }
        Command::Derivations { g, module, check } => {
            let g = load_group(g, cli.cap)?;
            let m = module_for(&g, module)?;
            let space = derivation_space(&m)?;
            if let Some(path) = check {
                let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?;
                let images: Vec<Vec<u32>> = serde_json::from_value(v["gen_images"].clone()).map_err(|e| Error::Parse(format!("gen_images: {e}")))?;
                let d = Derivation::new(Arc::clone(&m), images)?;
                return Ok(json!({ "valid": true, "inner": space.is_inner(&d) }).into());
            }
            let mut v = serde_json::to_value(space.dims()).expect("dims serialize");
            v["group"] = json!(g.name());
            v["module"] = json!(module);
            v["basis"] = space.der_basis().iter().map(derivation_json).collect();
            v["representatives"] = space.representatives().iter().map(derivation_json).collect();
            Ok(v.into())
        }
        Command::Noninner { g: garg, check, trace } => {
            if let Some(path) = check {
                let cert = NonInnerCertificate::from_json(&read(path)?)?;
                let garg = if garg.group.is_none() && garg.file.is_none() {
                    GroupArg { group: Some(cert.group.clone()), ..garg.clone() }
                } else {
                    garg.clone()
                };
                let g = load_group(&garg, cli.cap)?;
                cert.verify(&g)?;
                return Ok(json!({ "group": g.name(), "valid": true, "path": cert.path }).into());
            }
            let g = load_group(garg, cli.cap)?;
            let out = construct_noninner(&g)?;
            if *trace {
                for line in &out.trace {
                    eprintln!("{line}");
                }
            }
            Ok(serde_json::to_value(&out.certificate).expect("certificate serializes").into())
        }
        Command::Verify { g, all, p, max_order } => {
            let names: Vec<String> = if *all {
                catalog::names(*p, *max_order)
            } else {
                vec![String::new()]
            };
            let cap = cli.cap;
            let one = |name: &String| -> Result<oracle::VerifyRow, Error> {
                let garg = if *all { GroupArg { group: Some(name.clone()), file: None, quotient: None } } else { g.clone() };
                let grp = load_group(&garg, cap)?;
                Ok(oracle::verify_group(&grp, DEFAULT_ORACLE_CAP))
            };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build().map_err(|e| Error::Parse(e.to_string()))?;
            let rows: Vec<oracle::VerifyRow> = pool.install(|| names.par_iter().map(one).collect::<Result<_, _>>())?;
            let agreed = rows.iter().filter(|r| r.agree).count();
            eprintln!("{agreed}/{} agree", rows.len());
            let code = if agreed == rows.len() { 0 } else { 5 };
            Ok(Output { value: serde_json::to_value(&rows).expect("rows serialize"), code })
        }
        Command::OracleAut { g, list } => {
            let g = load_group(g, cli.cap)?;
            let aut = oracle::enumerate_automorphisms(&g, DEFAULT_ORACLE_CAP)?;
            let p = g.prime() as u64;
            let inner: BTreeSet<Vec<pgroup::Element>> = (0..g.order()).map(|x| Endo::inner(&g, x).images().to_vec()).collect();
            let noninner_order_p = aut
                .automorphisms
                .iter()
                .filter(|imgs| !inner.contains(*imgs))
                .filter(|imgs| Endo::new(g.presentation_arc(), imgs.to_vec()).and_then(|e| e.order_naive(&g)).ok() == Some(p))
                .count();
            let mut v = json!({
                "group": g.name(),
                "order": g.order(),
                "automorphisms": aut.len(),
                "inner": aut.inner_count,
                "order_histogram": aut.order_histogram,
                "noninner_order_p": noninner_order_p,
            });
            if *list {
                v["list"] = json!(aut.automorphisms);
            }
            Ok(v.into())
        }
        Command::Export { g } => {
            let g = load_group(g, cli.cap)?;
            Ok(serde_json::to_value(g.presentation().to_file()).expect("presentation serializes").into())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.pretty { serde_json::to_string_pretty(&out.value) } else { serde_json::to_string(&out.value) };
            println!("{}", text.expect("output serializes"));
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
