use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use voronoi_core::arith::rat;
use voronoi_core::db::{
    enumeration_dot, load_or_enumerate, poset_dot, to_json_line, CertificateFile, Database,
    MinDataJson, PosetFile, FORMAT_VERSION,
};
use voronoi_core::equivalence::are_equivalent;
use voronoi_core::facelattice::{faces, strata_poset};
use voronoi_core::forms::SymForm;
use voronoi_core::jsonfmt::JsonRat;
use voronoi_core::harness::{format_table, selftest};
use voronoi_core::minvec::{min_data, vectors_up_to};
use voronoi_core::verify::{run_claims, Claim};
use voronoi_core::voronoi::{domain, reduce, EnumerateOptions, MAX_ENUMERATION_DIM};
use voronoi_core::Error;

#[derive(Parser)]
#[command(name = "voronoi", version, about = "Perfect forms and the perfect-cone decomposition")]
struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate perfect forms in g variables; writes classes.json and graph.dot.
    Enumerate {
        #[arg(long)]
        g: usize,
        /// Allow dimensions above the default limit.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Minimal norm and minimal vectors of a positive definite form.
    Minvec {
        #[arg(long)]
        form: PathBuf,
        /// Also list every vector (up to sign) with value at most this bound.
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Test two forms for GL_g(Z)-equivalence.
    Equiv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Locate a positive semi-definite form in the perfect-cone decomposition.
    Reduce {
        #[arg(long)]
        form: PathBuf,
    },
    /// Face lattice of the Voronoi domain of a perfect form.
    Faces {
        #[arg(long, conflicts_with_all = ["g", "class"])]
        form: Option<PathBuf>,
        #[arg(long, requires = "class")]
        g: Option<usize>,
        #[arg(long, requires = "g")]
        class: Option<usize>,
    },
    /// Orbit poset of faces; writes poset.json and poset.dot.
    Strata {
        #[arg(long)]
        g: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the boundary checks; writes certificates.json.
    Verify {
        #[arg(long)]
        g: usize,
        /// BC-RAYS, BC-INTERIOR, PRODUCT, CLOSURE, CODIM1 or all.
        #[arg(long, default_value = "all")]
        claim: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Convert a classes.json database into a DOT graph.
    ExportDot {
        #[arg(long)]
        db: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-test battery and print a summary table.
    Selftest {
        #[arg(long, default_value_t = 4)]
        max_g: usize,
    },
}

/// Failure with the process exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn read_form(path: &Path) -> Result<SymForm, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(f) = serde_json::from_str::<SymForm>(&text) {
        return Ok(f);
    }
    let rows: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{}: not a form: {e}", path.display())))?;
    Ok(SymForm::new(rows)?)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    print!("{}", to_json_line(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Enumerate { g, force, out } => {
            let database = load_or_enumerate(g, EnumerateOptions { force })?;
            write_file(&out, "classes.json", &database.to_json()?)?;
            write_file(&out, "graph.dot", &enumeration_dot(&database.enumeration())?)?;
            println!("g={g}: {} classes", database.classes.len());
            for c in &database.classes {
                println!(
                    "  class {}: min {} pairs {} aut {} facets {} orbits {}",
                    c.id,
                    c.min_norm,
                    c.pair_count,
                    c.aut_order,
                    c.facet_count,
                    c.facet_orbits.len()
                );
            }
            Ok(0)
        }
        Command::Minvec { form, bound } => {
            let q = read_form(&form)?;
            let md = min_data(&q)?;
            let mut v = serde_json::to_value(MinDataJson::from(&md))?;
            if let Some(b) = bound {
                let list = vectors_up_to(&q, &rat(b))?;
                v["bounded"] = serde_json::to_value(
                    list.iter()
                        .map(|(x, n)| json!({ "vector": x, "value": n }))
                        .collect::<Vec<_>>(),
                )?;
            }
            print_json(&v)?;
            Ok(0)
        }
        Command::Equiv { a, b } => {
            let (qa, qb) = (read_form(&a)?, read_form(&b)?);
            let v = match are_equivalent(&qa, &qb)? {
                Some(u) => json!({ "equivalent": true, "witness": u }),
                None => json!({ "equivalent": false }),
            };
            print_json(&v)?;
            Ok(0)
        }
        Command::Reduce { form } => {
            let f = read_form(&form)?;
            let e = if f.dim() <= MAX_ENUMERATION_DIM {
                Some(load_or_enumerate(f.dim(), EnumerateOptions::default())?.enumeration())
            } else {
                None
            };
            let red = reduce(&f.to_rational(), e.as_ref())?;
            let objective: Vec<JsonRat> = red.objective.iter().map(JsonRat::from_rat).collect();
            print_json(&json!({
                "class": red.class_id,
                "form": red.form,
                "min_norm": red.min_norm,
                "face": red.face,
                "combination": red.combination,
                "objective": objective,
            }))?;
            Ok(0)
        }
        Command::Faces { form, g, class } => {
            let q = match (form, g, class) {
                (Some(p), _, _) => read_form(&p)?,
                (None, Some(g), Some(c)) => {
                    let database = load_or_enumerate(g, EnumerateOptions::default())?;
                    database
                        .classes
                        .get(c)
                        .ok_or_else(|| usage(format!("no class {c} at g={g}")))?
                        .representative
                        .clone()
                }
                _ => return Err(usage("give --form or both --g and --class")),
            };
            let d = domain(&q)?;
            let list: Vec<serde_json::Value> = faces(&d, class.unwrap_or(0))
                .iter()
                .map(|f| {
                    json!({
                        "rays": f.rays,
                        "vectors": f.vectors(&d),
                        "dim": f.dim,
                        "barycenter_rank": f.barycenter_rank,
                    })
                })
                .collect();
            print_json(&json!({ "version": FORMAT_VERSION, "form": q, "rays": d.rays, "faces": list }))?;
            Ok(0)
        }
        Command::Strata { g, out } => {
            let database = load_or_enumerate(g, EnumerateOptions::default())?;
            let poset = strata_poset(&database.enumeration())?;
            let file = PosetFile {
                version: FORMAT_VERSION,
                poset,
            };
            write_file(&out, "poset.json", &to_json_line(&file)?)?;
            write_file(&out, "poset.dot", &poset_dot(&file.poset))?;
            println!(
                "g={g}: {} orbits, {} covering relations",
                file.poset.nodes.len(),
                file.poset.edges.len()
            );
            Ok(0)
        }
        Command::Verify { g, claim, out } => {
            let claims: Vec<Claim> = if claim.eq_ignore_ascii_case("all") {
                Claim::ALL.to_vec()
            } else {
                vec![claim.parse::<Claim>().map_err(|e| usage(e.to_string()))?]
            };
            if g == 0 || g > MAX_ENUMERATION_DIM {
                return Err(usage(format!("g must be in 1..={MAX_ENUMERATION_DIM}")));
            }
            let certificates = run_claims(g, &claims)?;
            let mut status = 0;
            for c in &certificates {
                let mark = match (c.passed(), c.asserted) {
                    (true, _) => "PASS",
                    (false, false) => "FAIL (guard, expected)",
                    (false, true) => {
                        status = 1;
                        "FAIL"
                    }
                };
                println!("{:<12} {mark}  {}", c.claim.as_str(), c.detail);
            }
            let file = CertificateFile {
                version: FORMAT_VERSION,
                g,
                certificates,
            };
            write_file(&out, "certificates.json", &to_json_line(&file)?)?;
            Ok(status)
        }
        Command::ExportDot { db: path, out } => {
            let database = Database::load(&path)?;
            let dot = enumeration_dot(&database.enumeration())?;
            match out {
                Some(p) => fs::write(&p, dot).map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
        Command::Selftest { max_g } => {
            let start = Instant::now();
            let rows = selftest(max_g);
            print!("{}", format_table(&rows));
            let failed = rows.iter().filter(|r| !r.passed).count();
            println!(
                "{} checks, {failed} failed, {:.1} s",
                rows.len(),
                start.elapsed().as_secs_f64()
            );
            Ok(u8::from(failed > 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
