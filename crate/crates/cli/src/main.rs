//! Command line driver: enumeration, discrete checkers, verification
//! suites, and export of the bundled example data.

mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use theta_core::fibrancy::{
    check_complete_discrete, check_groupoid_discrete, check_segal_discrete,
    check_truncation_discrete,
};
use theta_core::intertwine::simplicial_subset_presheaf;
use theta_core::ncat::{chaotic_groupoid_ncat, dnerve, StrictNCat};
use theta_core::presheaf::FinPresheaf;
use theta_core::qpaths::{delannoy, enumerate_q, q_poset, retraction_chain};
use theta_core::theta::ThetaObject;
use theta_core::window::Window;
use theta_core::{Error, Result};

#[derive(Parser)]
#[command(name = "theta", version, about = "Exact kernel for wreath products of the simplex category")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the morphisms between two objects.
    Hom(HomArgs),
    /// List the objects of a window in canonical order.
    Objects {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        max_size: usize,
    },
    /// Run a discrete checker on a presheaf file.
    Check {
        #[arg(value_enum)]
        which: Checker,
        #[arg(long)]
        input: PathBuf,
        /// Truncation degree (only read by the truncation checker).
        #[arg(long, default_value_t = 0)]
        k: i64,
    },
    /// Compute the discrete nerve of a strict category file.
    Dnerve {
        #[arg(long)]
        input: PathBuf,
        /// Maximal object size of the tabulation window.
        #[arg(long)]
        window: usize,
    },
    /// Describe a lattice-path poset.
    Qposet {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Also print the reduced homology of the order complex.
        #[arg(long)]
        homology: bool,
        /// Also run the certified retraction chain.
        #[arg(long)]
        retractions: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
        /// JSON manifest overriding window bounds, seeds, and case counts.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Write the bundled example data files.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Directory the files are written into.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct HomArgs {
    #[arg(long)]
    level: usize,
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: String,
    /// Print only the number of morphisms.
    #[arg(long, conflicts_with = "list")]
    count: bool,
    /// Print one morphism per line as JSON.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Checker {
    Segal,
    Complete,
    Groupoid,
    Truncation,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SuiteName {
    Axioms,
    Decompositions,
    Covers,
    Qpaths,
    Rigidity,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
}

/// Outcome of a command: `Clean` prints nothing extra, `CheckFailed` turns
/// into exit code 1 after the report has already been printed.
enum Outcome {
    Clean,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } => ExitCode::from(2),
                Error::WindowExhausted(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Hom(args) => hom(&args),
        Command::Objects { level, max_size } => {
            let w = Window::new(level, max_size);
            for t in w.objects() {
                println!("{t}");
            }
            Ok(Outcome::Clean)
        }
        Command::Check { which, input, k } => {
            let x = read_presheaf(&input)?;
            check(which, &x, k)
        }
        Command::Dnerve { input, window } => {
            let c = read_ncat(&input)?;
            let w = Window::new(c.n(), window);
            let nerve = dnerve(&c, &w)?;
            println!("{}", serde_json::to_string_pretty(&nerve.to_json())?);
            Ok(Outcome::Clean)
        }
        Command::Qposet { m, n, homology, retractions } => qposet(m, n, homology, retractions),
        Command::Verify { suite, manifest } => {
            let cfg = match manifest {
                Some(p) => suites::Manifest::from_file(&p)?,
                None => suites::Manifest::default(),
            };
            let results = suites::run(suite, &cfg)?;
            let mut all_passed = true;
            for r in &results {
                println!("{}", r.render());
                all_passed &= r.passed();
            }
            if all_passed {
                Ok(Outcome::Clean)
            } else {
                Ok(Outcome::CheckFailed)
            }
        }
        Command::Export { format: ExportFormat::Json, out } => export_json(&out),
    }
}

fn hom(args: &HomArgs) -> Result<Outcome> {
    let src = ThetaObject::parse(&args.src, args.level)?;
    let dst = ThetaObject::parse(&args.dst, args.level)?;
    let bound = src.size().max(dst.size());
    let w = Window::new(args.level, bound);
    let a = w.index_of(&src)?;
    let b = w.index_of(&dst)?;
    let homs = w.hom(a, b);
    if args.list {
        for f in homs {
            println!("{}", serde_json::to_string(&f.to_json())?);
        }
    } else {
        println!("{}", homs.len());
    }
    Ok(Outcome::Clean)
}

fn check(which: Checker, x: &FinPresheaf, k: i64) -> Result<Outcome> {
    let w = x.window();
    match which {
        Checker::Segal => {
            let rep = check_segal_discrete(x)?;
            for c in &rep.checks {
                if !c.bijective {
                    println!("fail at {}: {} vs {}", w.object(c.object), c.lhs, c.rhs);
                }
            }
            println!("segal: {}", verdict(rep.passes));
            Ok(outcome(rep.passes))
        }
        Checker::Complete => {
            let rep = check_complete_discrete(x)?;
            for l in &rep.levels {
                println!(
                    "level {}: cells {} vs equivalences {}{}",
                    l.level,
                    l.lower_cells,
                    l.equivalences_by_recursion,
                    if l.passes { "" } else { " (fail)" }
                );
            }
            println!("complete: {}", verdict(rep.passes));
            Ok(outcome(rep.passes))
        }
        Checker::Groupoid => {
            let rep = check_groupoid_discrete(x)?;
            let passes = rep.equivalences_by_recursion && rep.equivalences_by_tables;
            println!("all cells equivalences: {}", verdict(passes));
            println!("constant: {}", if rep.constant { "yes" } else { "no" });
            Ok(outcome(passes))
        }
        Checker::Truncation => {
            let rep = check_truncation_discrete(x, k)?;
            println!(
                "cells {} boundary {} max fiber {} empty fibers {}",
                rep.cells, rep.boundary, rep.max_fiber, rep.empty_fibers
            );
            if let Some(note) = &rep.note {
                println!("note: {note}");
            }
            println!("truncation at {}: {}", rep.k, verdict(rep.passes));
            Ok(outcome(rep.passes))
        }
    }
}

fn qposet(m: usize, n: usize, homology: bool, retractions: bool) -> Result<Outcome> {
    let count = enumerate_q(m, n)?.len();
    println!("paths: {count}");
    if count as u64 != delannoy(m, n) {
        return Err(Error::Invariant("path count disagrees with the closed form".into()));
    }
    if homology {
        let qp = q_poset(m, n)?;
        let groups = theta_core::homology::poset_homology(&qp.poset);
        for (d, g) in groups.iter().enumerate() {
            println!("H_{d}: {g}");
        }
        let reduced_trivial = groups.iter().all(|g| g.is_trivial());
        println!("reduced homology trivial: {}", if reduced_trivial { "yes" } else { "no" });
        if !reduced_trivial {
            return Ok(Outcome::CheckFailed);
        }
    }
    if retractions {
        let rep = retraction_chain(m, n)?;
        for s in &rep.stages {
            println!("stage {}: {} -> {}", s.k, s.x_size, s.y_size);
        }
        println!("final size {}, acyclic: {}", rep.x_final_size, verdict(rep.x_final_acyclic));
        if !rep.x_final_acyclic {
            return Ok(Outcome::CheckFailed);
        }
    }
    Ok(Outcome::Clean)
}

fn export_json(out: &std::path::Path) -> Result<Outcome> {
    std::fs::create_dir_all(out)?;
    let w1 = Window::new(1, 3);
    let files: Vec<(&str, Value)> = vec![
        (
            "spine2.json",
            simplicial_subset_presheaf(&w1, &theta_core::delta::SimplicialSubset::spine(2))?
                .to_json(),
        ),
        (
            "boundary2.json",
            simplicial_subset_presheaf(&w1, &theta_core::delta::SimplicialSubset::boundary(2))?
                .to_json(),
        ),
        ("chaotic2.json", chaotic_groupoid_ncat(2)?.to_json()),
    ];
    for (name, doc) in files {
        let path = out.join(name);
        std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
        println!("wrote {}", path.display());
    }
    Ok(Outcome::Clean)
}

fn read_presheaf(path: &std::path::Path) -> Result<FinPresheaf> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    FinPresheaf::from_json(&v)
}

fn read_ncat(path: &std::path::Path) -> Result<StrictNCat> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    StrictNCat::from_json(&v)
}

fn verdict(passes: bool) -> &'static str {
    if passes {
        "pass"
    } else {
        "fail"
    }
}

fn outcome(passes: bool) -> Outcome {
    if passes {
        Outcome::Clean
    } else {
        Outcome::CheckFailed
    }
}
