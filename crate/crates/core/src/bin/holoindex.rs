use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use holoindex::cli::{render_text, run_corpus, run_path, Flags};

#[derive(Parser, Debug)]
#[command(name = "holoindex", version, about = "Residues and index identities for maps fixing a hypersurface")]
struct Args {
    /// Problem file (JSON).
    problem: Option<PathBuf>,
    /// Also write the canonical JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Treat the map components as jets of this depth.
    #[arg(long, value_name = "D")]
    trunc: Option<u32>,
    /// Largest minimal-polynomial degree for per-root residues.
    #[arg(long, value_name = "DEG")]
    precision_cap: Option<usize>,
    /// Run every *.problem.json in DIR against its *.expected.json.
    #[arg(long, value_name = "DIR", conflicts_with = "problem")]
    corpus: Option<PathBuf>,
    /// Rewrite golden files instead of comparing (with --corpus).
    #[arg(long, requires = "corpus")]
    bless: bool,
    #[arg(long)]
    quiet: bool,
}

fn init_threads() {
    if let Some(n) = std::env::var("HOLOINDEX_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads();
    let flags = Flags { trunc: args.trunc, precision_cap: args.precision_cap };
    let start = Instant::now();

    if let Some(dir) = &args.corpus {
        return match run_corpus(dir, &flags, args.bless) {
            Ok(summary) => {
                if !args.quiet {
                    for d in &summary.diffs {
                        println!("DIFF {}: {}", d.problem.display(), d.reason);
                    }
                    println!(
                        "{} problems, {} differ{}",
                        summary.total,
                        summary.diffs.len(),
                        if args.bless { " (blessed)" } else { "" }
                    );
                    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
                }
                ExitCode::from(if summary.all_green() { 0 } else { 1 })
            }
            Err(e) => {
                eprintln!("error [{}]: {e}", e.kind());
                ExitCode::from(2)
            }
        };
    }

    let Some(path) = &args.problem else {
        eprintln!("error: a problem file or --corpus is required");
        return ExitCode::from(2);
    };
    let report = run_path(path, &flags);
    if !args.quiet {
        print!("{}", render_text(&report));
        eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    }
    if let Some(out) = &args.json {
        if let Err(e) = std::fs::write(out, report.to_canonical_json()) {
            eprintln!("error: cannot write {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
