use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tamepres::error::{Error, Result};
use tamepres::presenter::{alphabet, layer_radii, parse_presentation, present};
use tamepres::specfile::{self, parse_spec, render_spec, SpecFile};
use tamepres::tameness::check_tame_with_cap;
use tamepres::verifier::{build_finite_model, verify_relators};

#[derive(Parser)]
#[command(name = "tamepres", version, about = "Tameness certificates and finite presentations of Q x| A")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify tameness and print the report
    Tame { spec: PathBuf },
    /// Build the finite presentation
    Present {
        spec: PathBuf,
        /// Output file; stdout when omitted
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the radius certificate of every layer
    Radius { spec: PathBuf },
    /// Evaluate a presentation in a finite model
    Verify {
        spec: PathBuf,
        presentation: PathBuf,
        #[arg(long = "mod")]
        modulus: Option<u64>,
        #[arg(long)]
        quot: Option<i64>,
    },
    /// Print a built-in example spec
    Example {
        name: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        ell: i64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })
}

fn load(path: &Path) -> Result<SpecFile> {
    parse_spec(&read(path)?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Tame { spec } => {
            let s = load(&spec)?;
            let report = check_tame_with_cap(&s.group, &s.module, s.options.cap)?;
            print!("{}", report.render(&s.group, &s.module));
            Ok(if report.is_tame() { 0 } else { 1 })
        }
        Command::Present { spec, out } => {
            let s = load(&spec)?;
            let (_, radii, p) = match present(&s.group, &s.module, s.options.cap) {
                Err(Error::NotTame) => {
                    eprintln!("module is not certified tame; no presentation");
                    return Ok(1);
                }
                other => other?,
            };
            let text = p.to_text();
            let summary = {
                let mut lines: Vec<String> =
                    radii.iter().enumerate().map(|(i, r)| format!("layer {}: p0 = {}", i + 1, r.p0)).collect();
                lines.push(format!("|W| = {}", p.w_size));
                lines.push(format!("nominal: {}", p.nominal));
                lines.push(format!("emitted: {}", p.emitted()));
                lines.join("\n")
            };
            match out {
                Some(path) => {
                    fs::write(&path, text)
                        .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
                    println!("{summary}");
                }
                None => {
                    print!("{text}");
                    eprintln!("{summary}");
                }
            }
            Ok(0)
        }
        Command::Radius { spec } => {
            let s = load(&spec)?;
            let report = check_tame_with_cap(&s.group, &s.module, s.options.cap)?;
            if !report.is_tame() {
                print!("{}", report.render(&s.group, &s.module));
                return Ok(1);
            }
            for (i, r) in layer_radii(&report)?.iter().enumerate() {
                println!("layer {}", i + 1);
                println!("{r}");
            }
            Ok(0)
        }
        Command::Verify { spec, presentation, modulus, quot } => {
            let s = load(&spec)?;
            let alpha = alphabet(&s.group, &s.module);
            let parsed = parse_presentation(&read(&presentation)?, &alpha)?;
            let m = modulus.or(s.options.modulus).unwrap_or(5);
            let n = quot.or(s.options.quot).unwrap_or(3);
            let model = build_finite_model(&s.group, &s.module, m, n)?;
            let report = verify_relators(&parsed.relators, &alpha, &model)?;
            println!("{report}");
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Example { name, k, ell } => {
            let s = match name.as_str() {
                "baumslag" => specfile::baumslag(k)?,
                "heisenberg" => specfile::heisenberg(k, ell)?,
                "free" => specfile::free(k)?,
                other => {
                    eprintln!("unknown example {other:?}; choose baumslag, heisenberg or free");
                    return Ok(2);
                }
            };
            print!("{}", render_spec(&s)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
