use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ellcoh", version, about = "Cohomology of pointed elliptic moduli spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers and mixed Hodge polynomial of the n-pointed level-N moduli space
    Moduli {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: u32,
        /// Also decompose by irreducible symmetric group representations
        #[arg(long)]
        equivariant: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Same data for the configuration space of n points on a once-marked curve
    ConfigSpace {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        equivariant: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimension tables of modular form spaces for a principal congruence level
    ModularDims {
        #[arg(long)]
        level: u64,
        /// Largest weight to include
        #[arg(long)]
        kmax: u64,
    },
    /// Group cohomology dimensions computed from a free presentation
    GammaH1 {
        #[arg(long)]
        level: u32,
        /// Largest symmetric power to include
        #[arg(long)]
        kmax: usize,
        /// Presentation file; defaults to the shipped presentation for the level
        #[arg(long)]
        generators: Option<PathBuf>,
    },
    /// Run the built-in consistency suite
    Selftest {
        /// Largest point count exercised by the expensive checks
        #[arg(long, default_value = "4")]
        nmax: usize,
    },
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(json: &str, format: Format) -> Result<String, String> {
    match format {
        Format::Json => Ok(json.to_string()),
        Format::Csv => {
            let record = ellcoh::assemble::from_json(json).map_err(|e| e.to_string())?;
            Ok(ellcoh::assemble::to_csv(&record))
        }
        Format::Latex => {
            let record = ellcoh::assemble::from_json(json).map_err(|e| e.to_string())?;
            Ok(ellcoh::assemble::to_latex(&record))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Moduli {
            n,
            level,
            equivariant,
            format,
            out,
        } => {
            let json = ellcoh::assemble::moduli_json_cached(n, level, equivariant)
                .map_err(|e| e.to_string())?;
            emit(&render(&json, format)?, &out)?;
        }
        Command::ConfigSpace {
            n,
            equivariant,
            format,
            out,
        } => {
            let json = ellcoh::assemble::config_json_cached(n, equivariant)
                .map_err(|e| e.to_string())?;
            emit(&render(&json, format)?, &out)?;
        }
        Command::ModularDims { level, kmax } => {
            let gd = ellcoh::modular::gamma_data(level).map_err(|e| e.to_string())?;
            println!(
                "level {level}: index {}, projective index {}, cusps {}, genus {}",
                gd.mu, gd.mu_bar, gd.eps_inf, gd.genus
            );
            println!("weight cusp_forms eisenstein total");
            for k in 2..=kmax {
                let d = ellcoh::modular::dims(k, level).map_err(|e| e.to_string())?;
                println!("{k:6} {:10} {:10} {:5}", d.s, d.g - d.s, d.g);
            }
        }
        Command::GammaH1 {
            level,
            kmax,
            generators,
        } => {
            let pres = match &generators {
                Some(path) => ellcoh::gamma::FreePresentation::load(path),
                None => ellcoh::gamma::builtin_presentation(level),
            }
            .map_err(|e| e.to_string())?;
            if pres.level != level {
                return Err(format!(
                    "presentation file is for level {}, requested {level}",
                    pres.level
                ));
            }
            println!(
                "level {level}: free of rank {}, {} cusp words",
                pres.generators.len(),
                pres.cusp_words.len()
            );
            println!("     k     h1 parabolic");
            for k in 0..=kmax {
                let h1 = ellcoh::gamma::h1_dim(&pres, k).map_err(|e| e.to_string())?;
                let par =
                    ellcoh::gamma::parabolic_h1_dim(&pres, k).map_err(|e| e.to_string())?;
                println!("{k:6} {h1:6} {par:9}");
            }
        }
        Command::Selftest { nmax } => {
            let reports = ellcoh::selftest::run(nmax);
            let mut ok = true;
            for r in &reports {
                let tag = if r.passed { "ok  " } else { "FAIL" };
                println!("[{tag}] {}: {}", r.name, r.detail);
                ok &= r.passed;
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
