use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::json;

use proper_polycubes::assemble::{evaluate_density, hybrid_family, perimeter_polynomial, symbolic_in_d, Provenance};
use proper_polycubes::enumerate::{default_budget, enumerate_proper, Enumerator};
use proper_polycubes::oracle::merged_census;
use proper_polycubes::patterns::{count_xx, count_xyx, count_xyx_total, count_xyzx, count_xyzx_printed, xx_classes};
use proper_polycubes::proper::{calibrate_g2, g1, g2, G2_WEIGHTS};
use proper_polycubes::results::{Format, Mode, ResultFile};
use proper_polycubes::verify::{enumerate_file, verify};
use proper_polycubes::{Error, PerimeterTable};

const EXIT_OTHER: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "polycubes", version, about = "Perimeter counts of fixed polycubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Output {
    /// Write the result file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Leave the wall time out of the header so reruns are byte-identical.
    #[arg(long)]
    reproducible: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Polycubes proper in n-1 dimensions, from the tree formula.
    G1 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Polycubes proper in n-2 dimensions; enumerated below n = 6.
    G2 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force enumeration in d dimensions.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, short = 'd', alias = "i")]
        d: usize,
        /// Keep only polycubes spanning all d axes.
        #[arg(long)]
        proper: bool,
        /// Worker threads; more than one also splits the search tree.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-job checkpoint files; finished jobs found there are reused.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Formula-versus-oracle checks at size n.
    Verify {
        #[arg(long)]
        n: usize,
    },
    /// Per-class pattern counts, formula against exhaustive census, as JSON.
    VerifyPatterns {
        #[arg(long)]
        n: usize,
    },
    /// The family of proper tables and g as a polynomial in d.
    Family {
        #[arg(long)]
        n: usize,
        /// Also print g^(d)_{n,t} at this d.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Cluster density sum_t g p^n (1-p)^t at rational p.
    Density {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// E.g. 1/2.
        #[arg(long)]
        p: String,
    },
    /// Check every g2 weight candidate against enumeration.
    CalibrateG2 {
        #[arg(long, default_values_t = vec![6, 7])]
        n: Vec<usize>,
    },
}

enum Failure {
    Error(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn emit(table: &PerimeterTable, mode: Mode, provenance: Provenance, started: Instant, output: &Output) -> Result<(), Failure> {
    let wall = (!output.reproducible).then(|| started.elapsed().as_millis() as u64);
    let file = ResultFile::from_table(table, mode, provenance, wall);
    finish(file, output)
}

fn finish(mut file: ResultFile, output: &Output) -> Result<(), Failure> {
    eprintln!("{file}");
    if output.reproducible {
        file.header.wall_time_ms = None;
    }
    match &output.out {
        Some(path) => file.write(path, output.format)?,
        None => print!("{}", file.render(output.format)?),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    match cli.command {
        Command::G1 { n, output } => emit(&g1(n)?, Mode::Proper, Provenance::Formula, started, &output),
        Command::G2 { n, output } => match g2(n) {
            Ok(table) => emit(&table, Mode::Proper, Provenance::Formula, started, &output),
            Err(Error::RoutedToOracle { .. }) if n >= 3 => {
                eprintln!("note: g2 formula path needs n >= 6; enumerating instead");
                Enumerator::new(n, n - 2)?.check_budget(default_budget())?;
                let table = enumerate_proper(n, n - 2)?.pop().expect("tables");
                emit(&table, Mode::Proper, Provenance::Enumeration, started, &output)
            }
            Err(Error::RoutedToOracle { .. }) => {
                Err(Error::InvalidInput(format!("no polycube of size {n} is proper in n - 2 dimensions")).into())
            }
            Err(e) => Err(e.into()),
        },
        Command::Enumerate { n, d, proper, jobs, checkpoint_dir, output } => {
            let mut file = enumerate_file(n, d, proper, jobs, checkpoint_dir.as_deref())?;
            if !output.reproducible {
                file.header.wall_time_ms = Some(started.elapsed().as_millis() as u64);
            }
            finish(file, &output)
        }
        Command::Verify { n } => {
            let report = verify(n)?;
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification(format!("verification failed at n = {n}")))
            }
        }
        Command::VerifyPatterns { n } => verify_patterns(n),
        Command::Family { n, d } => {
            let family = hybrid_family(n)?;
            for i in family.dims() {
                let table = family.get(i).expect("listed");
                let provenance = family.provenance(i).expect("listed");
                println!("i={i} provenance={provenance} total={} {table}", table.total());
            }
            println!("{}", symbolic_in_d(&family)?);
            if let Some(d) = d {
                let poly = perimeter_polynomial(&family, d)?;
                println!("d={d} A_d(n)={} {}", poly.total(), symbolic_in_d(&family)?.evaluate(d)?);
            }
            Ok(())
        }
        Command::Density { n, d, p } => {
            let p: BigRational = p.parse().map_err(|_| Error::InvalidInput(format!("bad probability {p:?}")))?;
            let family = hybrid_family(n)?;
            let poly = perimeter_polynomial(&family, d)?;
            println!("{}", evaluate_density(&poly, &p)?);
            Ok(())
        }
        Command::CalibrateG2 { n } => {
            let mut reference = Vec::new();
            for &m in &n {
                if m < 6 {
                    return Err(Error::InvalidInput(format!("calibration needs n >= 6, got {m}")).into());
                }
                Enumerator::new(m, m - 2)?.check_budget(default_budget())?;
                reference.push(enumerate_proper(m, m - 2)?.pop().expect("tables"));
            }
            let rows = calibrate_g2(&reference)?;
            let survivors: Vec<_> = rows.iter().filter(|r| r.survives()).collect();
            for row in &rows {
                println!("{} {} matches={:?}", if row.survives() { "SURVIVES" } else { "rejected" }, row.weights, row.matches);
            }
            println!("candidates={} survivors={} frozen: {}", rows.len(), survivors.len(), G2_WEIGHTS);
            if survivors.len() == 1 && survivors[0].weights == G2_WEIGHTS {
                Ok(())
            } else {
                Err(Failure::Verification("calibration does not single out the frozen weights".into()))
            }
        }
    }
}

fn verify_patterns(n: usize) -> Result<(), Failure> {
    let census = merged_census(n)?;
    let mut all_ok = true;
    let mut entries = Vec::new();
    for (delta, c) in &census.by_delta {
        let classes = xx_classes(delta)?;
        for k in 1..=5 {
            let formula = classes[k - 1].to_string();
            let oracle = c.xx_classes[k].to_string();
            all_ok &= formula == oracle;
            entries.push(json!({"delta": delta.to_string(), "class": format!("xx{k}"), "formula": formula, "oracle": oracle}));
        }
        let mut push = |class: String, formula: String, oracle: String, binding: bool| {
            if binding {
                all_ok &= formula == oracle;
            }
            entries.push(json!({"delta": delta.to_string(), "class": class, "formula": formula, "oracle": oracle}));
        };
        push("xx".into(), count_xx(delta)?.to_string(), c.xx.to_string(), true);
        if n >= 5 {
            for (&(d0, d), &w) in &c.xyx_slices {
                push(format!("xyx({d0},{d})"), count_xyx(delta, d0, d)?.to_string(), w.to_string(), true);
            }
        }
        push("xyx".into(), count_xyx_total(delta)?.to_string(), c.xyx.to_string(), true);
        if n >= 6 {
            push("xyzx".into(), count_xyzx(delta)?.to_string(), c.xyzx.to_string(), true);
            push("xyzx-printed".into(), count_xyzx_printed(delta)?.to_string(), c.xyzx.to_string(), false);
        }
    }
    let out = json!({"n": n, "agree": all_ok, "entries": entries});
    println!("{}", serde_json::to_string_pretty(&out).map_err(Error::from)?);
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Verification(format!("pattern formulas disagree with the census at n = {n}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidInput(_) | Error::Domain { .. } => EXIT_INVALID,
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_OTHER,
            })
        }
    }
}
