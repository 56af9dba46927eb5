//! `qpath`: build, check and verify path decompositions of hypercubes.
//!
//! Exit codes: 0 success, 1 a negative answer or failed verification,
//! 2 usage or parameter errors, 3 resource limits.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qpath_core::decompose::{decompose_plan, divisibility_failure, Decomposition};
use qpath_core::dvop::dvop_for;
use qpath_core::format::{verify_reader, write_decomposition};
use qpath_core::ham::{self, CycleIndex};
use qpath_core::verify::{
    brute_force_decompose, verify_decomposition, verify_dvop, DvopCheck, DEFAULT_SEED,
};
use qpath_core::{Error, Limits};

#[derive(Parser)]
#[command(
    name = "qpath",
    version,
    about = "Path decompositions of odd-dimensional hypercubes"
)]
struct Cli {
    /// Largest edge count of a cube that may be built or verified.
    #[arg(long, global = true, default_value_t = 1 << 28)]
    max_edges: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether P_m can divide Q_q.
    Check {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        q: u64,
    },
    /// Build a P_m decomposition of Q_q and write it in HPD1 format.
    Decompose {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        q: u64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify the paths after writing them.
        #[arg(long)]
        verify: bool,
        /// Print the construction plan and stop.
        #[arg(long)]
        plan: bool,
    },
    /// Verify an HPD1 file.
    Verify { file: PathBuf },
    /// Summarize the Hamiltonian cycles of Q_{2^r}, or list one of them.
    Ham {
        #[arg(long)]
        r: u32,
        /// Cycle index; bit 0 is the first component.
        #[arg(long)]
        delta: Option<u32>,
    },
    /// Build and verify a vertex-originating path system on Q_{2^r}.
    Dvop {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        /// Check this many seeded random vertices instead of all of them.
        #[arg(long)]
        sample: Option<u64>,
    },
    /// Search exhaustively for a P_m decomposition of a tiny cube.
    Oracle {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: u32,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::InvalidIndex(_) | Error::Unsupported(_) => 2,
        Error::ResourceLimit { .. } => 3,
        Error::NotDivisible { .. } | Error::Format { .. } | Error::Io(_) => 1,
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let limits = Limits::new(cli.max_edges);
    match cli.command {
        Command::Check { m, q } => {
            let failure = divisibility_failure(m, q)?;
            match &failure {
                None => println!("yes: P_{m} satisfies the condition for Q_{q}"),
                Some(reason) => println!("no: {reason}"),
            }
            Ok(verdict(failure.is_none()))
        }
        Command::Decompose {
            m,
            q,
            out,
            verify,
            plan,
        } => {
            let p = decompose_plan(m, q)?;
            if plan {
                print!("{p}");
                return Ok(ExitCode::SUCCESS);
            }
            let d = Decomposition::from_plan(&p, &limits)?;
            match &out {
                Some(path) => {
                    let file = BufWriter::new(File::create(path)?);
                    write_decomposition(&d, file)?;
                    println!(
                        "wrote {} paths of length {m} in Q_{q} to {}",
                        d.path_count(),
                        path.display()
                    );
                }
                None => {
                    write_decomposition(&d, BufWriter::new(io::stdout().lock()))?;
                }
            }
            if !verify {
                return Ok(ExitCode::SUCCESS);
            }
            let report = match &out {
                Some(path) => verify_reader(BufReader::new(File::open(path)?), &limits)?.1,
                None => verify_decomposition(&d, &limits)?,
            };
            // Keep standard output a clean file when the paths go there.
            if out.is_some() {
                println!("{report}");
            } else {
                eprintln!("{report}");
            }
            Ok(verdict(report.ok))
        }
        Command::Verify { file } => {
            let (header, report) = verify_reader(BufReader::new(File::open(&file)?), &limits)?;
            println!(
                "{}: P_{} in Q_{}: {report}",
                file.display(),
                header.m,
                header.q
            );
            Ok(verdict(report.ok))
        }
        Command::Ham { r, delta } => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            match delta {
                Some(delta) => {
                    let c = CycleIndex::new(r, delta)?;
                    let cycle = ham::cycle(c)?;
                    let labels: Vec<String> =
                        cycle.verts().iter().map(|v| format!("{v:x}")).collect();
                    writeln!(stdout, "{}", labels.join(" "))?;
                }
                None => {
                    for c in CycleIndex::all(r)? {
                        writeln!(stdout, "g{c}: length {} in Q_{}", c.cycle_len(), c.dim())?;
                    }
                }
            }
            stdout.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dvop { r, k, sample } => {
            let d = dvop_for(r, k)?;
            let check = DvopCheck {
                samples: sample,
                seed: DEFAULT_SEED,
            };
            let report = verify_dvop(&d, &check, &limits)?;
            let complement: Vec<String> = d.complement().iter().map(|c| format!("g{c}")).collect();
            println!("{} system, k={k} on Q_{}", d.kind(), d.dim());
            println!(
                "complement: {} cycles [{}]",
                complement.len(),
                complement.join(", ")
            );
            println!("{report}");
            Ok(verdict(report.ok))
        }
        Command::Oracle { q, m } => match brute_force_decompose(q, m)? {
            Some(paths) => {
                println!("found {} paths of length {m} in Q_{q}", paths.len());
                for p in paths {
                    let labels: Vec<String> = p.verts().iter().map(|v| format!("{v:x}")).collect();
                    println!("{}", labels.join(" "));
                }
                Ok(ExitCode::SUCCESS)
            }
            None => {
                println!("none: P_{m} does not divide Q_{q}");
                Ok(ExitCode::from(1))
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qpath: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
