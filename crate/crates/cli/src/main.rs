use std::io::{self, BufRead, IsTerminal, Write};
use std::panic::AssertUnwindSafe;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fdq_core::session::{ends_statement, relocate, split_statements, Session};
use fdq_core::table::OutputMode;
use fdq_core::Error;

#[derive(Parser)]
#[command(
    name = "fdq",
    version,
    about = "Mine and query functional dependencies in CSV tables"
)]
struct Cli {
    /// Result format: table, csv or records.
    #[arg(long, global = true, default_value = "table")]
    output: OutputMode,

    /// Token for null cells, on input and output.
    #[arg(long, global = true, default_value = "")]
    null: String,

    /// Worker threads for dependency mining.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory that relative LOAD, IMPORT and EXPORT paths resolve against.
    #[arg(long, global = true, env = "FDQ_DATA_DIR")]
    data_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session reading statements from standard input.
    Repl,
    /// Run a script or a single statement, stopping at the first error.
    Exec(ExecArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ExecArgs {
    /// Script file.
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
    /// Statement text.
    #[arg(short = 'c', long = "command")]
    command: Option<String>,
}

/// 1 for user errors, 2 for internal ones.
fn exit_code(e: &Error) -> u8 {
    if e.is_internal() {
        2
    } else {
        1
    }
}

fn report(e: &Error, line: usize) {
    match e {
        Error::Syntax { .. } => eprintln!("error: {e}"),
        _ => eprintln!("error in statement at line {line}: {e}"),
    }
}

fn run_batch(session: &mut Session, src: &str) -> u8 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for stmt in split_statements(src) {
        match session.run_command(&stmt.text) {
            Ok(resp) => {
                let _ = out.write_all(resp.text.as_bytes());
                if resp.quit {
                    break;
                }
            }
            Err(e) => {
                let _ = out.flush();
                let e = relocate(e, stmt.start);
                report(&e, stmt.start.line);
                return exit_code(&e);
            }
        }
    }
    let _ = out.flush();
    0
}

fn run_repl(session: &mut Session) -> anyhow::Result<()> {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout();
    let mut buffer = String::new();
    let mut first_line = 1;
    let mut line_no = 0;
    let prompt = |out: &mut io::Stdout, cont: bool| -> io::Result<()> {
        if interactive {
            out.write_all(if cont { b"...> " } else { b"fdq> " })?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(&mut out, false)?;
    let mut lines = stdin.lock().lines();
    loop {
        let line = lines.next().transpose().context("reading standard input")?;
        let eof = line.is_none();
        if let Some(l) = line {
            line_no += 1;
            if buffer.trim().is_empty() {
                buffer.clear();
                first_line = line_no;
            }
            buffer.push_str(&l);
            buffer.push('\n');
        }
        if !eof && !ends_statement(&buffer) {
            prompt(&mut out, !buffer.trim().is_empty())?;
            continue;
        }
        for stmt in split_statements(&buffer) {
            match session.run_command(&stmt.text) {
                Ok(resp) => {
                    out.write_all(resp.text.as_bytes())?;
                    if resp.quit {
                        out.flush()?;
                        return Ok(());
                    }
                }
                Err(e) => {
                    out.flush()?;
                    let mut start = stmt.start;
                    start.line += first_line - 1;
                    report(&relocate(e, start), start.line);
                }
            }
        }
        buffer.clear();
        if eof {
            break;
        }
        prompt(&mut out, false)?;
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> ExitCode {
    let mut session = Session::new();
    session.output = cli.output;
    session.null_token = cli.null;
    session.threads = cli.threads;
    session.data_dir = cli.data_dir;
    match cli.command {
        Command::Repl => match run_repl(&mut session) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::Exec(args) => {
            let src = match (args.file, args.command) {
                (Some(path), _) => match std::fs::read_to_string(&path) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("error: cannot read {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                },
                (None, Some(c)) => c,
                (None, None) => unreachable!("clap enforces one of -f and -c"),
            };
            ExitCode::from(run_batch(&mut session, &src))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a panic is an internal error; the default hook has already reported it
    std::panic::catch_unwind(AssertUnwindSafe(|| run(cli))).unwrap_or(ExitCode::from(2))
}
