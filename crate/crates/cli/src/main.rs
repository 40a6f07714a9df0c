use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Computations with Drinfeld modules and their level structures.
///
/// Exit status: 0 on success, 1 if a report has a false verdict, 2 on errors.
#[derive(Parser)]
#[command(name = "drinlevel", version)]
struct Args {
    /// Emit one JSON object per report.
    #[arg(long)]
    json: bool,
    /// Session file to load (`-` reads standard input).
    #[arg(short, long)]
    session: Option<PathBuf>,
    /// Command to run; without one, the session's `run` directives are executed.
    command: Vec<String>,
}

fn read_session(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match args.session.as_ref().map(read_session).transpose() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read session: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = drinlevel_cli::execute(text.as_deref(), &args.command);
    print!("{}", outcome.render(args.json));
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code())
}
