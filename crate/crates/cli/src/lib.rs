//! Session-file front end for `drinlevel`.
//!
//! A session declares a base ring and named objects, then lists `run`
//! directives; commands may also be given on the command line. Exit codes:
//! `0` success, `1` some report has a false verdict, `2` an error occurred.

pub mod commands;
pub mod expr;
pub mod render;
pub mod report;
pub mod session;

pub use report::Report;
pub use session::{parse_session, Diagnostic, Kind, Session};

/// Reports produced before the first error, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub error: Option<Diagnostic>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.error.is_some() {
            2
        } else if self.reports.iter().any(|r| r.holds == Some(false)) {
            1
        } else {
            0
        }
    }

    /// Text reports separated by blank lines, or one JSON object per line.
    pub fn render(&self, json: bool) -> String {
        if json {
            self.reports.iter().map(|r| r.json() + "\n").collect()
        } else {
            self.reports.iter().map(Report::text).collect::<Vec<_>>().join("\n")
        }
    }
}

/// Runs `command` if given, otherwise every `run` directive of the session.
pub fn execute(session_text: Option<&str>, command: &[String]) -> Outcome {
    let mut out = Outcome { reports: Vec::new(), error: None };
    let session = match session_text.map(parse_session).transpose() {
        Ok(s) => s.unwrap_or_default(),
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    let jobs: Vec<(Option<usize>, &[String])> = if command.is_empty() {
        session.directives().into_iter().map(|(l, w)| (Some(l), w)).collect()
    } else {
        vec![(None, command)]
    };
    if jobs.is_empty() {
        out.error = Some(Diagnostic::new(Kind::Usage, "no command given and the session has no `run` directives"));
    }
    for (line, words) in jobs {
        match commands::run(&session, words) {
            Ok(r) => out.reports.push(r),
            Err(e) => {
                out.error = Some(match line {
                    Some(l) => e.on_line(l),
                    None => e,
                });
                break;
            }
        }
    }
    out
}
