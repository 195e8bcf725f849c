use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = lrb_core::cli::run_args(std::env::args_os());
    if let (Some(report), true) = (&outcome.report, outcome.print_report) {
        let _ = std::io::stdout().lock().write_all(report.as_bytes());
    }
    if let Some(message) = &outcome.message {
        eprintln!("{}", message.trim_end());
    }
    ExitCode::from(outcome.code as u8)
}
