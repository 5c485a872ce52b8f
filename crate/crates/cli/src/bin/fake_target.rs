//! Script-driven stand-in engine: `fake-target [--rules PATH] INPUT`.
//!
//! Writes the edges its rules assign to the input to `$COV_OUT`, one decimal
//! id per line, then exits, raises a signal, or hangs as the rules say.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;
use std::time::Duration;

use clap::Parser;
use patchforge::fuzz::fake::FakeTarget;

#[derive(Parser)]
#[command(name = "fake-target", about = "Deterministic fake JavaScript engine for pipeline tests")]
struct Args {
    /// Rules file (JSON); the bundled rules are used by default.
    #[arg(long)]
    rules: Option<PathBuf>,
    input: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let target = match &args.rules {
        None => FakeTarget::default_target(),
        Some(p) => match fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| FakeTarget::from_json(&t).map_err(|e| e.to_string())) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("fake-target: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
    };
    let src = match fs::read_to_string(&args.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("fake-target: {}: {e}", args.input.display());
            return ExitCode::from(2);
        }
    };
    let out = target.evaluate(&src);
    if let Some(path) = std::env::var_os("COV_OUT") {
        let body: String = out.edges.iter().map(|e| format!("{e}\n")).collect();
        if let Err(e) = fs::write(&path, body) {
            eprintln!("fake-target: writing coverage: {e}");
            return ExitCode::from(2);
        }
    }
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    if out.timed_out {
        loop {
            thread::sleep(Duration::from_secs(3600));
        }
    }
    if let Some(sig) = out.signal {
        // The Rust runtime handles SIGSEGV and SIGBUS itself; restore the
        // default action so the signal terminates the process.
        // SAFETY: plain libc calls on our own process.
        unsafe {
            libc::signal(sig, libc::SIG_DFL);
            libc::raise(sig);
        }
        // Only reached when the signal is ignored or handled.
        return ExitCode::from(128u8.wrapping_add(sig as u8));
    }
    ExitCode::from(out.exit_code.unwrap_or(0) as u8)
}
