//! Target execution: the subprocess adapter and the executor interface the
//! extractor and the fuzzer share.
//!
//! Adapter protocol: the argv template has `{input}` replaced by the sample
//! path, `COV_OUT` names a fresh file, and the target writes one decimal edge
//! id per line to it before exiting.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

/// How much stderr is kept for error classification.
pub const STDERR_HEAD: usize = 4096;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: Option<i32>,
    pub signal: Option<i32>,
    pub timed_out: bool,
    pub stdout: String,
    /// First [`STDERR_HEAD`] bytes.
    pub stderr: String,
    pub edges: Vec<u32>,
    pub wall_time: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error("cannot start target {program:?}: {source}")]
    Spawn { program: String, source: std::io::Error },
    #[error("target i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed coverage line {line}: {text:?}")]
    Coverage { line: usize, text: String },
    #[error("empty run command")]
    EmptyCommand,
}

pub trait Executor: Send {
    fn run(&mut self, sample: &str) -> Result<RunOutput, ExecError>;
}

impl<E: Executor + ?Sized> Executor for Box<E> {
    fn run(&mut self, sample: &str) -> Result<RunOutput, ExecError> {
        (**self).run(sample)
    }
}

/// Parses a COV_OUT file body. Blank lines are ignored.
pub fn parse_coverage(text: &str) -> Result<Vec<u32>, ExecError> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        edges.push(t.parse().map_err(|_| ExecError::Coverage { line: i + 1, text: t.to_string() })?);
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

pub struct SubprocessExecutor {
    argv: Vec<String>,
    timeout: Duration,
    env: Vec<(String, String)>,
    dir: tempfile::TempDir,
    runs: u64,
}

impl SubprocessExecutor {
    pub fn new(argv: Vec<String>, timeout: Duration) -> Result<Self, ExecError> {
        if argv.is_empty() {
            return Err(ExecError::EmptyCommand);
        }
        Ok(SubprocessExecutor { argv, timeout, env: Vec::new(), dir: tempfile::tempdir()?, runs: 0 })
    }

    pub fn with_env(mut self, key: &str, value: &str) -> Self {
        self.env.push((key.to_string(), value.to_string()));
        self
    }

    fn paths(&self) -> (PathBuf, PathBuf) {
        (self.dir.path().join("input.js"), self.dir.path().join(format!("cov-{}", self.runs)))
    }
}

fn read_limited<R: Read + Send + 'static>(mut r: R, limit: usize) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 8192];
        loop {
            match r.read(&mut chunk) {
                Ok(0) | Err(_) => break,
                Ok(n) => {
                    // Keep draining so the child never blocks on a full pipe.
                    let room = limit.saturating_sub(buf.len());
                    buf.extend_from_slice(&chunk[..n.min(room)]);
                }
            }
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

#[cfg(unix)]
fn own_process_group(cmd: &mut Command) {
    use std::os::unix::process::CommandExt;
    cmd.process_group(0);
}

#[cfg(not(unix))]
fn own_process_group(_cmd: &mut Command) {}

/// Kills the child and anything it spawned into its process group.
#[cfg(unix)]
fn kill_tree(child: &mut std::process::Child) {
    // SAFETY: plain syscall on a pid we own; a stale group id only yields ESRCH.
    unsafe {
        libc::kill(-(child.id() as i32), libc::SIGKILL);
    }
    let _ = child.kill();
}

#[cfg(not(unix))]
fn kill_tree(child: &mut std::process::Child) {
    let _ = child.kill();
}

#[cfg(unix)]
fn signal_of(status: &std::process::ExitStatus) -> Option<i32> {
    use std::os::unix::process::ExitStatusExt;
    status.signal()
}

#[cfg(not(unix))]
fn signal_of(_status: &std::process::ExitStatus) -> Option<i32> {
    None
}

impl Executor for SubprocessExecutor {
    fn run(&mut self, sample: &str) -> Result<RunOutput, ExecError> {
        self.runs += 1;
        let (input, cov) = self.paths();
        fs::write(&input, sample)?;
        let input_str = input.to_string_lossy();
        let args: Vec<String> = self.argv[1..].iter().map(|a| a.replace("{input}", &input_str)).collect();
        let start = Instant::now();
        let mut cmd = Command::new(&self.argv[0]);
        own_process_group(&mut cmd);
        let mut child = cmd
            .args(&args)
            .env("COV_OUT", &cov)
            .envs(self.env.iter().map(|(k, v)| (k, v)))
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| ExecError::Spawn { program: self.argv[0].clone(), source })?;
        let out_reader = read_limited(child.stdout.take().expect("piped"), 1 << 20);
        let err_reader = read_limited(child.stderr.take().expect("piped"), STDERR_HEAD);
        let (status, timed_out) = match child.wait_timeout(self.timeout)? {
            Some(s) => (s, false),
            None => {
                kill_tree(&mut child);
                (child.wait()?, true)
            }
        };
        let wall_time = start.elapsed();
        let stdout = out_reader.join().unwrap_or_default();
        let stderr = err_reader.join().unwrap_or_default();
        let edges = match fs::read_to_string(&cov) {
            Ok(text) => parse_coverage(&text)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let _ = fs::remove_file(&cov);
        Ok(RunOutput {
            exit_code: status.code(),
            signal: if timed_out { None } else { signal_of(&status) },
            timed_out,
            stdout,
            stderr,
            edges,
            wall_time,
        })
    }
}

#[cfg(all(test, unix))]
mod tests {
    use super::*;

    fn sh(script: &str) -> SubprocessExecutor {
        SubprocessExecutor::new(
            vec!["/bin/sh".into(), "-c".into(), script.into(), "sh".into(), "{input}".into()],
            Duration::from_secs(5),
        )
        .unwrap()
    }

    #[test]
    fn passes_input_and_reads_coverage() {
        let mut ex = sh("cat \"$1\"; printf '7\\n3\\n7\\n' > \"$COV_OUT\"; exit 3");
        let out = ex.run("hello").unwrap();
        assert_eq!(out.stdout, "hello");
        assert_eq!(out.exit_code, Some(3));
        assert_eq!(out.edges, vec![3, 7]);
        assert!(!out.timed_out);
    }

    #[test]
    fn reports_signals() {
        let out = sh("kill -SEGV $$").run("").unwrap();
        assert_eq!(out.signal, Some(11));
        assert_eq!(out.exit_code, None);
    }

    #[test]
    fn times_out() {
        let mut ex = sh("sleep 5");
        ex.timeout = Duration::from_millis(100);
        let out = ex.run("").unwrap();
        assert!(out.timed_out);
        assert_eq!(out.signal, None);
    }

    #[test]
    fn missing_program_is_a_spawn_error() {
        let mut ex = SubprocessExecutor::new(vec!["/nonexistent/engine".into()], Duration::from_secs(1)).unwrap();
        assert!(matches!(ex.run(""), Err(ExecError::Spawn { .. })));
    }

    #[test]
    fn stderr_is_truncated() {
        let out = sh("head -c 10000 /dev/zero | tr '\\0' x >&2").run("").unwrap();
        assert_eq!(out.stderr.len(), STDERR_HEAD);
    }

    #[test]
    fn coverage_parse_errors_are_positioned() {
        assert!(matches!(parse_coverage("1\n\nx\n"), Err(ExecError::Coverage { line: 3, .. })));
    }
}
