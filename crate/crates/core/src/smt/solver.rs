//! Running an SMT solver as a subprocess.

use std::io::{BufReader, Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::emit::SmtScript;
use super::model::SolverModel;
use super::sexp::{parse_all, Sexp, SexpReader};
use super::SmtError;

/// Digits requested from the solver for irrational values.
pub const DECIMAL_PRECISION: usize = 20;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub time_limit: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { path: PathBuf::from("z3"), time_limit: None }
    }
}

impl SolverConfig {
    /// Display name used in timing output: the executable's file name.
    pub fn name(&self) -> String {
        self.path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "solver".into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolverOutcome {
    Sat(SolverModel),
    Unsat,
    Unknown(String),
    Error(String),
}

#[derive(Clone, Debug)]
pub struct SolverRun {
    pub outcome: SolverOutcome,
    pub elapsed: Duration,
    pub output: String,
}

/// The script as submitted: the emitted commands plus a decimal re-print of the model.
pub fn solver_input(script: &SmtScript) -> String {
    format!(
        "{script}(set-option :pp.decimal true)\n(set-option :pp.decimal_precision {DECIMAL_PRECISION})\n(get-model)\n"
    )
}

fn interpret(output: &str) -> SolverOutcome {
    let items = match parse_all(output) {
        Ok(items) => items,
        Err(e) => return SolverOutcome::Error(format!("{e}; output was: {output}")),
    };
    let mut it = items.iter();
    let verdict = loop {
        match it.next() {
            Some(Sexp::Atom(a)) if matches!(a.as_str(), "sat" | "unsat" | "unknown") => break a.as_str(),
            Some(s) if s.head() == Some("error") => return SolverOutcome::Error(s.to_string()),
            Some(_) => continue,
            None => return SolverOutcome::Error(format!("no verdict in solver output: {output}")),
        }
    };
    match verdict {
        "unsat" => SolverOutcome::Unsat,
        "unknown" => SolverOutcome::Unknown("solver returned unknown".into()),
        _ => {
            let models: Vec<&Sexp> = it.filter(|s| s.head() != Some("error") && s.list().is_some()).collect();
            let Some(first) = models.first() else {
                return SolverOutcome::Error("sat without a model".into());
            };
            let result = SolverModel::from_sexp(first).and_then(|mut m| {
                if m.has_algebraic() {
                    let decimal = models.get(1).ok_or_else(|| SmtError::Parse("missing decimal model".into()))?;
                    m.refine(&SolverModel::from_sexp(decimal)?)?;
                }
                Ok(m)
            });
            match result {
                Ok(m) => SolverOutcome::Sat(m),
                Err(e) => SolverOutcome::Error(e.to_string()),
            }
        }
    }
}

fn launch_error(cfg: &SolverConfig, e: impl ToString) -> SmtError {
    SmtError::Launch { path: cfg.path.display().to_string(), message: e.to_string() }
}

/// Runs the solver on `script`, killing it when the time limit expires.
pub fn run_solver(script: &SmtScript, cfg: &SolverConfig) -> Result<SolverRun, SmtError> {
    let mut file = tempfile::Builder::new().suffix(".smt2").tempfile().map_err(|e| SmtError::Io(e.to_string()))?;
    file.write_all(solver_input(script).as_bytes()).map_err(|e| SmtError::Io(e.to_string()))?;
    file.flush().map_err(|e| SmtError::Io(e.to_string()))?;

    let start = Instant::now();
    let mut child = Command::new(&cfg.path)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| launch_error(cfg, e))?;
    let mut stdout = child.stdout.take().unwrap();
    let mut stderr = child.stderr.take().unwrap();
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let mut timed_out = false;
    loop {
        if child.try_wait().map_err(|e| SmtError::Io(e.to_string()))?.is_some() {
            break;
        }
        if cfg.time_limit.is_some_and(|t| start.elapsed() >= t) {
            let _ = child.kill();
            let _ = child.wait();
            timed_out = true;
            break;
        }
        thread::sleep(Duration::from_millis(2));
    }
    let elapsed = start.elapsed();
    if timed_out {
        // Descendants of a killed solver may still hold the pipes open; leave the readers detached.
        return Ok(SolverRun { outcome: SolverOutcome::Unknown("timeout".into()), elapsed, output: String::new() });
    }
    let output = out_reader.join().unwrap_or_default();
    let errors = err_reader.join().unwrap_or_default();
    let outcome = match interpret(&output) {
        SolverOutcome::Error(e) if !errors.trim().is_empty() => SolverOutcome::Error(format!("{e}\n{}", errors.trim())),
        o => o,
    };
    Ok(SolverRun { outcome, elapsed, output })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

/// An interactive solver process driven over its standard input.
pub struct Session {
    child: Child,
    stdin: ChildStdin,
    reader: SexpReader<BufReader<ChildStdout>>,
}

impl Session {
    /// Starts `path -in` with success acknowledgements enabled.
    pub fn start(cfg: &SolverConfig) -> Result<Session, SmtError> {
        let mut child = Command::new(&cfg.path)
            .arg("-in")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| launch_error(cfg, e))?;
        let stdin = child.stdin.take().unwrap();
        let reader = SexpReader::new(BufReader::new(child.stdout.take().unwrap()));
        let mut s = Session { child, stdin, reader };
        s.command("(set-option :print-success true)")?;
        Ok(s)
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        writeln!(self.stdin, "{text}").and_then(|_| self.stdin.flush()).map_err(|e| SmtError::Io(e.to_string()))
    }

    fn response(&mut self) -> Result<Sexp, SmtError> {
        let s = self.reader.next_sexp()?.ok_or_else(|| SmtError::Solver("solver exited".into()))?;
        if s.head() == Some("error") {
            return Err(SmtError::Solver(s.to_string()));
        }
        Ok(s)
    }

    /// Sends a command that answers `success`.
    pub fn command(&mut self, text: &str) -> Result<(), SmtError> {
        self.send(text)?;
        match self.response()? {
            Sexp::Atom(a) if a == "success" => Ok(()),
            other => Err(SmtError::Solver(format!("unexpected response {other} to {text}"))),
        }
    }

    /// Sends several commands, e.g. a script preamble.
    pub fn load(&mut self, script: &str) -> Result<(), SmtError> {
        for s in parse_all(script)? {
            self.command(&s.to_string())?;
        }
        Ok(())
    }

    pub fn assert(&mut self, formula: &str) -> Result<(), SmtError> {
        self.command(&format!("(assert {formula})"))
    }

    pub fn push(&mut self) -> Result<(), SmtError> {
        self.command("(push 1)")
    }

    pub fn pop(&mut self) -> Result<(), SmtError> {
        self.command("(pop 1)")
    }

    pub fn check_sat(&mut self) -> Result<Verdict, SmtError> {
        self.send("(check-sat)")?;
        match self.response()?.atom() {
            Some("sat") => Ok(Verdict::Sat),
            Some("unsat") => Ok(Verdict::Unsat),
            Some("unknown") => Ok(Verdict::Unknown),
            _ => Err(SmtError::Solver("unexpected check-sat response".into())),
        }
    }

    /// The current model, with decimal approximations for algebraic values.
    pub fn get_model(&mut self) -> Result<SolverModel, SmtError> {
        self.send("(get-model)")?;
        let mut m = SolverModel::from_sexp(&self.response()?)?;
        if m.has_algebraic() {
            self.command("(set-option :pp.decimal true)")?;
            self.command(&format!("(set-option :pp.decimal_precision {DECIMAL_PRECISION})"))?;
            self.send("(get-model)")?;
            let decimal = SolverModel::from_sexp(&self.response()?);
            self.command("(set-option :pp.decimal false)")?;
            m.refine(&decimal?)?;
        }
        Ok(m)
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.send("(exit)");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interprets_verdicts() {
        assert_eq!(interpret("unsat\n(error \"model is not available\")\n"), SolverOutcome::Unsat);
        assert!(matches!(interpret("(error \"bad\")\n"), SolverOutcome::Error(_)));
        match interpret("sat\n(\n (define-fun x () Real\n (root-obj (+ (^ x 2) (- 2)) 2))\n)\n(\n (define-fun x () Real\n 1.41421356237309504880?)\n)\n") {
            SolverOutcome::Sat(m) => assert!(!m.has_algebraic()),
            other => panic!("{other:?}"),
        }
    }
}
