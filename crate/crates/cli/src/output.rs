use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

/// Failure modes that map onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Usage, configuration or input error: exit 2.
    Usage(String),
    /// Aborted computation (integration blow-up and similar): exit 1.
    Aborted(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Aborted(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Aborted(m) => m,
        }
    }
}

impl From<isopair::Error> for CliError {
    fn from(e: isopair::Error) -> Self {
        match e {
            isopair::Error::Integration { .. } => CliError::Aborted(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command produced: a gate, a text summary, the JSON report and data files.
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub report: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Prefixes a core error with the file it came from.
pub fn in_file(path: &Path) -> impl Fn(isopair::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

pub fn pretty(v: &impl serde::Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

pub fn emit(outcome: &Outcome, dir: Option<&Path>, json: bool) -> CliResult<()> {
    if let Some(dir) = dir {
        let unwritable = |e: std::io::Error| CliError::Usage(format!("cannot write output directory {}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(unwritable)?;
        fs::write(dir.join("report.json"), pretty(&outcome.report)).map_err(unwritable)?;
        fs::write(dir.join("summary.txt"), &outcome.summary).map_err(unwritable)?;
        for (name, bytes) in &outcome.files {
            fs::write(dir.join(name), bytes).map_err(unwritable)?;
        }
    }
    if json {
        print!("{}", String::from_utf8(pretty(&outcome.report)).expect("utf8"));
    } else {
        print!("{}", outcome.summary);
    }
    Ok(())
}
