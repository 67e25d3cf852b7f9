use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use isocorr::{Error, ErrorKind};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Json(serde_json::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "json: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(Error::Csv(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Io => 4,
            },
            CliError::Json(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    inputs: Vec<InputDigest>,
    outputs: &'a [String],
}

/// Output directory of one command invocation.
pub struct RunDir {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl RunDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn open(&mut self, name: &str) -> CliResult<BufWriter<fs::File>> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> CliResult<()> {
        let file = self.open(name)?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(self.dir.join(name), e))?;
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut file = self.open(name)?;
        serde_json::to_writer_pretty(&mut file, value)?;
        file.write_all(b"\n")
            .and_then(|_| file.flush())
            .map_err(|e| Error::io(self.dir.join(name), e))?;
        Ok(())
    }

    /// Registers a file written by other code.
    pub fn path_for(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    /// Writes `manifest.json`: command, config, input digests and the list of
    /// outputs. No timestamps or absolute output paths, so identical runs
    /// produce identical manifests.
    pub fn finish<C: Serialize>(
        mut self,
        command: &str,
        config: &C,
        inputs: &[&Path],
    ) -> CliResult<()> {
        let inputs = inputs
            .iter()
            .map(|p| digest(p))
            .collect::<CliResult<Vec<_>>>()?;
        let outputs = self.outputs.clone();
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
            outputs: &outputs,
        };
        self.json("manifest.json", &manifest)
    }
}

fn digest(path: &Path) -> CliResult<InputDigest> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}

/// Shortest round-trip decimal; empty for NaN so CSV readers see a blank.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
