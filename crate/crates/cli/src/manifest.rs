use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Record of one run: the command, every resolved parameter, and digests of
/// every input and output file.
#[derive(Debug, Default)]
pub struct Manifest {
    command: String,
    params: Vec<String>,
    inputs: Vec<(PathBuf, String)>,
    outputs: Vec<(PathBuf, String)>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut reader = BufReader::new(
        File::open(path).with_context(|| format!("cannot read {}", path.display()))?,
    );
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = reader.read(&mut buf)?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

impl Manifest {
    pub fn new(command: &str, params: Vec<String>) -> Self {
        Manifest {
            command: command.into(),
            params,
            ..Default::default()
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.outputs.push((path.to_path_buf(), digest));
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "version={}", env!("CARGO_PKG_VERSION"));
        for p in &self.params {
            let _ = writeln!(s, "{p}");
        }
        for (path, digest) in &self.inputs {
            let _ = writeln!(s, "input sha256={digest} {}", path.display());
        }
        for (path, digest) in &self.outputs {
            let name = path.file_name().map_or_else(
                || path.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            let _ = writeln!(s, "output sha256={digest} {name}");
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.txt");
        let mut f =
            File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        f.write_all(self.render().as_bytes())?;
        Ok(path)
    }
}
