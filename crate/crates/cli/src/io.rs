use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use reserving::{LineOfBusiness, LossKind};

use crate::config::Model;
use crate::error::{CliError, CliResult};

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Reads an artifact; a missing file is reported as a missing dependency.
pub fn read_json<T: DeserializeOwned>(path: &Path, produced_by: &str) -> CliResult<T> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CliError::Missing(format!("{} (run `{produced_by}` first)", path.display())))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn read_bytes(path: &Path, produced_by: &str) -> CliResult<Vec<u8>> {
    match fs::read(path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(CliError::Missing(format!("{} (run `{produced_by}` first)", path.display())))
        }
        Err(e) => Err(e.into()),
    }
}

/// Directory layout under `--out`.
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn data_dir(&self, lob: LineOfBusiness) -> PathBuf {
        self.root.join("data").join(lob.as_str())
    }

    pub fn dataset(&self, dir: &Path, code: &str) -> PathBuf {
        dir.join(format!("{code}.json"))
    }

    pub fn fit_dir(&self, lob: LineOfBusiness, kind: LossKind) -> PathBuf {
        self.root.join("fit").join(lob.as_str()).join(kind.as_str())
    }

    pub fn fit(&self, lob: LineOfBusiness, kind: LossKind, model: Model, code: &str) -> PathBuf {
        self.fit_dir(lob, kind).join(model.as_str()).join(format!("{code}.json"))
    }

    pub fn diagnostics(&self, lob: LineOfBusiness, kind: LossKind, code: &str) -> PathBuf {
        self.fit_dir(lob, kind)
            .join(Model::Macknet.as_str())
            .join(format!("{code}_diagnostics.json"))
    }

    pub fn sims(&self, lob: LineOfBusiness, kind: LossKind, model: Model, code: &str) -> PathBuf {
        self.root
            .join("sims")
            .join(lob.as_str())
            .join(kind.as_str())
            .join(model.as_str())
            .join(format!("{code}.csv"))
    }

    pub fn summary(&self, lob: LineOfBusiness, kind: LossKind, model: Model, code: &str) -> PathBuf {
        self.sims(lob, kind, model, code).with_file_name(format!("{code}_summary.json"))
    }

    pub fn report(&self, lob: LineOfBusiness, ext: &str) -> PathBuf {
        self.root.join("report").join(format!("{}.{ext}", lob.as_str()))
    }

    pub fn bench(&self, lob: LineOfBusiness, kind: LossKind, ext: &str) -> PathBuf {
        self.root
            .join("bench")
            .join(format!("{}_{}.{ext}", lob.as_str(), kind.as_str()))
    }

    pub fn run_metadata(&self, command: &str) -> PathBuf {
        self.root.join(format!("{command}_run.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b/c.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn missing_artifact_is_reported_as_such() {
        let dir = tempfile::tempdir().unwrap();
        let r: CliResult<serde_json::Value> = read_json(&dir.path().join("x.json"), "fit");
        assert!(matches!(r, Err(CliError::Missing(_))));
    }
}
