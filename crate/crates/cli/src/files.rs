use std::fs;
use std::path::{Path, PathBuf};

use gldpc::{PdGldpcCode, SparsePcm};
use gldpc::doping::DopingSidecar;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Byte offset of a 1-based line/column position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn parse_json<T: DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        CliError::Usage(format!("{}: parse error at byte {}: invalid UTF-8", path.display(), e.valid_up_to()))
    })?;
    serde_json::from_str(text).map_err(|e| {
        CliError::Usage(format!(
            "{}: parse error at byte {}: {e}",
            path.display(),
            byte_offset(text, e.line(), e.column())
        ))
    })
}

pub fn parse_pcm(path: &Path, bytes: &[u8]) -> Result<SparsePcm, CliError> {
    let parsed = if bytes.starts_with(b"GPCM") {
        SparsePcm::from_bytes(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| {
            CliError::Usage(format!("{}: parse error at byte {}: invalid UTF-8", path.display(), e.valid_up_to()))
        })?;
        SparsePcm::from_alist(text)
    };
    parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Tracks every file a command reads or writes so the manifest can record
/// their digests.
#[derive(Debug, Default)]
pub struct Io {
    pub inputs: Vec<(PathBuf, String)>,
    pub outputs: Vec<(String, String)>,
    out_dir: PathBuf,
}

impl Io {
    pub fn new(out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Io {
            out_dir: out_dir.to_path_buf(),
            ..Default::default()
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = read_bytes(path)?;
        let abs = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
        self.inputs.push((abs, sha256_hex(&bytes)));
        Ok(bytes)
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        parse_json(path, &bytes)
    }

    pub fn read_code(&mut self, pcm: &Path, sidecar: &Path) -> Result<PdGldpcCode, CliError> {
        let bytes = self.read(pcm)?;
        let pcm_m = parse_pcm(pcm, &bytes)?;
        let side: DopingSidecar = self.read_json(sidecar)?;
        PdGldpcCode::from_parts(pcm_m, side).map_err(|e| CliError::Usage(format!("{}: {e}", sidecar.display())))
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn write_code(&mut self, code: &PdGldpcCode) -> Result<(), CliError> {
        let pcm = code.pcm().pcm();
        self.write("code.alist", pcm.to_alist().as_bytes())?;
        self.write("code.gpcm", &pcm.to_bytes())?;
        self.write_json("base.json", code.base())?;
        self.write_json("doping.json", &code.sidecar())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_bytes() {
        let t = "{\n  \"a\": x\n}";
        assert_eq!(byte_offset(t, 2, 8), 9);
        assert_eq!(&t[9..10], "x");
        assert_eq!(byte_offset(t, 1, 1), 0);
    }

    #[test]
    fn json_errors_name_offset() {
        let err = parse_json::<Vec<u32>>(Path::new("x.json"), b"[1, 2,\n oops]").unwrap_err();
        assert!(err.to_string().contains("byte 8"), "{err}");
    }
}
