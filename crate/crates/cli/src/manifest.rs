use std::path::PathBuf;

use gldpc::seeds::substream;
use serde::{Deserialize, Serialize};

pub const MANIFEST_FORMAT: &str = "gldpc-manifest/1";
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub peg: u64,
    pub lift: u64,
    pub de: u64,
    pub sim: u64,
}

impl Seeds {
    pub fn from_master(master: u64) -> Self {
        Seeds {
            master,
            peg: substream(master, "peg", 0),
            lift: substream(master, "lift", 0),
            de: substream(master, "de", 0),
            sim: substream(master, "sim", 0),
        }
    }
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub command: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
    /// Working directory the arguments are relative to.
    pub cwd: PathBuf,
    pub params: serde_json::Value,
    pub seeds: Option<Seeds>,
    pub version: String,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub outputs: Vec<FileDigest>,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
}
