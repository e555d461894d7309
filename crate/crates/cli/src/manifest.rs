//! Run manifests: every directory-producing command records what produced
//! its contents, so a run can be reproduced bitwise from the manifest alone.

use persphere::Result;
use std::path::Path;

pub struct ManifestRow {
    pub file: String,
    pub model: String,
    pub class: String,
    pub replicate: usize,
    pub stream: u64,
}

/// Write `manifest.csv` into `dir`: commented key=value header lines with
/// the command, tool version, seed, and parameters, then one row per output
/// file.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    seed: u64,
    params: &[(&str, String)],
    rows: &[ManifestRow],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# command={command}\n"));
    out.push_str(&format!("# version={}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# seed={seed}\n"));
    for (k, v) in params {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("file,model,class,replicate,stream\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.file, r.model, r.class, r.replicate, r.stream
        ));
    }
    persphere::io::write_atomic(&dir.join("manifest.csv"), out.as_bytes())
}
