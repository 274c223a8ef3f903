//! Small filesystem helpers shared by the writers.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// Write `bytes` to `path` atomically: write a sibling temp file, then
/// rename over the destination. Rename is atomic on the same filesystem, so
/// readers never observe a partially written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = OsString::from(path.as_os_str());
    tmp_name.push(".tmp");
    let tmp = Path::new(&tmp_name).to_path_buf();
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
