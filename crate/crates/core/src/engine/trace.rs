use std::fmt::Debug;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One fired event, as exported for golden-trace regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub fire_time: f64,
    pub sequence_no: u64,
    pub target: String,
    pub kind: String,
    pub payload: String,
}

/// First 16 hex digits of the SHA-256 of the payload's `Debug` rendering.
pub fn payload_digest<T: Debug + ?Sized>(payload: &T) -> String {
    let text = format!("{payload:?}");
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes one JSON object per line.
pub fn write_trace<W: Write>(mut w: W, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a trace written by [`write_trace`]. Lines starting with `#` are
/// header lines and are skipped.
pub fn read_trace<R: BufRead>(r: R) -> std::io::Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        out.push(rec);
    }
    Ok(out)
}
