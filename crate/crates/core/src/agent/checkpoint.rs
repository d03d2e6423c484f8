//! Binary network checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic   8 bytes  "R2RLQNET"
//! version u32
//! layers  u32
//! per layer:
//!     rows u32, cols u32
//!     weights rows*cols f64, row-major
//!     biases  rows f64
//! meta    u32 byte length, then that many bytes of JSON
//! ```
//!
//! Weights round-trip bit-exactly; loads fail with the byte offset of the
//! first malformed field.

use super::{AgentError, Layer, QNetwork};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"R2RLQNET";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Limits that keep a corrupt header from asking for absurd allocations.
const MAX_LAYERS: u32 = 64;
const MAX_DIM: u32 = 1 << 20;

/// Identifying metadata carried alongside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub seed: u64,
    pub game_index: u64,
    pub total_reward: f64,
    pub config_hash: String,
}

pub fn save_checkpoint(
    path: &Path,
    net: &QNetwork,
    meta: &CheckpointMeta,
) -> Result<(), AgentError> {
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(net.layers.len() as u32).to_le_bytes());
    for layer in &net.layers {
        out.extend_from_slice(&(layer.rows as u32).to_le_bytes());
        out.extend_from_slice(&(layer.cols as u32).to_le_bytes());
        for w in &layer.w {
            out.extend_from_slice(&w.to_le_bytes());
        }
        for b in &layer.b {
            out.extend_from_slice(&b.to_le_bytes());
        }
    }
    let json = serde_json::to_vec(meta).expect("meta serializes");
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    std::fs::write(path, out)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], AgentError> {
        if self.pos + n > self.bytes.len() {
            return Err(AgentError::Checkpoint {
                offset: self.pos as u64,
                reason: format!(
                    "truncated while reading {what}: need {n} bytes, {} remain",
                    self.bytes.len() - self.pos
                ),
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, AgentError> {
        let s = self.take(4, what)?;
        Ok(u32::from_le_bytes(s.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>, AgentError> {
        let s = self.take(8 * n, what)?;
        Ok(s.chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn load_checkpoint(path: &Path) -> Result<(QNetwork, CheckpointMeta), AgentError> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
    };

    let magic_at = r.pos as u64;
    let magic = r.take(8, "magic")?;
    if magic != CHECKPOINT_MAGIC {
        return Err(AgentError::Checkpoint {
            offset: magic_at,
            reason: format!("bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}"),
        });
    }
    let version_at = r.pos as u64;
    let version = r.u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(AgentError::Checkpoint {
            offset: version_at,
            reason: format!("unsupported version {version}, expected {CHECKPOINT_VERSION}"),
        });
    }
    let count_at = r.pos as u64;
    let n_layers = r.u32("layer count")?;
    if n_layers == 0 || n_layers > MAX_LAYERS {
        return Err(AgentError::Checkpoint {
            offset: count_at,
            reason: format!("implausible layer count {n_layers}"),
        });
    }

    let mut layers = Vec::with_capacity(n_layers as usize);
    let mut prev_rows: Option<u32> = None;
    for i in 0..n_layers {
        let shape_at = r.pos as u64;
        let rows = r.u32("rows")?;
        let cols = r.u32("cols")?;
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(AgentError::Checkpoint {
                offset: shape_at,
                reason: format!("implausible layer {i} shape {rows}x{cols}"),
            });
        }
        if let Some(p) = prev_rows {
            if cols != p {
                return Err(AgentError::Checkpoint {
                    offset: shape_at,
                    reason: format!("layer {i} expects {cols} inputs but layer {} emits {p}", i - 1),
                });
            }
        }
        prev_rows = Some(rows);
        let w = r.f64s((rows * cols) as usize, "weights")?;
        let b = r.f64s(rows as usize, "biases")?;
        layers.push(Layer {
            rows: rows as usize,
            cols: cols as usize,
            w,
            b,
        });
    }

    let meta_len_at = r.pos as u64;
    let meta_len = r.u32("metadata length")?;
    let meta_at = r.pos as u64;
    let meta_bytes = r.take(meta_len as usize, "metadata")?;
    let meta: CheckpointMeta =
        serde_json::from_slice(meta_bytes).map_err(|e| AgentError::Checkpoint {
            offset: meta_at,
            reason: format!("metadata is not valid JSON: {e}"),
        })?;
    if r.pos != bytes.len() {
        return Err(AgentError::Checkpoint {
            offset: r.pos as u64,
            reason: format!("{} trailing bytes after metadata", bytes.len() - r.pos),
        });
    }
    let _ = meta_len_at;
    Ok((QNetwork { layers }, meta))
}

#[cfg(test)]
mod tests {
    use super::super::{layer_sizes, N_STATES};
    use super::*;
    use crate::rng::{stream, Purpose};
    use crate::types::RunConfig;

    fn sample_net() -> QNetwork {
        let mut rng = stream(99, Purpose::NetInit, 0);
        QNetwork::init(&layer_sizes(&RunConfig::default()), &mut rng)
    }

    fn sample_meta() -> CheckpointMeta {
        CheckpointMeta {
            seed: 42,
            game_index: 1999,
            total_reward: 123.456,
            config_hash: "deadbeefcafef00d".into(),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let net = sample_net();
        let meta = sample_meta();
        save_checkpoint(&path, &net, &meta).unwrap();
        let (loaded, loaded_meta) = load_checkpoint(&path).unwrap();
        assert_eq!(loaded, net);
        assert_eq!(loaded_meta, meta);
        // Input must still be the observation width.
        assert_eq!(loaded.input_width(), N_STATES);
    }

    #[test]
    fn bad_magic_reports_offset_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        save_checkpoint(&path, &sample_net(), &sample_meta()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, bytes).unwrap();
        match load_checkpoint(&path) {
            Err(AgentError::Checkpoint { offset: 0, .. }) => {}
            other => panic!("expected magic failure at offset 0, got {other:?}"),
        }
    }

    #[test]
    fn bad_version_reports_offset_eight() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        save_checkpoint(&path, &sample_net(), &sample_meta()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 9;
        std::fs::write(&path, bytes).unwrap();
        match load_checkpoint(&path) {
            Err(AgentError::Checkpoint { offset: 8, reason }) => {
                assert!(reason.contains("version"));
            }
            other => panic!("expected version failure at offset 8, got {other:?}"),
        }
    }

    #[test]
    fn truncation_reports_the_cut_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        save_checkpoint(&path, &sample_net(), &sample_meta()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = bytes.len() / 2;
        std::fs::write(&path, &bytes[..cut]).unwrap();
        match load_checkpoint(&path) {
            Err(AgentError::Checkpoint { offset, reason }) => {
                assert!(offset <= cut as u64, "offset {offset} past cut {cut}");
                assert!(reason.contains("truncated"));
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_between_layers_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        let mut net = sample_net();
        // Corrupt in-memory wiring: second layer claims the wrong input width.
        net.layers[1].cols += 1;
        let extra = net.layers[1].rows;
        net.layers[1].w.extend(std::iter::repeat_n(0.0, extra));
        save_checkpoint(&path, &net, &sample_meta()).unwrap();
        match load_checkpoint(&path) {
            Err(AgentError::Checkpoint { reason, .. }) => {
                assert!(reason.contains("inputs"), "{reason}");
            }
            other => panic!("expected wiring failure, got {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.ckpt");
        save_checkpoint(&path, &sample_net(), &sample_meta()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(b"junk");
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(AgentError::Checkpoint { .. })
        ));
    }
}
