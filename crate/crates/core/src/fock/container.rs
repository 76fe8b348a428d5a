//! JSON container for density operators: mode list, cutoff, block label,
//! trace deficit and the upper triangle of every block in row-major order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BlockKey, BlockLabel, DensityOperator, ModeLabel, MultiModeBasis};
use crate::linalg::CMat;
use crate::{Error, Result};

pub const CONTAINER_FORMAT: &str = "mqs-density-operator";
pub const CONTAINER_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorContainer {
    pub format: String,
    pub version: u32,
    pub modes: Vec<ModeLabel>,
    pub cutoff: usize,
    pub label: BlockLabel,
    pub trace_deficit: f64,
    /// `[row, col, re, im]` with `row ≤ col`, sorted by `(row, col)`.
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl DensityOperator {
    pub fn to_container(&self) -> OperatorContainer {
        let mut entries = Vec::new();
        for (_, block) in self.blocks() {
            let idx = block.indices();
            for i in 0..idx.len() {
                for j in i..idx.len() {
                    let v = block.matrix()[(i, j)];
                    entries.push((idx[i], idx[j], v.re, v.im));
                }
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        OperatorContainer {
            format: CONTAINER_FORMAT.into(),
            version: CONTAINER_VERSION,
            modes: self.basis().modes().to_vec(),
            cutoff: self.basis().cutoff(),
            label: self.label().clone(),
            trace_deficit: self.trace_deficit(),
            entries,
        }
    }

    pub fn from_container(c: &OperatorContainer) -> Result<Self> {
        if c.format != CONTAINER_FORMAT || c.version != CONTAINER_VERSION {
            return Err(Error::Container(format!("unsupported format {} v{}", c.format, c.version)));
        }
        let basis = MultiModeBasis::new(&c.modes, c.cutoff)?;
        let mut supports: BTreeMap<BlockKey, Vec<usize>> = BTreeMap::new();
        for &(r, col, _, _) in &c.entries {
            if r > col || col >= basis.dim() {
                return Err(Error::Container(format!("entry ({r}, {col}) out of range")));
            }
            let key = c.label.key(&basis, r);
            if c.label.key(&basis, col) != key {
                return Err(Error::Container(format!("entry ({r}, {col}) crosses blocks")));
            }
            supports.entry(key.clone()).or_default().push(r);
            supports.entry(key).or_default().push(col);
        }
        let mut blocks: BTreeMap<BlockKey, (Vec<usize>, CMat)> = supports
            .into_iter()
            .map(|(k, mut s)| {
                s.sort_unstable();
                s.dedup();
                let n = s.len();
                (k, (s, CMat::zeros(n, n)))
            })
            .collect();
        for &(r, col, re, im) in &c.entries {
            let (idx, m) = blocks.get_mut(&c.label.key(&basis, r)).expect("registered above");
            let i = idx.binary_search(&r).expect("registered");
            let j = idx.binary_search(&col).expect("registered");
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
        Self::from_blocks(basis, c.label.clone(), blocks.into_values().collect(), c.trace_deficit)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&self.to_container()).map_err(|e| Error::Container(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: OperatorContainer = serde_json::from_str(text).map_err(|e| Error::Container(e.to_string()))?;
        Self::from_container(&c)
    }
}

/// Leading bytes of the binary encoding.
pub const BINARY_MAGIC: &[u8; 8] = b"MQSOP\x01\n\0";

/// Container metadata without the entries; the binary encoding stores it as
/// JSON in front of the raw entry records.
#[derive(Serialize, Deserialize)]
struct BinaryHeader {
    format: String,
    version: u32,
    modes: Vec<ModeLabel>,
    cutoff: usize,
    label: BlockLabel,
    trace_deficit: f64,
    entries: usize,
}

const RECORD: usize = 24;

impl OperatorContainer {
    /// Magic, a little-endian `u64` header length, the JSON header, then one
    /// 24-byte record per entry: `u32` row, `u32` column, `f64` re, `f64` im.
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = BinaryHeader {
            format: self.format.clone(),
            version: self.version,
            modes: self.modes.clone(),
            cutoff: self.cutoff,
            label: self.label.clone(),
            trace_deficit: self.trace_deficit,
            entries: self.entries.len(),
        };
        let json = serde_json::to_vec(&header).expect("plain data serializes");
        let mut out = Vec::with_capacity(16 + json.len() + RECORD * self.entries.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for &(r, c, re, im) in &self.entries {
            out.extend_from_slice(&(r as u32).to_le_bytes());
            out.extend_from_slice(&(c as u32).to_le_bytes());
            out.extend_from_slice(&re.to_le_bytes());
            out.extend_from_slice(&im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Container(m.to_string());
        if bytes.len() < 16 || &bytes[..8] != BINARY_MAGIC {
            return Err(bad("missing binary magic"));
        }
        let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
        let body = bytes.get(16..16 + len).ok_or_else(|| bad("truncated header"))?;
        let h: BinaryHeader = serde_json::from_slice(body).map_err(|e| Error::Container(e.to_string()))?;
        let records = &bytes[16 + len..];
        if records.len() != h.entries * RECORD {
            return Err(bad("entry section has the wrong length"));
        }
        let entries = records
            .chunks_exact(RECORD)
            .map(|r| {
                let u = |a: usize| u32::from_le_bytes(r[a..a + 4].try_into().expect("4 bytes")) as usize;
                let f = |a: usize| f64::from_le_bytes(r[a..a + 8].try_into().expect("8 bytes"));
                (u(0), u(4), f(8), f(16))
            })
            .collect();
        Ok(Self {
            format: h.format,
            version: h.version,
            modes: h.modes,
            cutoff: h.cutoff,
            label: h.label,
            trace_deficit: h.trace_deficit,
            entries,
        })
    }
}

impl DensityOperator {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_container().to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_container(&OperatorContainer::from_bytes(bytes)?)
    }
}
