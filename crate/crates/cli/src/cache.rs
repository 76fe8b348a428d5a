//! On-disk cache of density operators in the core binary container format.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use mqs_core::fock::DensityOperator;
use sha2::{Digest, Sha256};

use crate::RunError;

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct OperatorCache {
    dir: Option<PathBuf>,
}

impl OperatorCache {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, RunError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| RunError::Io(format!("cache dir {}: {e}", d.display())))?;
        }
        Ok(Self { dir })
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let digest: String = Sha256::digest(key.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        self.dir.as_ref().map(|d| d.join(format!("{digest}.mqsop")))
    }

    /// Returns the cached operator for `key`, computing and storing it on a
    /// miss. Unreadable entries are recomputed and overwritten.
    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> mqs_core::Result<DensityOperator>,
    ) -> Result<DensityOperator, RunError> {
        let Some(path) = self.path(key) else {
            return Ok(compute()?);
        };
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(rho) = DensityOperator::from_bytes(&bytes) {
                return Ok(rho);
            }
        }
        let rho = compute()?;
        // Concurrent writers of the same key each rename their own file.
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = path.with_extension(format!("{}.{n}.tmp", std::process::id()));
        fs::write(&tmp, rho.to_bytes()).map_err(|e| RunError::Io(format!("{}: {e}", tmp.display())))?;
        fs::rename(&tmp, &path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        Ok(rho)
    }
}
