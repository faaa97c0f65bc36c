//! Content-addressed result cache for `scan`.
//!
//! A result is stored under the SHA-256 of everything that determines it;
//! writes go to a temporary file in the same directory and are renamed into
//! place, so readers never see a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fermat_core::criterion::Engine;
use fermat_core::zlattice::Route;
use fermat_core::Limits;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::report::{ReportDocument, SCHEMA_VERSION};

#[derive(Serialize)]
struct KeyInput<'a> {
    schema_version: u32,
    n: usize,
    m: usize,
    k: &'a str,
    /// `None` means the automatic per-instance choice.
    engine: Option<String>,
    snf: Option<String>,
    limits: &'a Limits,
}

pub fn key(n: usize, m: usize, k: &str, engine: Option<Engine>, snf: Option<Route>, limits: &Limits) -> String {
    let input = KeyInput {
        schema_version: SCHEMA_VERSION,
        n,
        m,
        k,
        engine: engine.map(|e| e.to_string()),
        snf: snf.map(|r| r.to_string()),
        limits,
    };
    let bytes = serde_json::to_vec(&input).expect("plain data serializes");
    hex::encode(Sha256::digest(bytes))
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A stored document, if present and readable under the current schema.
    pub fn get(&self, key: &str) -> Option<ReportDocument> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, doc: &ReportDocument) -> Result<()> {
        write_atomic(&self.path(key), doc.to_json().as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_depends_on_every_input() {
        let l = Limits::default();
        let base = key(4, 3, "all", None, None, &l);
        assert_eq!(base.len(), 64);
        assert_eq!(base, key(4, 3, "all", None, None, &l));
        let variants = [
            key(4, 5, "all", None, None, &l),
            key(6, 3, "all", None, None, &l),
            key(4, 3, "standard", None, None, &l),
            key(4, 3, "all", Some(Engine::Both), None, &l),
            key(4, 3, "all", None, Some(Route::D), &l),
            key(4, 3, "all", None, None, &Limits { max_basis: 1, ..l.clone() }),
        ];
        for v in variants {
            assert_ne!(v, base);
        }
    }

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(&dir.path().join("c")).unwrap();
        let doc: ReportDocument = serde_json::from_str(
            r#"{"schema_version":1,"n":2,"m":3,"K":"all","gamma":6,"rank":7,"d0":2,"dp":{"3":2},
                "verdict":"PRIMITIVE","engine":"linear","timings_ms":{}}"#,
        )
        .unwrap();
        assert!(cache.get("k").is_none());
        cache.put("k", &doc).unwrap();
        assert_eq!(cache.get("k"), Some(doc));
        fs::write(cache.path("bad"), "{").unwrap();
        assert!(cache.get("bad").is_none());
    }
}
