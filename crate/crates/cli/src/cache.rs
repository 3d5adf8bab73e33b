//! On-disk cache of Cayley balls in the JSON graph format.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use wallkit::coxeter::{CayleyBall, CoxeterSystem};
use wallkit::graph::{BallGraph, GraphRecord};
use wallkit::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn system_digest(sys: &CoxeterSystem) -> String {
    let rec = serde_json::to_vec(&sys.to_record()).expect("system records serialise");
    sha256_hex(&rec)
}

/// `WALLKIT_CACHE_DIR`, else the user cache directory.
pub fn default_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("WALLKIT_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("wallkit"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("wallkit"))
}

pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BallCache { dir: dir.into() }
    }

    pub fn path(&self, sys: &CoxeterSystem, radius: u32) -> PathBuf {
        let digest = system_digest(sys);
        self.dir
            .join(format!("ball-{}-r{radius}-v{VERSION}.json", &digest[..16]))
    }

    /// Cached ball, or a fresh one that is then published. A cache entry that
    /// fails to load is regenerated.
    pub fn get(&self, sys: &CoxeterSystem, radius: u32) -> Result<CayleyBall> {
        let path = self.path(sys, radius);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(ball) = load(sys, &text, radius) {
                return Ok(ball);
            }
        }
        let ball = sys.cayley_ball(radius)?;
        // A failed publish only costs a rebuild next time.
        let _ = publish(&path, &ball.graph);
        Ok(ball)
    }
}

fn load(sys: &CoxeterSystem, text: &str, radius: u32) -> Result<CayleyBall> {
    let rec: GraphRecord = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
    if rec.radius != Some(radius) {
        return Err(Error::Io("cached radius mismatch".into()));
    }
    let graph = BallGraph::from_record(&rec)?;
    let words = rec
        .labels
        .iter()
        .map(|l| sys.parse_word(l))
        .collect::<Result<Vec<_>>>()?;
    let index: HashMap<_, _> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    if index.len() != words.len() {
        return Err(Error::Io("cached ball repeats a word".into()));
    }
    Ok(CayleyBall { graph, words, index })
}

/// Writes to a temporary file beside `path`, then renames it into place.
fn publish(path: &Path, g: &BallGraph) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&serde_json::to_vec(&g.to_record()).map_err(|e| Error::Io(e.to_string()))?)?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use wallkit::fixtures;

    #[test]
    fn reloaded_ball_matches_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        let sys = fixtures::triangle_237();
        let first = cache.get(&sys, 5).unwrap();
        assert!(cache.path(&sys, 5).exists());
        let again = cache.get(&sys, 5).unwrap();
        let fresh = sys.cayley_ball(5).unwrap();
        for b in [&first, &again] {
            assert_eq!(b.graph.to_record(), fresh.graph.to_record());
            assert_eq!(b.words, fresh.words);
            assert_eq!(b.index, fresh.index);
        }
    }

    #[test]
    fn corrupt_entry_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        let sys = fixtures::infinite_dihedral();
        fs::write(cache.path(&sys, 3), "{not json").unwrap();
        assert_eq!(cache.get(&sys, 3).unwrap().graph.len(), 7);
    }

    #[test]
    fn keys_separate_systems_and_radii() {
        let cache = BallCache::new("/tmp/x");
        let a = fixtures::triangle_237();
        let b = fixtures::triangle_333();
        assert_ne!(cache.path(&a, 4), cache.path(&b, 4));
        assert_ne!(cache.path(&a, 4), cache.path(&a, 5));
    }
}
