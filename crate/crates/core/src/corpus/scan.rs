use std::fs;
use std::path::{Path, PathBuf};

use crate::cst::{self, SourceUnit};

use super::CorpusError;

/// Lists every `.c` file (extension matched case-insensitively) under
/// `root`, sorted by relative path. Directory symlinks are not followed.
/// Unreadable directories are logged and skipped.
pub fn c_files(root: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let meta = fs::metadata(root).map_err(|e| CorpusError::io(root, e))?;
    if meta.is_file() {
        return Ok(if is_c_file(root) { vec![root.to_path_buf()] } else { vec![] });
    }
    let mut out = Vec::new();
    let mut pending = vec![root.to_path_buf()];
    while let Some(dir) = pending.pop() {
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping unreadable directory {}: {e}", dir.display());
                continue;
            }
        };
        for entry in entries.flatten() {
            let Ok(ft) = entry.file_type() else { continue };
            let path = entry.path();
            if ft.is_dir() {
                pending.push(path);
            } else if (ft.is_file() || ft.is_symlink()) && is_c_file(&path) {
                out.push(path);
            }
        }
    }
    out.sort_by_key(|p| relative_name(root, p));
    Ok(out)
}

fn is_c_file(p: &Path) -> bool {
    p.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("c"))
}

/// Path relative to `root` with `/` separators; the identifier units carry.
pub fn relative_name(root: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(root).unwrap_or(p);
    let rel = if rel.as_os_str().is_empty() { p.file_name().map(Path::new).unwrap_or(p) } else { rel };
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Streams source units under `root` in lexicographic path order. Each item
/// is read and parsed only when the iterator reaches it.
pub fn scan(root: &Path) -> Result<Scan, CorpusError> {
    let files = c_files(root)?;
    Ok(Scan { root: root.to_path_buf(), files: files.into_iter() })
}

pub struct Scan {
    root: PathBuf,
    files: std::vec::IntoIter<PathBuf>,
}

impl Iterator for Scan {
    type Item = Result<SourceUnit, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.files.next()?;
        let name = relative_name(&self.root, &path);
        Some(load(&path, name))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.files.size_hint()
    }
}

fn load(path: &Path, name: String) -> Result<SourceUnit, CorpusError> {
    let bytes = fs::read(path).map_err(|e| CorpusError::io(path, e))?;
    let text = cst::decode(&bytes).map_err(|_| CorpusError::Encoding { path: name.clone() })?;
    Ok(SourceUnit::new(name, text))
}
