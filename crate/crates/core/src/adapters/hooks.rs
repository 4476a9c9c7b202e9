use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use super::{render_path, AdapterError, AdapterSpec, Result, STDERR_FILE, STDOUT_FILE};
use crate::dataset::{parse_landmark_file, LandmarkSet, RegistrationCase};

/// Files a cleanup pass never touches, relative to the case workspace.
const RETAINED: [&str; 4] = [STDOUT_FILE, STDERR_FILE, "overlay.svg", "results.csv"];

pub fn warped_landmarks_path(
    spec: &AdapterSpec,
    case: &RegistrationCase,
    workspace: &Path,
) -> Result<PathBuf> {
    render_path(
        &spec.warped_landmarks_path_template,
        case,
        workspace,
        spec.method_config.as_deref(),
    )
    .map(PathBuf::from)
}

/// Reads the warped landmarks the method wrote for `case`.
pub fn extract_warped_landmarks(
    spec: &AdapterSpec,
    case: &RegistrationCase,
    workspace: &Path,
) -> Result<LandmarkSet> {
    let path = warped_landmarks_path(spec, case, workspace)?;
    if !path.is_file() {
        return Err(AdapterError::MissingOutput(path));
    }
    parse_landmark_file(&path).map_err(|source| AdapterError::MalformedOutput { path, source })
}

/// Removes files matching the spec's cleanup globs (relative to the
/// workspace). Captured output and warped landmarks are always kept.
/// Returns how many files were removed; removal errors are logged only.
pub fn cleanup_workspace(
    spec: &AdapterSpec,
    case: &RegistrationCase,
    workspace: &Path,
    keep_debug: bool,
) -> Result<usize> {
    if keep_debug || spec.cleanup_globs.is_empty() {
        return Ok(0);
    }
    let mut retained: HashSet<PathBuf> = RETAINED.iter().map(|f| workspace.join(f)).collect();
    if let Ok(warped) = warped_landmarks_path(spec, case, workspace) {
        retained.insert(std::path::absolute(&warped).unwrap_or(warped));
    }
    let root = std::path::absolute(workspace).map_err(|e| AdapterError::io(workspace, e))?;
    let retained: HashSet<PathBuf> = retained
        .into_iter()
        .map(|p| std::path::absolute(&p).unwrap_or(p))
        .collect();

    let mut removed = 0;
    for pattern in &spec.cleanup_globs {
        let full = format!(
            "{}/{}",
            glob::Pattern::escape(&root.to_string_lossy()),
            pattern.trim_start_matches('/')
        );
        let entries = match glob::glob(&full) {
            Ok(entries) => entries,
            Err(e) => {
                log::warn!("invalid cleanup glob {pattern:?}: {e}");
                continue;
            }
        };
        for entry in entries.flatten() {
            if retained.contains(&entry) || !entry.starts_with(&root) {
                continue;
            }
            let res = if entry.is_dir() {
                fs::remove_dir_all(&entry)
            } else {
                fs::remove_file(&entry)
            };
            match res {
                Ok(()) => removed += 1,
                Err(e) => log::warn!("could not remove {}: {e}", entry.display()),
            }
        }
    }
    Ok(removed)
}
