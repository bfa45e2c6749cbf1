//! Locating scenario documents: explicit paths, a scenario directory, and the bundled fixtures.

use std::fs;
use std::path::{Path, PathBuf};

use dc_tco_core::scenario::bundled_scenarios;
use dc_tco_core::{bundled_scenario, load_scenario, Error, Result, Scenario};
use serde::Serialize;

pub const SCENARIO_DIR_ENV: &str = "DC_TCO_SCENARIO_DIR";

/// Short description of a loadable scenario, as listed by the service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub servers_total: u64,
    pub roles: Vec<String>,
}

impl ScenarioSummary {
    fn of(name: String, scenario: &Scenario) -> Self {
        ScenarioSummary {
            name,
            servers_total: scenario.facility.servers_total,
            roles: scenario.roles.iter().map(|r| r.name.clone()).collect(),
        }
    }
}

pub fn read_scenario_file(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    load_scenario(&text)
}

/// Resolves a `--scenario` argument.
///
/// An existing file wins; otherwise `name` and `name.json` are tried in the
/// scenario directory, then the bundled fixtures.
pub fn resolve(arg: &str, dir: Option<&Path>) -> std::result::Result<Scenario, ResolveError> {
    let direct = Path::new(arg);
    if direct.is_file() {
        return read_scenario_file(direct).map_err(ResolveError::Scenario);
    }
    if let Some(dir) = dir {
        for candidate in [dir.join(arg), dir.join(format!("{arg}.json"))] {
            if candidate.is_file() {
                return read_scenario_file(&candidate).map_err(ResolveError::Scenario);
            }
        }
    }
    if bundled_scenarios().iter().any(|(name, _)| *name == arg) {
        return bundled_scenario(arg).map_err(ResolveError::Scenario);
    }
    Err(ResolveError::NotFound(direct.to_path_buf()))
}

#[derive(Debug, thiserror::Error)]
pub enum ResolveError {
    #[error("scenario file `{}` not found", .0.display())]
    NotFound(PathBuf),
    #[error(transparent)]
    Scenario(Error),
}

/// Loads a scenario by name from `dir`, falling back to the bundled fixtures.
pub fn load_named(name: &str, dir: Option<&Path>) -> Result<Scenario> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(Error::UnknownScenario(name.to_string()));
    }
    if let Some(dir) = dir {
        let path = dir.join(format!("{name}.json"));
        if path.is_file() {
            return read_scenario_file(&path);
        }
    }
    bundled_scenario(name)
}

/// Lists the scenarios in `dir` sorted by name, or the bundled ones without a directory.
///
/// Files that fail to parse are left out; an unreadable directory is an error.
pub fn list(dir: Option<&Path>) -> Result<Vec<ScenarioSummary>> {
    let Some(dir) = dir else {
        return bundled_scenarios()
            .iter()
            .map(|(name, _)| bundled_scenario(name).map(|s| ScenarioSummary::of(name.to_string(), &s)))
            .collect();
    };
    let io_err = |source| Error::Io { path: dir.to_path_buf(), source };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let Some(name) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        if let Ok(scenario) = read_scenario_file(&path) {
            out.push(ScenarioSummary::of(name.to_string(), &scenario));
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dc_tco_core::scenario::CALLCENTER_NEVADA;

    #[test]
    fn resolves_bundled_by_name() {
        let s = resolve(CALLCENTER_NEVADA, None).unwrap();
        assert_eq!(s.facility.servers_total, 520);
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = resolve("/no/such/file.json", None).unwrap_err();
        assert!(err.to_string().contains("/no/such/file.json"));
    }

    #[test]
    fn names_cannot_escape_the_directory() {
        assert!(matches!(load_named("../etc/passwd", None), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn lists_bundled_without_dir() {
        let all = list(None).unwrap();
        assert_eq!(all[0].name, CALLCENTER_NEVADA);
        assert_eq!(all[0].roles, ["role1", "role2", "role3"]);
    }
}
