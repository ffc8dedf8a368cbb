//! The shipped scenario suite, embedded at compile time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioFile;

macro_rules! embed {
    ($($file:literal),* $(,)?) => {
        &[$(($file, include_str!(concat!("../scenarios/paper/", $file)))),*]
    };
}

/// `(file name, contents)` for every file in the paper suite.
pub const PAPER_FILES: &[(&str, &str)] = embed!(
    "suite.json",
    "a1_pid.json",
    "a1_ipi.json",
    "a2_pid.json",
    "a2_ipi.json",
    "fig3.json",
    "fig4.json",
    "fig5.json",
    "fig6.json",
    "fig7.json",
    "fig8.json",
    "fig9.json",
);

pub const SUITE_NAMES: &[&str] = &["paper"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteManifest {
    pub name: String,
    pub entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub id: String,
    /// Figure the entry reproduces.
    pub figure: String,
    pub description: String,
    pub scenarios: Vec<String>,
}

/// A scenario file together with the entry it belongs to.
#[derive(Clone, Debug)]
pub struct SuiteScenario {
    pub entry: String,
    /// File name without `.json`; names the output files.
    pub stem: String,
    pub file: ScenarioFile,
}

pub fn paper_file(name: &str) -> Option<&'static str> {
    PAPER_FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn manifest(suite: &str) -> Result<SuiteManifest> {
    if suite != "paper" {
        return Err(Error::Scenario(format!(
            "unknown suite {suite:?}; available: {}",
            SUITE_NAMES.join(", ")
        )));
    }
    let text = paper_file("suite.json").expect("manifest is embedded");
    Ok(serde_json::from_str(text)?)
}

/// Every scenario of the suite, in manifest order.
pub fn scenarios(suite: &str) -> Result<Vec<SuiteScenario>> {
    let m = manifest(suite)?;
    let mut out = Vec::new();
    for entry in &m.entries {
        for name in &entry.scenarios {
            let text = paper_file(name)
                .ok_or_else(|| Error::Scenario(format!("suite references missing file {name}")))?;
            let file = ScenarioFile::from_json(text).map_err(|e| Error::Scenario(format!("{name}: {e}")))?;
            out.push(SuiteScenario {
                entry: entry.id.clone(),
                stem: name.trim_end_matches(".json").to_string(),
                file,
            });
        }
    }
    Ok(out)
}
