//! Declarative job files: one file describes one command run.

use std::path::Path;

use serde::Deserialize;

use scaffold_forge::algebra::LaurentFrac;
use scaffold_forge::pgroup::{PFilteredGroup, PresetFamily};

/// A fatal input problem; the CLI maps these to exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error<E: std::fmt::Display>(e: E) -> InputError {
    InputError(e.to_string())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    pub field: FieldSpec,
    pub group: GroupSpec,
    /// Optional composition-series override (element index lists).
    #[serde(default)]
    pub series: Option<Vec<Vec<usize>>>,
    /// Upper ramification breaks (tower command).
    #[serde(default)]
    pub u: Option<Vec<i64>>,
    /// Per-level a_i values (tower command).
    #[serde(default)]
    pub a_list: Option<Vec<String>>,
    /// Base element a (tower and scaffold commands).
    #[serde(default)]
    pub a: Option<String>,
    /// Scale factors omega_1..omega_n (tower and scaffold commands).
    #[serde(default)]
    pub omegas: Option<Vec<String>>,
    /// Search parameters (search command).
    #[serde(default)]
    pub search: Option<SearchSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    /// Preset family name (cyclic, elem_abelian, dihedral2,
    /// quaternion, heisenberg).
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Inline Cayley data.
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub cayley: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub series: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub names: Option<Vec<String>>,
    /// Path to a group JSON file with fields p, n, cayley, series.
    #[serde(default)]
    pub file: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    /// "scaffold" or "hopf".
    pub mode: String,
    #[serde(default)]
    pub c_min: Option<i64>,
    #[serde(default)]
    pub u1: Option<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub series_precision: Option<i64>,
}

/// The group file format named in the interface contract.
#[derive(Clone, Debug, Deserialize)]
pub struct GroupFile {
    pub p: u64,
    pub n: usize,
    pub cayley: Vec<Vec<usize>>,
    pub series: Vec<Vec<usize>>,
    #[serde(default)]
    pub names: Option<Vec<String>>,
}

pub fn load_job(path: &Path) -> Result<JobSpec, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read job file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| InputError(format!("malformed job file {}: {e}", path.display())))
}

impl JobSpec {
    /// Builds and validates the group, enforcing p-consistency between
    /// the field and the group and applying any series override.
    pub fn build_group(&self, base_dir: &Path) -> Result<PFilteredGroup, InputError> {
        let p = self.field.p;
        let spec = &self.group;
        let mut group = if let Some(file) = &spec.file {
            let path = base_dir.join(file);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                InputError(format!("cannot read group file {}: {e}", path.display()))
            })?;
            let gf: GroupFile = serde_json::from_str(&text)
                .map_err(|e| InputError(format!("malformed group file: {e}")))?;
            if gf.p != p {
                return Err(InputError(format!(
                    "group file has p = {}, job field has p = {p}",
                    gf.p
                )));
            }
            PFilteredGroup::from_parts(gf.p, gf.n, gf.cayley, gf.series, gf.names)
                .map_err(input_error)?
        } else if let Some(cayley) = &spec.cayley {
            let gp = spec.p.unwrap_or(p);
            if gp != p {
                return Err(InputError(format!(
                    "inline group has p = {gp}, job field has p = {p}"
                )));
            }
            let n = spec
                .n
                .ok_or_else(|| InputError("inline group needs n".into()))?;
            let series = spec
                .series
                .clone()
                .ok_or_else(|| InputError("inline group needs a series".into()))?;
            PFilteredGroup::from_parts(gp, n, cayley.clone(), series, spec.names.clone())
                .map_err(input_error)?
        } else if let Some(name) = &spec.preset {
            let family = PresetFamily::parse(name)
                .ok_or_else(|| InputError(format!("unknown preset '{name}'")))?;
            let n = spec
                .n
                .ok_or_else(|| InputError("preset group needs n".into()))?;
            PFilteredGroup::preset(family, p, n).map_err(input_error)?
        } else {
            return Err(InputError(
                "group must specify a preset, inline Cayley data, or a file".into(),
            ));
        };
        if let Some(series) = &self.series {
            group = PFilteredGroup::from_parts(
                group.p(),
                group.n(),
                group.cayley().clone(),
                series.clone(),
                Some(group.names().to_vec()),
            )
            .map_err(input_error)?;
        }
        Ok(group)
    }

    pub fn parse_fracs(&self, values: &[String]) -> Result<Vec<LaurentFrac>, InputError> {
        values
            .iter()
            .map(|s| LaurentFrac::parse(self.field.p, s).map_err(input_error))
            .collect()
    }
}
