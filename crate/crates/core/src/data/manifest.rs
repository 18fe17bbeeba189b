//! Dataset manifest loading and saving.
//!
//! A dataset on disk is a UTF-8 JSON manifest plus one CSV grid file per
//! foot (and optionally per angiosome). Grid files hold one row per grid
//! row of dot-decimal °C values with `0.0` marking background. Paths in
//! the manifest are resolved relative to the manifest's directory.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    split_angiosomes, AngiosomeLayout, AngiosomeSet, FootRecord, FootSide, Gender, GroupLabel,
    SubjectRecord, ThermalMap,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngiosomePaths {
    pub mpa: String,
    pub lpa: String,
    pub mca: String,
    pub lca: String,
}

/// One subject's demographics and grid file paths.
///
/// `height_cm` and `weight_kg` are accepted but play no further role.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub age: u32,
    pub gender: Gender,
    pub group: GroupLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_foot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_foot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_angiosomes: Option<AngiosomePaths>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_angiosomes: Option<AngiosomePaths>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub subjects: Vec<ManifestEntry>,
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn read(path: &Path) -> Result<DatasetManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::MissingFile {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| Error::ManifestParse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        manifest.root = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        let mut seen = BTreeSet::new();
        for entry in &manifest.subjects {
            if !seen.insert(entry.subject_id.clone()) {
                return Err(Error::Validation(format!(
                    "duplicate subject_id {:?} in manifest",
                    entry.subject_id
                )));
            }
            if entry.left_foot.is_none() && entry.right_foot.is_none() {
                return Err(Error::Validation(format!(
                    "subject {}: no foot grid referenced",
                    entry.subject_id
                )));
            }
        }
        Ok(manifest)
    }

    fn resolve(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }
}

/// Reads one grid CSV into a thermal map.
pub fn read_grid(path: &Path, side: FootSide) -> Result<ThermalMap> {
    let text = fs::read_to_string(path).map_err(|e| Error::MissingFile {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut cells = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::GridParse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("invalid temperature value {:?}", field.trim()),
            })?;
            cells.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(Error::GridParse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    message: format!("row has {count} values, expected {c}"),
                })
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::GridParse {
        path: path.to_path_buf(),
        line: 1,
        message: "empty grid file".into(),
    })?;
    ThermalMap::new(rows, cols, cells, side)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

/// Writes a grid CSV; values round-trip exactly.
pub fn write_grid(map: &ThermalMap, path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in 0..map.rows() {
        for c in 0..map.cols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", map.get(r, c)));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn load_foot(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    side: FootSide,
    layout: AngiosomeLayout,
) -> Result<Option<FootRecord>> {
    let (grid, angio) = match side {
        FootSide::Left => (&entry.left_foot, &entry.left_angiosomes),
        FootSide::Right => (&entry.right_foot, &entry.right_angiosomes),
    };
    let Some(rel) = grid else {
        return Ok(None);
    };
    let foot_map = read_grid(&manifest.resolve(rel), side)?;
    let angiosomes = match angio {
        Some(paths) => {
            let set = AngiosomeSet {
                mpa: read_grid(&manifest.resolve(&paths.mpa), side)?,
                lpa: read_grid(&manifest.resolve(&paths.lpa), side)?,
                mca: read_grid(&manifest.resolve(&paths.mca), side)?,
                lca: read_grid(&manifest.resolve(&paths.lca), side)?,
            };
            set.validate_against(&foot_map)
                .map_err(|e| Error::Validation(format!("subject {}: {e}", entry.subject_id)))?;
            set
        }
        None => split_angiosomes(&foot_map, layout)?,
    };
    Ok(Some(FootRecord::new(
        entry.subject_id.clone(),
        foot_map,
        angiosomes,
    )?))
}

/// Loads and validates every subject referenced by a manifest.
///
/// Subjects with a single referenced foot are admitted; the missing foot
/// is visible through [`SubjectRecord::single_foot`]. When per-angiosome
/// grids are absent the geometric fallback split is applied.
pub fn load_dataset(manifest_path: &Path) -> Result<Vec<SubjectRecord>> {
    load_dataset_with(manifest_path, AngiosomeLayout::default())
}

pub fn load_dataset_with(
    manifest_path: &Path,
    layout: AngiosomeLayout,
) -> Result<Vec<SubjectRecord>> {
    let manifest = DatasetManifest::read(manifest_path)?;
    let mut subjects = Vec::with_capacity(manifest.subjects.len());
    for entry in &manifest.subjects {
        let mut feet = Vec::new();
        if let Some(foot) = load_foot(&manifest, entry, FootSide::Left, layout)? {
            feet.push(foot);
        }
        if let Some(foot) = load_foot(&manifest, entry, FootSide::Right, layout)? {
            feet.push(foot);
        }
        subjects.push(SubjectRecord::new(
            entry.subject_id.clone(),
            entry.age,
            entry.gender,
            entry.group,
            feet,
        )?);
    }
    Ok(subjects)
}

/// Serializes records to `dir` as a manifest plus grid files.
///
/// Angiosome grids are always written so a reload reproduces the records
/// field for field regardless of how the regions were derived.
pub fn save_dataset(subjects: &[SubjectRecord], dir: &Path) -> Result<PathBuf> {
    let grid_dir = dir.join("grids");
    fs::create_dir_all(&grid_dir).map_err(|e| Error::io(&grid_dir, e))?;
    let mut entries = Vec::with_capacity(subjects.len());
    for subject in subjects {
        let mut entry = ManifestEntry {
            subject_id: subject.subject_id.clone(),
            age: subject.age,
            gender: subject.gender,
            group: subject.group_label,
            height_cm: None,
            weight_kg: None,
            left_foot: None,
            right_foot: None,
            left_angiosomes: None,
            right_angiosomes: None,
        };
        for foot in &subject.feet {
            let tag = match foot.side() {
                FootSide::Left => "L",
                FootSide::Right => "R",
            };
            let base = format!("grids/{}_{tag}", subject.subject_id);
            write_grid(&foot.foot_map, &dir.join(format!("{base}.csv")))?;
            let paths = AngiosomePaths {
                mpa: format!("{base}_mpa.csv"),
                lpa: format!("{base}_lpa.csv"),
                mca: format!("{base}_mca.csv"),
                lca: format!("{base}_lca.csv"),
            };
            write_grid(&foot.angiosomes.mpa, &dir.join(&paths.mpa))?;
            write_grid(&foot.angiosomes.lpa, &dir.join(&paths.lpa))?;
            write_grid(&foot.angiosomes.mca, &dir.join(&paths.mca))?;
            write_grid(&foot.angiosomes.lca, &dir.join(&paths.lca))?;
            match foot.side() {
                FootSide::Left => {
                    entry.left_foot = Some(format!("{base}.csv"));
                    entry.left_angiosomes = Some(paths);
                }
                FootSide::Right => {
                    entry.right_foot = Some(format!("{base}.csv"));
                    entry.right_angiosomes = Some(paths);
                }
            }
        }
        entries.push(entry);
    }
    let manifest = DatasetManifest {
        subjects: entries,
        root: dir.to_path_buf(),
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Runtime(format!("manifest serialization failed: {e}")))?;
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::BACKGROUND;

    fn write(path: &Path, text: &str) {
        fs::write(path, text).unwrap();
    }

    #[test]
    fn well_formed_manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        write(
            &dir.path().join("a.csv"),
            "30.0,30.5\n29.5,31.0\n30.0,30.0\n",
        );
        write(
            &dir.path().join("b.csv"),
            "28.0,28.5\n28.0,29.0\n28.5,28.0\n",
        );
        let manifest = r#"{"subjects": [
            {"subject_id": "s1", "age": 40, "gender": "male", "group": "DM",
             "left_foot": "a.csv", "right_foot": "b.csv"},
            {"subject_id": "s2", "age": 33, "gender": "female", "group": "CG",
             "left_foot": "a.csv", "right_foot": "b.csv", "height_cm": 170.0}
        ]}"#;
        let mpath = dir.path().join("manifest.json");
        write(&mpath, manifest);
        let subjects = load_dataset(&mpath).unwrap();
        assert_eq!(subjects.len(), 2);
        assert_eq!(subjects[0].feet.len(), 2);
        assert!(!subjects[0].single_foot());

        let out = tempfile::tempdir().unwrap();
        let saved = save_dataset(&subjects, out.path()).unwrap();
        let reloaded = load_dataset(&saved).unwrap();
        assert_eq!(subjects, reloaded);
    }

    #[test]
    fn missing_file_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let mpath = dir.path().join("manifest.json");
        write(
            &mpath,
            r#"{"subjects": [{"subject_id": "s1", "age": 40, "gender": "male",
                "group": "DM", "left_foot": "nowhere.csv"}]}"#,
        );
        let err = load_dataset(&mpath).unwrap_err();
        assert!(err.to_string().contains("nowhere.csv"));
    }

    #[test]
    fn ragged_grid_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("g.csv"), "30.0,30.0\n30.0\n");
        let err = read_grid(&dir.path().join("g.csv"), FootSide::Left).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "message was {msg}");
    }

    #[test]
    fn out_of_range_value_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("g.csv"), "30.0,99.0\n30.0,30.0\n");
        let err = read_grid(&dir.path().join("g.csv"), FootSide::Left).unwrap_err();
        assert!(err.to_string().contains("99"));
    }

    #[test]
    fn single_foot_subject_is_flagged() {
        let dir = tempfile::tempdir().unwrap();
        write(&dir.path().join("a.csv"), "30.0,30.0\n30.0,30.0\n30.0,30.0\n");
        let mpath = dir.path().join("manifest.json");
        write(
            &mpath,
            r#"{"subjects": [{"subject_id": "s1", "age": 40, "gender": "male",
                "group": "DM", "left_foot": "a.csv"}]}"#,
        );
        let subjects = load_dataset(&mpath).unwrap();
        assert!(subjects[0].single_foot());
    }

    #[test]
    fn background_cells_survive_round_trip() {
        let map = ThermalMap::new(
            2,
            2,
            vec![BACKGROUND, 30.25, 29.75, BACKGROUND],
            FootSide::Right,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        write_grid(&map, &path).unwrap();
        let back = read_grid(&path, FootSide::Right).unwrap();
        assert_eq!(map, back);
    }
}
