//! Dataset directories: `features.csv`, `costs.csv`, optional
//! `clean_costs.csv`, and `meta.json`.
//!
//! Floats are written in Rust's shortest round-trip form, so a save/load
//! cycle is bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{CostVector, Dataset, DatasetMeta, FeatureVector, Sample};

pub const FEATURES_FILE: &str = "features.csv";
pub const COSTS_FILE: &str = "costs.csv";
pub const CLEAN_COSTS_FILE: &str = "clean_costs.csv";
pub const META_FILE: &str = "meta.json";

fn write_matrix<'a>(
    path: &Path,
    prefix: &str,
    width: usize,
    rows: impl Iterator<Item = &'a [f64]>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..width).map(|i| format!("{prefix}_{i}")))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_matrix(path: &Path, prefix: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.len() != width {
        return Err(Error::DimensionMismatch {
            what: "csv header width",
            expected: width,
            got: headers.len(),
        });
    }
    for (i, h) in headers.iter().enumerate() {
        if h != format!("{prefix}_{i}") {
            return Err(Error::malformed(path, format!("unexpected header {h:?}")));
        }
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::malformed(path, format!("row {line}: cannot parse {s:?}: {e}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != width {
            return Err(Error::DimensionMismatch {
                what: "csv row width",
                expected: width,
                got: row.len(),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes `ds` into `dir`, creating the directory if needed.
pub fn save_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_matrix(
        &dir.join(FEATURES_FILE),
        "z",
        ds.meta.m,
        ds.samples.iter().map(|s| s.z.as_slice()),
    )?;
    write_matrix(
        &dir.join(COSTS_FILE),
        "c",
        ds.meta.n,
        ds.samples.iter().map(|s| s.c.as_slice()),
    )?;
    let clean = dir.join(CLEAN_COSTS_FILE);
    if ds.has_clean_costs() {
        write_matrix(
            &clean,
            "c",
            ds.meta.n,
            ds.samples
                .iter()
                .map(|s| s.c_clean.as_ref().expect("checked").as_slice()),
        )?;
    } else if clean.exists() {
        fs::remove_file(&clean).map_err(|e| Error::io(&clean, e))?;
    }
    let meta_path = dir.join(META_FILE);
    let json = serde_json::to_string_pretty(&ds.meta)?;
    fs::write(&meta_path, json + "\n").map_err(|e| Error::io(&meta_path, e))?;
    Ok(())
}

/// Reads a dataset directory and validates it against `meta.json`.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let meta_path = dir.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: DatasetMeta = serde_json::from_str(&text)?;
    let features = read_matrix(&dir.join(FEATURES_FILE), "z", meta.m)?;
    let costs = read_matrix(&dir.join(COSTS_FILE), "c", meta.n)?;
    let clean_path = dir.join(CLEAN_COSTS_FILE);
    let clean = if clean_path.exists() {
        Some(read_matrix(&clean_path, "c", meta.n)?)
    } else {
        None
    };
    if features.len() != costs.len() || features.len() != meta.samples {
        return Err(Error::malformed(
            dir,
            format!(
                "row counts disagree: features {}, costs {}, meta {}",
                features.len(),
                costs.len(),
                meta.samples
            ),
        ));
    }
    if let Some(cl) = &clean {
        if cl.len() != costs.len() {
            return Err(Error::malformed(
                &clean_path,
                "row count differs from costs.csv",
            ));
        }
    }
    let mut clean_rows = clean.map(|v| v.into_iter());
    let samples = features
        .into_iter()
        .zip(costs)
        .map(|(z, c)| Sample {
            z: FeatureVector(z),
            c: CostVector(c),
            c_clean: clean_rows.as_mut().and_then(|it| it.next()).map(CostVector),
        })
        .collect();
    Dataset::new(samples, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        let meta = DatasetMeta {
            problem: "select".into(),
            m: 2,
            n: 3,
            instance: "select:3".into(),
            seed: 1,
            stream: 1,
            noise_halfwidth: 0.5,
            degree: 1,
            noise_shared: false,
            samples: 0,
        };
        let samples = vec![
            Sample {
                z: vec![0.1, -1.0 / 3.0].into(),
                c: vec![1.0, 2.0, std::f64::consts::PI].into(),
                c_clean: Some(vec![1.0, 2.0, 3.0].into()),
            },
            Sample {
                z: vec![1e-300, 7.0].into(),
                c: vec![0.1 + 0.2, -0.0, 5e10].into(),
                c_clean: Some(vec![1.0, 1.0, 1.0].into()),
            },
        ];
        Dataset::new(samples, meta).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ds = tiny();
        save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.meta, ds.meta);
        for (a, b) in ds.samples.iter().zip(&back.samples) {
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a.z.as_slice()), bits(b.z.as_slice()));
            assert_eq!(bits(a.c.as_slice()), bits(b.c.as_slice()));
        }
        let costs = fs::read_to_string(dir.path().join(COSTS_FILE)).unwrap();
        assert_eq!(costs.lines().count(), 1 + ds.len());
    }

    #[test]
    fn tampered_meta_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&tiny(), dir.path()).unwrap();
        let path = dir.path().join(META_FILE);
        let text = fs::read_to_string(&path)
            .unwrap()
            .replace("\"n\": 3", "\"n\": 4");
        fs::write(&path, text).unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }

    #[test]
    fn missing_files_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(Error::Io { .. })));
    }
}
