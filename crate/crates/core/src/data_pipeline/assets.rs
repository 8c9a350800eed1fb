use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim_kernel::ObjectClass;

/// Simulation asset sizes: class → asset name → (length, width, height).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AssetCatalog {
    pub entries: BTreeMap<ObjectClass, BTreeMap<String, [f64; 3]>>,
}

impl AssetCatalog {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut names = BTreeSet::new();
        for (class, bucket) in &self.entries {
            for (name, dims) in bucket {
                if !names.insert(name) {
                    errs.push(format!("asset name `{name}` is not unique"));
                }
                if dims.iter().any(|d| !(*d > 0.0)) {
                    errs.push(format!("{class}/{name}: dimensions must be > 0"));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cat: AssetCatalog = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn insert(&mut self, class: ObjectClass, name: impl Into<String>, dims: [f64; 3]) {
        self.entries.entry(class).or_default().insert(name.into(), dims);
    }
}

/// Closest asset of `class` to a detected size, by Euclidean distance in
/// (l, w, h). Equal distances resolve to the lexicographically first name.
pub fn match_asset(size: [f64; 3], catalog: &AssetCatalog, class: ObjectClass) -> Result<&str> {
    let bucket = catalog
        .entries
        .get(&class)
        .filter(|b| !b.is_empty())
        .ok_or_else(|| Error::NoAssetForClass(class.to_string()))?;
    let dist = |d: &[f64; 3]| {
        ((size[0] - d[0]).powi(2) + (size[1] - d[1]).powi(2) + (size[2] - d[2]).powi(2)).sqrt()
    };
    let mut best: Option<(&str, f64)> = None;
    for (name, dims) in bucket {
        let d = dist(dims);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((name, d));
        }
    }
    Ok(best.unwrap().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> AssetCatalog {
        let mut c = AssetCatalog::default();
        c.insert(ObjectClass::Car, "sedan", [4.5, 1.8, 1.5]);
        c.insert(ObjectClass::Car, "truck", [8.0, 2.5, 3.0]);
        c
    }

    #[test]
    fn closest_size_wins() {
        assert_eq!(match_asset([4.4, 1.7, 1.5], &catalog(), ObjectClass::Car).unwrap(), "sedan");
        assert_eq!(match_asset([8.0, 2.5, 3.0], &catalog(), ObjectClass::Car).unwrap(), "truck");
    }

    #[test]
    fn ties_go_to_first_name() {
        let mut c = AssetCatalog::default();
        c.insert(ObjectClass::Car, "beta", [5.0, 2.0, 1.5]);
        c.insert(ObjectClass::Car, "alpha", [3.0, 2.0, 1.5]);
        assert_eq!(match_asset([4.0, 2.0, 1.5], &c, ObjectClass::Car).unwrap(), "alpha");
    }

    #[test]
    fn empty_bucket_errors() {
        assert!(matches!(
            match_asset([1.0, 1.0, 1.0], &catalog(), ObjectClass::Bus),
            Err(Error::NoAssetForClass(_))
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut c = catalog();
        c.insert(ObjectClass::Bus, "sedan", [12.0, 2.5, 3.2]);
        assert!(c.validate().is_err());
    }
}
