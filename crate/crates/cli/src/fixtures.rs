//! Fixture corpora. The shipped copies are compiled in; a directory given
//! on the command line overrides them file by file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use naqkit_core::descsel::{Enumeration, FeatureSystem};
use naqkit_core::validity::{Instance, Predicate};
use naqkit_core::BitString;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::io::DataError;

const IDENTITY: &str = include_str!("../fixtures/identity_corpus.json");
const LEVIN: &str = include_str!("../fixtures/levin.json");
const DESCSEL: &str = include_str!("../fixtures/descsel.json");

#[derive(Clone, Debug, Deserialize)]
pub struct LabeledInstance {
    pub id: String,
    pub x: BitString,
    pub predicate: Predicate,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TwoPartCase {
    pub id: String,
    pub x: BitString,
    pub system: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct AmbiguityCase {
    pub id: String,
    pub system: String,
    pub xs: Vec<BitString>,
    pub max_response_len: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ConditionalCase {
    pub id: String,
    pub x: BitString,
    pub y: BitString,
    pub system: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DistortionCase {
    pub id: String,
    pub system: String,
    pub xs: Vec<BitString>,
    pub alt: Enumeration,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PlantedCase {
    pub x: BitString,
    pub y: BitString,
    pub planted: BitString,
    pub base: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DescselFixtures {
    pub systems: BTreeMap<String, FeatureSystem>,
    pub two_part: Vec<TwoPartCase>,
    pub finite_ambiguity: Vec<AmbiguityCase>,
    pub conditional: Vec<ConditionalCase>,
    pub distortion: Vec<DistortionCase>,
    pub planted: PlantedCase,
}

impl DescselFixtures {
    pub fn system(&self, name: &str) -> Result<&FeatureSystem, DataError> {
        self.systems.get(name).ok_or_else(|| DataError(format!("descsel fixture: unknown system `{name}`")))
    }

    fn validate(&self) -> Result<(), DataError> {
        for (name, fs) in &self.systems {
            FeatureSystem::new(fs.feature.clone(), fs.circuit.clone())
                .map_err(|e| DataError(format!("descsel fixture: system `{name}`: {e}")))?;
        }
        let names = self
            .two_part
            .iter()
            .map(|c| &c.system)
            .chain(self.finite_ambiguity.iter().map(|c| &c.system))
            .chain(self.conditional.iter().map(|c| &c.system))
            .chain(self.distortion.iter().map(|c| &c.system))
            .chain([&self.planted.base]);
        for n in names {
            self.system(n)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Fixtures {
    pub dir: Option<PathBuf>,
}

impl Fixtures {
    pub fn shipped() -> Self {
        Self { dir: None }
    }

    pub fn from_dir(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    fn load<T: DeserializeOwned>(&self, file: &str, shipped: &str) -> Result<T, DataError> {
        let text = match &self.dir {
            None => shipped.to_string(),
            Some(d) => read(&d.join(file))?,
        };
        serde_json::from_str(&text).map_err(|e| DataError(format!("fixture {file}: {e}")))
    }

    pub fn identity_corpus(&self) -> Result<Vec<LabeledInstance>, DataError> {
        self.load("identity_corpus.json", IDENTITY)
    }

    pub fn levin(&self) -> Result<Vec<LabeledInstance>, DataError> {
        self.load("levin.json", LEVIN)
    }

    pub fn descsel(&self) -> Result<DescselFixtures, DataError> {
        let f: DescselFixtures = self.load("descsel.json", DESCSEL)?;
        f.validate()?;
        Ok(f)
    }
}

fn read(p: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(p).map_err(|e| DataError(format!("missing fixture file {}: {e}", p.display())))
}

pub fn labeled(items: &[LabeledInstance]) -> Vec<(String, Instance, Predicate)> {
    items.iter().map(|l| (l.id.clone(), Instance::binary(l.x.clone()), l.predicate.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_fixtures_parse() {
        let f = Fixtures::shipped();
        assert_eq!(f.identity_corpus().unwrap().len(), 20);
        assert!(!f.levin().unwrap().is_empty());
        let d = f.descsel().unwrap();
        assert_eq!(d.conditional.len(), 20);
    }

    #[test]
    fn missing_directory_is_a_data_error() {
        let f = Fixtures::from_dir("/nonexistent/fixtures");
        assert!(f.identity_corpus().unwrap_err().0.contains("missing fixture file"));
    }
}
