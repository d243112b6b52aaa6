use std::collections::BTreeMap;

use naqkit_core::complexity::Caps;
use naqkit_core::constants::{registry, Registry};
use naqkit_core::executor::REGISTRY_VERSION;
use naqkit_core::machine::MACHINE_VERSION;
use serde::Serialize;

/// Everything needed to reproduce a report. No clocks, no hostnames.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub caps: Option<Caps>,
    pub seeds: Vec<u64>,
    pub artifact_version: String,
    pub machine_version: String,
    pub header_registry_version: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            machine_version: MACHINE_VERSION.into(),
            header_registry_version: REGISTRY_VERSION.into(),
            ..Default::default()
        }
    }

    pub fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.parameters.insert(k.into(), v.to_string());
        self
    }

    pub fn caps(mut self, caps: Caps) -> Self {
        self.caps = Some(caps);
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seeds.push(s);
        self
    }
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub constants: Registry,
    pub report: &'a T,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(manifest: &RunManifest, body: &T) -> String {
    let r = Report { manifest, constants: registry(), report: body };
    let mut s = serde_json::to_string_pretty(&r).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV from rows of string cells; the first row is the header.
pub fn to_csv(rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn ratio(r: &num_rational::Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
