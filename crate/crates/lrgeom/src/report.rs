//! Deterministic verification reports.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::poly::MonomialOrder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
            Status::Info => "info",
        }
    }
}

/// A nonzero residue or other evidence attached to an index tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub index: Vec<usize>,
    pub label: String,
    pub value: String,
}

impl Witness {
    pub fn new(index: &[usize], label: impl Into<String>, value: impl Into<String>) -> Witness {
        Witness { index: index.to_vec(), label: label.into(), value: value.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub task: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Entry {
    /// Pass when there are no witnesses, fail otherwise.
    pub fn check(task: impl Into<String>, mut witnesses: Vec<Witness>) -> Entry {
        witnesses.sort();
        let status = if witnesses.is_empty() { Status::Pass } else { Status::Fail };
        Entry { task: task.into(), status, witnesses, note: None }
    }

    pub fn pass(task: impl Into<String>) -> Entry {
        Entry::check(task, Vec::new())
    }

    pub fn fail(task: impl Into<String>, note: impl Into<String>) -> Entry {
        Entry { task: task.into(), status: Status::Fail, witnesses: Vec::new(), note: Some(note.into()) }
    }

    pub fn info(task: impl Into<String>, note: impl Into<String>) -> Entry {
        Entry { task: task.into(), status: Status::Info, witnesses: Vec::new(), note: Some(note.into()) }
    }

    pub fn error(task: impl Into<String>, note: impl Into<String>) -> Entry {
        Entry { task: task.into(), status: Status::Error, witnesses: Vec::new(), note: Some(note.into()) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Entry {
        self.note = Some(note.into());
        self
    }

    pub fn with_info(mut self, index: &[usize], label: &str, value: String) -> Entry {
        self.witnesses.push(Witness::new(index, label, value));
        self.witnesses.sort();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Info)
    }
}

/// Collapses a list of entries into one, failing if any failed.
pub fn summarize(task: impl Into<String>, entries: &[Entry]) -> Entry {
    let mut witnesses = Vec::new();
    for e in entries {
        if !e.passed() {
            if e.witnesses.is_empty() {
                witnesses.push(Witness::new(&[], e.task.clone(), e.note.clone().unwrap_or_default()));
            }
            for w in e.witnesses.iter() {
                witnesses.push(Witness::new(&w.index, format!("{}: {}", e.task, w.label), w.value.clone()));
            }
        }
    }
    Entry::check(task, witnesses)
}

/// Matrix convention of Christoffel data: row = input generator.
pub const MATRIX_CONVENTION: &str = "row: [Gamma_i]_(mu,nu) = Gamma_(i mu)^nu; End: X(phi) + phi Gamma - Gamma phi";
/// Normalisation of the commutator term in `mc_defect`.
pub const MC_NORMALIZATION: &str = "[C,C](X_i,X_j) = 1*(C_i C_j - C_j C_i)";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub order: MonomialOrder,
    pub matrix_convention: String,
    pub mc_normalization: String,
    pub conventions_hash: String,
}

impl Header {
    pub fn new(order: MonomialOrder) -> Header {
        let mut h = Sha256::new();
        for part in [order.name(), MATRIX_CONVENTION, MC_NORMALIZATION] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        let digest = h.finalize();
        let hash: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Header {
            tool: "lrgeom".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            order,
            matrix_convention: MATRIX_CONVENTION.into(),
            mc_normalization: MC_NORMALIZATION.into(),
            conventions_hash: hash,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub header: Header,
    pub scenario: String,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(scenario: impl Into<String>, order: MonomialOrder) -> Report {
        Report { header: Header::new(order), scenario: scenario.into(), entries: Vec::new() }
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = Entry>) {
        self.entries.extend(entries);
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(Entry::passed)
    }

    pub fn any_error(&self) -> bool {
        self.entries.iter().any(|e| e.status == Status::Error)
    }

    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = format!(
            "# {} {} scenario={} order={} conventions={}\n",
            h.tool,
            h.version,
            self.scenario,
            h.order.name(),
            h.conventions_hash
        );
        for e in self.entries.iter() {
            out.push_str(&format!("{:<5} {}", e.status.as_str(), e.task));
            if let Some(n) = &e.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
            for w in e.witnesses.iter() {
                let idx: Vec<String> = w.index.iter().map(|i| (i + 1).to_string()).collect();
                out.push_str(&format!("      [{}] {} = {}\n", idx.join(","), w.label, w.value));
            }
        }
        out.push_str(&format!(
            "# summary: {} pass, {} fail, {} error, {} info\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error),
            self.count(Status::Info)
        ));
        out
    }
}
