//! On-disk trace format.
//!
//! A trace file is JSON Lines: a header object followed by one object per
//! step, in ascending `k`. Every integer, including `k`, is a decimal string.
//!
//! ```text
//! {"format":"urbasis-trace","version":"1","mode":"greedy","steps":"2"}
//! {"k":"1","elements":["0","1"],"d":"1","b":"1","branch":"negative","c":"1"}
//! {"k":"2","elements":["-4","0","1","3"],"d":"4","b":"2","branch":"negative","c":null}
//! ```

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::{BasisTrace, ConstructionStep};
use crate::growth::GrowthSpec;
use crate::intset::IntSet;

pub const FORMAT_NAME: &str = "urbasis-trace";
pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum TraceFileError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("file is empty")]
    Empty,
    #[error("header announces {expected} steps but the file has {found}")]
    StepCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub version: String,
    pub mode: GrowthSpec,
    pub trace: BasisTrace,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: String,
    mode: String,
    steps: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRecord {
    k: String,
    elements: Vec<String>,
    d: String,
    b: String,
    branch: String,
    c: Option<String>,
}

impl TraceFile {
    pub fn new(mode: GrowthSpec, trace: BasisTrace) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            mode,
            trace,
        }
    }

    pub fn to_text(&self) -> String {
        let header = Header {
            format: FORMAT_NAME.to_string(),
            version: self.version.clone(),
            mode: self.mode.to_string(),
            steps: self.trace.len().to_string(),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for s in &self.trace.steps {
            let rec = StepRecord {
                k: s.k.to_string(),
                elements: s.set.iter().map(|a| a.to_string()).collect(),
                d: s.d.to_string(),
                b: s.b.to_string(),
                branch: if s.positive_branch { "positive" } else { "negative" }.to_string(),
                c: s.c.as_ref().map(|c| c.to_string()),
            };
            out.push_str(&serde_json::to_string(&rec).expect("step serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TraceFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, htext) = lines.next().ok_or(TraceFileError::Empty)?;
        let header: Header = serde_json::from_str(htext)
            .map_err(|source| TraceFileError::Json { line: hline, source })?;
        let invalid = |line: usize, reason: String| TraceFileError::Invalid { line, reason };
        if header.format != FORMAT_NAME {
            return Err(invalid(hline, format!("unknown format {:?}", header.format)));
        }
        if header.version != FORMAT_VERSION {
            return Err(invalid(hline, format!("unsupported version {:?}", header.version)));
        }
        let mode: GrowthSpec = header
            .mode
            .parse()
            .map_err(|e: crate::growth::GrowthError| invalid(hline, e.to_string()))?;
        let expected: usize = header
            .steps
            .parse()
            .map_err(|_| invalid(hline, format!("bad step count {:?}", header.steps)))?;

        let mut steps = Vec::new();
        for (line, ltext) in lines {
            let rec: StepRecord = serde_json::from_str(ltext)
                .map_err(|source| TraceFileError::Json { line, source })?;
            let int = |field: &str, v: &str| {
                v.parse::<BigInt>()
                    .map_err(|_| invalid(line, format!("{field}: not a decimal integer: {v:?}")))
            };
            let k: u64 = rec
                .k
                .parse()
                .map_err(|_| invalid(line, format!("k: not a step index: {:?}", rec.k)))?;
            if k != steps.len() as u64 + 1 {
                return Err(invalid(line, format!("expected k = {}, found {k}", steps.len() + 1)));
            }
            let elems = rec
                .elements
                .iter()
                .map(|e| int("elements", e))
                .collect::<Result<Vec<_>, _>>()?;
            let set = IntSet::from_ascending(elems).map_err(|e| invalid(line, e.to_string()))?;
            let positive_branch = match rec.branch.as_str() {
                "positive" => true,
                "negative" => false,
                other => return Err(invalid(line, format!("unknown branch {other:?}"))),
            };
            let c = rec.c.as_deref().map(|c| int("c", c)).transpose()?;
            steps.push(ConstructionStep {
                k,
                set,
                d: int("d", &rec.d)?,
                b: int("b", &rec.b)?,
                positive_branch,
                c,
            });
        }
        if steps.len() != expected {
            return Err(TraceFileError::StepCount {
                expected,
                found: steps.len(),
            });
        }
        Ok(Self {
            version: header.version,
            mode,
            trace: BasisTrace { steps },
        })
    }
}
