//! Matrix file I/O: a JSON format with complex entries encoded as
//! `[re, im]` pairs, plus a plain CSV import for real matrices.

use hypoindex_core::{C64, ComplexMatrix};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindHint {
    Continuous,
    Discrete,
}

/// Expected value of an index: a finite integer or the string "none".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexExpect {
    Finite(usize),
    Absent(String),
}

impl IndexExpect {
    pub fn matches(&self, actual: Option<usize>) -> bool {
        match self {
            IndexExpect::Finite(m) => actual == Some(*m),
            IndexExpect::Absent(tag) => tag == "none" && actual.is_none(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExpectFlags {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotically_stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semi_dissipative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dissipative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semi_contractive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contractive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypocontractive: Option<bool>,
}

/// Regression expectations carried by corpus files; every present field is
/// checked by the suite command.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Expect {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_hc: Option<IndexExpect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_shc: Option<IndexExpect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_dhc: Option<IndexExpect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_dshc: Option<IndexExpect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min_bh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuous: Option<ExpectFlags>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrete: Option<ExpectFlags>,
}

impl Expect {
    pub fn is_empty(&self) -> bool {
        serde_json::to_value(self)
            .map(|v| v.as_object().is_none_or(|o| o.is_empty()))
            .unwrap_or(true)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub name: String,
    pub n: usize,
    /// Rows of [re, im] pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind_hint: Option<KindHint>,
    #[serde(default, skip_serializing_if = "Expect::is_empty")]
    pub expect: Expect,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.n == 0 {
            return Err(format!("{}: dimension must be positive", self.name));
        }
        if self.entries.len() != self.n {
            return Err(format!(
                "{}: expected {} rows, found {}",
                self.name,
                self.n,
                self.entries.len()
            ));
        }
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!(
                    "{}: row {} has {} entries, expected {}",
                    self.name,
                    i,
                    row.len(),
                    self.n
                ));
            }
        }
        let m = ComplexMatrix::from_fn(self.n, self.n, |i, j| {
            C64::new(self.entries[i][j][0], self.entries[i][j][1])
        });
        if !m.is_finite() {
            return Err(format!("{}: non-finite entries", self.name));
        }
        Ok(m)
    }

    pub fn from_matrix(name: &str, m: &ComplexMatrix, kind_hint: Option<KindHint>) -> Self {
        let entries = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        MatrixFile {
            name: name.to_string(),
            n: m.nrows(),
            entries,
            kind_hint,
            expect: Expect::default(),
        }
    }
}

/// Loaded matrix plus its provenance.
pub struct LoadedMatrix {
    pub file: MatrixFile,
    pub matrix: ComplexMatrix,
    pub content_hash: String,
}

/// FNV-1a, enough to fingerprint report inputs.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

pub fn load(path: &Path) -> Result<LoadedMatrix, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let hash = content_hash(&bytes);
    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    let file = if is_csv {
        parse_csv(path, &bytes)?
    } else {
        serde_json::from_slice::<MatrixFile>(&bytes)
            .map_err(|e| format!("{}: {e}", path.display()))?
    };
    let matrix = file.to_matrix().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(LoadedMatrix {
        file,
        matrix,
        content_hash: hash,
    })
}

/// CSV rows of comma-separated reals (convenience import, real matrices only).
fn parse_csv(path: &Path, bytes: &[u8]) -> Result<MatrixFile, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut entries: Vec<Vec<[f64; 2]>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in trimmed.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|e| {
                format!(
                    "{}: line {}, column {}: {e}",
                    path.display(),
                    lineno + 1,
                    col + 1
                )
            })?;
            row.push([value, 0.0]);
        }
        entries.push(row);
    }
    let n = entries.len();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv-input".into());
    Ok(MatrixFile {
        name,
        n,
        entries,
        kind_hint: None,
        expect: Expect::default(),
    })
}

pub fn save(path: &Path, file: &MatrixFile) -> Result<(), String> {
    let text = serde_json::to_string_pretty(file).map_err(|e| e.to_string())?;
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}
