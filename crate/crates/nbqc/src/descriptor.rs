//! JSON code descriptors.
//!
//! Loading is fail-closed: the recorded spectra are recomputed and any
//! disagreement rejects the file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use nbqc_core::gf2m::FieldDesc;
use nbqc_core::protograph::{Edge, Protograph};
use nbqc_core::qclift::{spectra_from_walks, AceSpectrum, QcCode, DEFAULT_WALK_CAP};

use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub r: u32,
    pub poly: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub check: usize,
    pub var: usize,
    pub shift: u32,
    /// Label exponent; `None` for an unlabelled code.
    pub rho: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectra {
    /// Spectrum text such as `(inf,inf,inf,4)`; the depth is twice the
    /// number of entries.
    pub binary: Option<String>,
    pub nb: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub spectra: Spectra,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub field: FieldSpec,
    #[serde(rename = "Z")]
    pub z: u32,
    pub lambda: u32,
    pub base_matrix: Vec<Vec<u32>>,
    pub edges: Vec<EdgeSpec>,
    pub metadata: Metadata,
}

impl CodeDescriptor {
    pub fn from_code(code: &QcCode, seed: Option<u64>, binary: Option<&AceSpectrum>, nb: Option<&AceSpectrum>) -> Self {
        let p = code.proto();
        let edges = p
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| EdgeSpec {
                check: e.check,
                var: e.var,
                shift: code.shifts()[id],
                rho: code.labels().map(|l| l[id]),
            })
            .collect();
        CodeDescriptor {
            field: FieldSpec { r: code.field().r(), poly: code.field().primitive_poly() },
            z: code.z(),
            lambda: code.lambda(),
            base_matrix: p.base_matrix(),
            edges,
            metadata: Metadata {
                seed,
                spectra: Spectra { binary: binary.map(|s| s.to_text()), nb: nb.map(|s| s.to_text()) },
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    /// Rebuilds the code, checking structural consistency only.
    pub fn to_code(&self) -> Result<QcCode, Error> {
        let field = FieldDesc::new(self.field.r, Some(self.field.poly))?;
        let proto = Protograph::from_base_matrix(&self.base_matrix)?;
        if self.edges.len() != proto.n_edges() {
            return Err(Error::Verification(format!(
                "{} edges listed, base matrix has {}",
                self.edges.len(),
                proto.n_edges()
            )));
        }
        for (id, (spec, e)) in self.edges.iter().zip(proto.edges()).enumerate() {
            if (Edge { check: spec.check, var: spec.var }) != *e {
                return Err(Error::Verification(format!("edge {id} is not at ({}, {})", e.check, e.var)));
            }
        }
        let shifts = self.edges.iter().map(|e| e.shift).collect();
        let labels = match self.edges.iter().filter(|e| e.rho.is_some()).count() {
            0 => None,
            n if n == self.edges.len() => Some(self.edges.iter().map(|e| e.rho.unwrap()).collect()),
            _ => return Err(Error::Verification("some edges lack labels".into())),
        };
        Ok(QcCode::new(proto, self.z, shifts, labels, self.lambda, field)?)
    }

    /// [`to_code`](Self::to_code) plus recomputation of the recorded spectra.
    pub fn verify(&self) -> Result<QcCode, Error> {
        let code = self.to_code()?;
        code.expand_binary()?;
        let parse = |s: &Option<String>| -> Result<Option<AceSpectrum>, Error> {
            s.as_deref()
                .map(|t| t.parse().map_err(|_| Error::Verification(format!("bad spectrum `{t}`"))))
                .transpose()
        };
        let binary = parse(&self.metadata.spectra.binary)?;
        let nb = parse(&self.metadata.spectra.nb)?;
        if nb.is_some() && code.labels().is_none() {
            return Err(Error::Verification("NB spectrum recorded for an unlabelled code".into()));
        }
        let depth = binary.iter().chain(&nb).map(AceSpectrum::depth).max().unwrap_or(0);
        if depth > 0 {
            let walks = code.proto().enumerate_closed_walks(depth, DEFAULT_WALK_CAP)?;
            let actual = spectra_from_walks(&code, &walks, depth);
            if let Some(b) = &binary {
                let a = actual.binary.resized(b.depth(), nbqc_core::AceValue::Inf);
                if &a != b {
                    return Err(Error::Verification(format!("recorded binary spectrum {b}, actual {a}")));
                }
            }
            if let Some(n) = &nb {
                let a = actual.nb.expect("labelled").resized(n.depth(), nbqc_core::AceValue::Inf);
                if &a != n {
                    return Err(Error::Verification(format!("recorded NB spectrum {n}, actual {a}")));
                }
            }
        }
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("descriptor serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    /// Hex SHA-256 of the code itself (metadata excluded).
    pub fn digest(&self) -> String {
        let core = CodeDescriptor { metadata: Metadata { seed: None, spectra: Spectra { binary: None, nb: None }, version: String::new() }, ..self.clone() };
        hex::encode(Sha256::digest(serde_json::to_vec(&core).expect("descriptor serializes")))
    }
}

/// Reads and verifies a descriptor file.
pub fn load(path: &std::path::Path) -> Result<(CodeDescriptor, QcCode), Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    let d = CodeDescriptor::from_json(&text)?;
    let code = d.verify()?;
    Ok((d, code))
}
