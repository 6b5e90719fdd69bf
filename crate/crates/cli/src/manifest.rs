//! Signed JSON artifact holding a triorthogonal matrix and everything needed to rebuild it.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use agdistill::curves::Curve;
use agdistill::gf2e::{Field, FieldError, FieldSpec};
use agdistill::linalg::Matrix;
use agdistill::selfdual::{
    find_self_dual_basis, paper_basis_s10, BasisError, SelfDualBasis, DEFAULT_ATTEMPTS,
};
use agdistill::triortho::{ConstructError, Provenance, TriorthogonalMatrix};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("digest mismatch: stored {stored}, computed {computed}")]
    Digest { stored: String, computed: String },
    #[error("manifest bytes are not in canonical form")]
    NotCanonical,
    #[error("field: {0}")]
    Field(#[from] FieldError),
    #[error("basis: {0}")]
    Basis(#[from] BasisError),
    #[error("curve {curve} is over a different field than the manifest")]
    CurveField { curve: String },
    #[error("curve: {0}")]
    Curve(#[from] agdistill::curves::CurveError),
    #[error("matrix: {0}")]
    Matrix(#[from] ConstructError),
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength { row: usize, got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub s: u32,
    pub modulus: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub a: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub genus: usize,
    pub t: usize,
    pub deg_a1: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub construct: u64,
    pub basis: u64,
}

/// Field order is the serialization order and is part of the format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub field: FieldEntry,
    pub basis: Vec<String>,
    pub curve: String,
    pub params: Params,
    pub column_permuted: bool,
    pub place_perm: Vec<usize>,
    pub w: String,
    pub sigma: String,
    pub tau: String,
    pub rows: Vec<String>,
    pub seeds: Seeds,
}

#[derive(Deserialize)]
struct Signed {
    #[serde(flatten)]
    body: Manifest,
    digest: String,
}

/// Fixed published basis at s = 10 with the default modulus, else a seeded search.
pub fn default_basis(field: &Field, seed: u64) -> Result<SelfDualBasis, BasisError> {
    match paper_basis_s10(field) {
        Ok(b) => Ok(b),
        Err(_) => find_self_dual_basis(field, seed, DEFAULT_ATTEMPTS),
    }
}

impl Manifest {
    pub fn from_matrix(
        t: &TriorthogonalMatrix,
        basis: &SelfDualBasis,
        radius: usize,
        deg_a1: usize,
        basis_seed: u64,
    ) -> Self {
        let f = &t.field;
        let spec = f.spec();
        Manifest {
            format_version: FORMAT_VERSION,
            field: FieldEntry { s: spec.s(), modulus: format!("{:x}", spec.modulus()) },
            basis: basis.to_hex(f),
            curve: t.provenance.curve.clone(),
            params: Params {
                a: t.provenance.a,
                k: t.k,
                n: t.n,
                m: t.m,
                genus: t.provenance.genus,
                t: radius,
                deg_a1,
            },
            column_permuted: t.provenance.column_permuted,
            place_perm: t.provenance.place_perm.clone(),
            w: f.vec_to_hex(&t.w),
            sigma: f.vec_to_hex(&t.sigma),
            tau: f.vec_to_hex(&t.tau),
            rows: t.rows.row_iter().map(|r| f.vec_to_hex(r)).collect(),
            seeds: Seeds { construct: t.provenance.seed, basis: basis_seed },
        }
    }

    /// Canonical bytes: compact body with the digest of everything before it appended.
    pub fn to_bytes(&self) -> Result<Vec<u8>, ManifestError> {
        let mut body = serde_json::to_vec(self)?;
        body.pop();
        let digest = hex::encode(Sha256::digest(&body));
        body.extend_from_slice(format!(",\"digest\":\"{digest}\"}}").as_bytes());
        Ok(body)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ManifestError> {
        let signed: Signed = serde_json::from_slice(bytes)?;
        if signed.body.format_version != FORMAT_VERSION {
            return Err(ManifestError::Version(signed.body.format_version));
        }
        let mut body = serde_json::to_vec(&signed.body)?;
        body.pop();
        let computed = hex::encode(Sha256::digest(&body));
        if computed != signed.digest {
            return Err(ManifestError::Digest { stored: signed.digest, computed });
        }
        if signed.body.to_bytes()? != bytes {
            return Err(ManifestError::NotCanonical);
        }
        Ok(signed.body)
    }

    /// Gzip when the path ends in `.gz`.
    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        let bytes = self.to_bytes()?;
        if path.extension().is_some_and(|e| e == "gz") {
            let mut enc = GzEncoder::new(fs::File::create(path)?, Compression::default());
            enc.write_all(&bytes)?;
            enc.finish()?;
        } else {
            fs::write(path, bytes)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let raw = fs::read(path)?;
        let bytes = if raw.starts_with(&[0x1f, 0x8b]) {
            let mut out = Vec::new();
            GzDecoder::new(&raw[..]).read_to_end(&mut out)?;
            out
        } else {
            raw
        };
        Self::from_bytes(&bytes)
    }

    pub fn field_spec(&self) -> Result<FieldSpec, ManifestError> {
        let modulus = u32::from_str_radix(&self.field.modulus, 16)
            .map_err(|_| FieldError::BadHex(self.field.modulus.clone()))?;
        Ok(FieldSpec::new(self.field.s, modulus)?)
    }

    pub fn curve(&self) -> Result<Curve, ManifestError> {
        let curve = Curve::parse(&self.curve)?;
        if curve.field().spec() != self.field_spec()? {
            return Err(ManifestError::CurveField { curve: self.curve.clone() });
        }
        Ok(curve)
    }

    pub fn basis(&self, field: &Field) -> Result<SelfDualBasis, ManifestError> {
        Ok(SelfDualBasis::from_hex(field, &self.basis)?)
    }

    pub fn matrix(&self) -> Result<TriorthogonalMatrix, ManifestError> {
        let curve = self.curve()?;
        let f: Arc<Field> = curve.field().clone();
        let p = &self.params;
        let mut data = Vec::with_capacity(p.m * p.n);
        for (r, row) in self.rows.iter().enumerate() {
            let v = f.vec_from_hex(row)?;
            if v.len() != p.n {
                return Err(ManifestError::RowLength { row: r, got: v.len(), expected: p.n });
            }
            data.extend(v);
        }
        if self.rows.len() != p.m {
            return Err(ManifestError::RowLength { row: self.rows.len(), got: 0, expected: p.m });
        }
        let rows = Matrix::from_data(p.m, p.n, data);
        let provenance = Provenance {
            curve: self.curve.clone(),
            a: p.a,
            genus: p.genus,
            seed: self.seeds.construct,
            place_perm: self.place_perm.clone(),
            column_permuted: self.column_permuted,
        };
        Ok(TriorthogonalMatrix::from_parts(
            f.clone(),
            p.k,
            rows,
            f.vec_from_hex(&self.sigma)?,
            f.vec_from_hex(&self.tau)?,
            f.vec_from_hex(&self.w)?,
            provenance,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use agdistill::triortho::construct;

    fn small() -> Manifest {
        let curve = Curve::parse("rational:s=5").unwrap();
        let t = construct(&curve, 4, 1, 0).unwrap();
        let b = default_basis(curve.field(), 0).unwrap();
        Manifest::from_matrix(&t, &b, 2, 2, 0)
    }

    #[test]
    fn roundtrip_bytes() {
        let m = small();
        let bytes = m.to_bytes().unwrap();
        let back = Manifest::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_bytes().unwrap(), bytes);
        let t = back.matrix().unwrap();
        assert_eq!((t.n, t.k, t.m), (30, 1, 5));
    }

    #[test]
    fn tamper_detected() {
        let bytes = small().to_bytes().unwrap();
        let s = String::from_utf8(bytes).unwrap();
        let tampered = s.replacen("\"k\":1", "\"k\":2", 1);
        assert!(matches!(Manifest::from_bytes(tampered.as_bytes()), Err(ManifestError::Digest { .. })));
        let spaced = s.replacen("{", "{ ", 1);
        assert!(matches!(Manifest::from_bytes(spaced.as_bytes()), Err(ManifestError::NotCanonical)));
    }

    #[test]
    fn starts_with_version_ends_with_digest() {
        let s = String::from_utf8(small().to_bytes().unwrap()).unwrap();
        assert!(s.starts_with("{\"format_version\":1,\"field\":{\"s\":5,\"modulus\":\"25\"}"));
        assert!(s.ends_with("\"}") && s.contains(",\"digest\":\""));
    }
}
