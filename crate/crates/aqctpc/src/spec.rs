//! TOML code specifications.
//!
//! A document has an `[inner]` table naming the binary (or `p`-ary) inner
//! code, an `[outer]` table fixing the nested outer pair over `GF(p^k1)`, and
//! an optional `[options]` table.
//!
//! ```toml
//! [inner]
//! family = "simplex"
//! m = 2
//!
//! [outer]
//! d2 = 3
//! d3 = 3
//! ```
//!
//! Unknown keys are rejected, and every document describes exactly one
//! construction: a family or explicit matrices, `d3` or `k_target`,
//! distances or explicit outer parity checks.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::codes::{
    min_distance_exhaustive, nested_grs_pair, reed_muller_1, repetition_code, simplex_code, spc_code, CodeError,
    Distance, DistanceKind, Enumerated, LinearCode, NestedOuterPair, PairConstruction, DEFAULT_ENUMERATION_CAP,
};
use crate::decode::ZMode;
use crate::galois::{Field, FieldError};
use crate::matgf::{MatError, Matrix};
use crate::weave::{AqctpcCode, Parameters, WeaveError};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Weave(#[from] WeaveError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `[m+1, m, 2]` single parity check.
    Spc,
    /// `[2^m−1, m, 2^{m−1}]` simplex.
    Simplex,
    /// `[m, 1, m]` repetition; `m` is the length.
    Repetition,
    /// `[2^m, m+1, 2^{m−1}]` first-order Reed–Muller.
    #[serde(rename = "reed-muller-1")]
    ReedMuller1,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Depth {
    /// Structural checks only.
    #[default]
    Quick,
    /// Adds exhaustive distances and decoder radii.
    Full,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZModeSpec {
    #[default]
    Plain,
    DetectErasure,
}

impl From<ZModeSpec> for ZMode {
    fn from(m: ZModeSpec) -> ZMode {
        match m {
            ZModeSpec::Plain => ZMode::Plain,
            ZModeSpec::DetectErasure => ZMode::DetectErasure,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSpec {
    pub family: Option<Family>,
    pub m: Option<usize>,
    /// Generator rows as digit strings.
    pub generator: Option<Vec<String>>,
    /// Parity-check rows as digit strings.
    pub parity: Option<Vec<String>>,
    pub distance: Option<usize>,
    /// Prime field of the inner code; 2 when absent.
    pub characteristic: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterSpec {
    pub n2: Option<usize>,
    pub d2: Option<usize>,
    pub d3: Option<usize>,
    /// Quantum dimension `K`; fixes `d3 = n2 + 2 − d2 − K/k1`.
    pub k_target: Option<usize>,
    /// Coefficients of the outer field modulus, constant term first.
    pub modulus: Option<Vec<u32>>,
    /// Explicit parity check of `C2`, entries as integers.
    pub h2: Option<Vec<Vec<u32>>>,
    /// Explicit parity check of `C3`, entries as integers.
    pub h3: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOptions {
    #[serde(default)]
    pub depth: Depth,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub z_mode: ZModeSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecDocument {
    pub inner: InnerSpec,
    pub outer: Option<OuterSpec>,
    #[serde(default)]
    pub options: SpecOptions,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl CodeSpecDocument {
    pub fn parse(text: &str) -> Result<CodeSpecDocument, SpecError> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            SpecError::Parse {
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn from_path(path: &Path) -> Result<CodeSpecDocument, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The inner code, with its distance attached when given or enumerable.
    pub fn inner_code(&self) -> Result<LinearCode, SpecError> {
        let inner = &self.inner;
        let explicit = inner.generator.is_some() || inner.parity.is_some();
        let code = match (inner.family, explicit) {
            (Some(_), true) => return invalid("[inner] takes either a family or explicit matrices, not both"),
            (None, false) => return invalid("[inner] needs a family or a generator/parity matrix"),
            (Some(family), false) => {
                if inner.characteristic.is_some_and(|p| p != 2) {
                    return invalid("inner families are binary");
                }
                let Some(m) = inner.m else {
                    return invalid("[inner] family needs m");
                };
                match family {
                    Family::Spc => spc_code(m)?,
                    Family::Simplex => simplex_code(m)?,
                    Family::Repetition => repetition_code(m)?,
                    Family::ReedMuller1 => reed_muller_1(m)?,
                }
            }
            (None, true) => {
                if inner.m.is_some() {
                    return invalid("m applies only to families");
                }
                let field = Field::prime(inner.characteristic.unwrap_or(2))?;
                let rows = |r: &Option<Vec<String>>| -> Result<Option<Matrix>, SpecError> {
                    r.as_ref()
                        .map(|rows| {
                            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
                            Matrix::from_digit_rows(&field, &refs)
                        })
                        .transpose()
                        .map_err(Into::into)
                };
                LinearCode::from_matrices(&field, rows(&inner.generator)?, rows(&inner.parity)?)?
            }
        };
        let computed = match min_distance_exhaustive(&code, DEFAULT_ENUMERATION_CAP) {
            Enumerated::Exact(d) => Some(d),
            Enumerated::NotComputed { .. } => None,
        };
        let distance = match (inner.distance, computed) {
            (Some(claimed), Some(d)) if claimed != d => {
                return invalid(format!("[inner] distance = {claimed} but the code has distance {d}"))
            }
            (_, Some(d)) => Distance {
                value: d,
                kind: DistanceKind::Exact,
            },
            (Some(claimed), None) if code.distance().kind == DistanceKind::Family => {
                if claimed != code.distance().value {
                    return invalid(format!(
                        "[inner] distance = {claimed} but the family has distance {}",
                        code.distance().value
                    ));
                }
                code.distance()
            }
            (Some(claimed), None) => Distance {
                value: claimed,
                kind: DistanceKind::LowerBound,
            },
            (None, None) => code.distance(),
        };
        Ok(code.with_distance(distance))
    }

    /// `GF(p^k1)` for the inner code's `p` and `k1`.
    pub fn outer_field(&self, inner: &LinearCode) -> Result<Arc<Field>, SpecError> {
        let base = Arc::clone(inner.field());
        let modulus = self.outer.as_ref().and_then(|o| o.modulus.as_deref());
        match inner.k() {
            0 => invalid("inner code has dimension 0"),
            1 if modulus.is_some() => invalid("modulus given for a prime outer field"),
            1 => Ok(base),
            k => Ok(Field::extension(&base, k as u32, modulus)?),
        }
    }

    /// Default outer length for families that fix one.
    fn default_n2(&self) -> Option<usize> {
        let m = self.inner.m?;
        match self.inner.family? {
            Family::Spc => Some(m * ((1usize << m) - 1) / (m + 1)),
            Family::Simplex => Some((1usize << m) + 1),
            _ => None,
        }
    }

    /// `(n2, d2, d3)` with defaults and `k_target` resolved.
    pub fn outer_distances(&self, inner: &LinearCode) -> Result<(usize, usize, usize), SpecError> {
        let Some(outer) = &self.outer else {
            return invalid("missing [outer] table");
        };
        let Some(n2) = outer.n2.or_else(|| self.default_n2()) else {
            return invalid("[outer] needs n2 for this inner code");
        };
        let Some(d2) = outer.d2 else {
            return invalid("[outer] needs d2");
        };
        let d3 = match (outer.d3, outer.k_target) {
            (Some(_), Some(_)) => return invalid("[outer] takes d3 or k_target, not both"),
            (None, None) => return invalid("[outer] needs d3 or k_target"),
            (Some(d3), None) => d3,
            (None, Some(k)) => {
                let k1 = inner.k();
                if k == 0 || k % k1 != 0 {
                    return invalid(format!("k_target = {k} is not a positive multiple of k1 = {k1}"));
                }
                match (n2 + 2).checked_sub(d2 + k / k1) {
                    Some(d3) if d3 >= 1 => d3,
                    _ => return invalid(format!("k_target = {k} is too large for n2 = {n2}, d2 = {d2}")),
                }
            }
        };
        Ok((n2, d2, d3))
    }

    /// Parameters implied by the constituents, before any matrix is built.
    pub fn target_parameters(&self, inner: &LinearCode) -> Result<Parameters, SpecError> {
        let (n2, d2, d3) = self.outer_distances(inner)?;
        Parameters::from_constituents(inner.n(), inner.k(), inner.distance().value, n2, d2, d3)
            .ok_or_else(|| SpecError::Invalid(format!("d2 = {d2}, d3 = {d3} give no code at n2 = {n2}")))
    }

    /// The nested outer pair over the outer field.
    pub fn outer_pair(&self, inner: &LinearCode) -> Result<NestedOuterPair, SpecError> {
        let Some(outer) = &self.outer else {
            return invalid("missing [outer] table");
        };
        let field = self.outer_field(inner)?;
        match (&outer.h2, &outer.h3) {
            (Some(h2), Some(h3)) => {
                if outer.n2.is_some() || outer.d2.is_some() || outer.d3.is_some() || outer.k_target.is_some() {
                    return invalid("explicit h2/h3 exclude n2, d2, d3 and k_target");
                }
                let code = |rows: &[Vec<u32>]| -> Result<LinearCode, SpecError> {
                    let c = LinearCode::from_matrices(&field, None, Some(Matrix::from_rows(&field, rows)?))?;
                    let d = match min_distance_exhaustive(&c, DEFAULT_ENUMERATION_CAP) {
                        Enumerated::Exact(d) => Distance {
                            value: d,
                            kind: DistanceKind::Exact,
                        },
                        Enumerated::NotComputed { .. } => Distance::unknown(),
                    };
                    Ok(c.with_distance(d))
                };
                let pair = NestedOuterPair {
                    c2: code(h2)?,
                    c3: code(h3)?,
                    construction: PairConstruction::Explicit,
                    points: Vec::new(),
                };
                pair.verify()?;
                Ok(pair)
            }
            (None, None) => {
                let (n2, d2, d3) = self.outer_distances(inner)?;
                Ok(nested_grs_pair(&field, n2, d2, d3)?)
            }
            _ => invalid("[outer] needs both h2 and h3"),
        }
    }

    /// Builds and verifies the code.
    pub fn build(&self) -> Result<AqctpcCode, SpecError> {
        let inner = self.inner_code()?;
        let pair = self.outer_pair(&inner)?;
        Ok(AqctpcCode::build(inner, pair)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_spec_builds_15_2() {
        let doc = CodeSpecDocument::parse("[inner]\nfamily = \"simplex\"\nm = 2\n[outer]\nd2 = 3\nd3 = 3\n").unwrap();
        let p = doc.build().unwrap().params();
        assert_eq!((p.n, p.k, p.dz, p.dx), (15, 2, 6, 3));
    }

    #[test]
    fn k_target_fixes_d3() {
        let doc = CodeSpecDocument::parse("[inner]\nfamily = \"spc\"\nm = 3\n[outer]\nd2 = 3\nk_target = 6\n").unwrap();
        let pair = doc.outer_pair(&doc.inner_code().unwrap()).unwrap();
        // n2 = floor(3·7/4) = 5, d3 = 5 + 2 − 3 − 2
        assert_eq!((pair.c2.n(), pair.c3.distance().value), (5, 2));
    }

    #[test]
    fn unknown_key_reports_position() {
        let err = CodeSpecDocument::parse("[inner]\nfamily = \"spc\"\nm = 3\ncolour = 1\n").unwrap_err();
        match err {
            SpecError::Parse { line, column, .. } => assert_eq!((line, column), (4, 1)),
            e => panic!("unexpected {e}"),
        }
        let err = CodeSpecDocument::parse("[inner]\nfamily = \"spc\"\nm = \n").unwrap_err();
        assert!(matches!(err, SpecError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn ambiguous_documents_rejected() {
        let both = "[inner]\nfamily = \"spc\"\nm = 3\ngenerator = [\"1001\"]\n[outer]\nd2 = 3\nd3 = 3\n";
        assert!(matches!(
            CodeSpecDocument::parse(both).unwrap().build(),
            Err(SpecError::Invalid(_))
        ));
        let both = "[inner]\nfamily = \"spc\"\nm = 3\n[outer]\nd2 = 3\nd3 = 3\nk_target = 3\n";
        assert!(matches!(
            CodeSpecDocument::parse(both).unwrap().build(),
            Err(SpecError::Invalid(_))
        ));
    }

    #[test]
    fn explicit_inner_distance_checked() {
        let doc = "[inner]\ngenerator = [\"1110\", \"0111\"]\ndistance = 2\n";
        let code = CodeSpecDocument::parse(doc).unwrap().inner_code().unwrap();
        assert_eq!(code.distance().value, 2);
        let doc = "[inner]\ngenerator = [\"1110\", \"0111\"]\ndistance = 3\n";
        assert!(CodeSpecDocument::parse(doc).unwrap().inner_code().is_err());
    }

    #[test]
    fn explicit_outer_matches_generated_pair() {
        let doc =
            CodeSpecDocument::parse("[inner]\nfamily = \"spc\"\nm = 2\n[outer]\nn2 = 3\nd2 = 2\nd3 = 2\n").unwrap();
        let inner = doc.inner_code().unwrap();
        let pair = doc.outer_pair(&inner).unwrap();
        let rows = |m: &Matrix| format!("{:?}", m.to_rows());
        let text = format!(
            "[inner]\nfamily = \"spc\"\nm = 2\n[outer]\nh2 = {}\nh3 = {}\n",
            rows(pair.c2.parity()),
            rows(pair.c3.parity())
        );
        let explicit = CodeSpecDocument::parse(&text).unwrap().build().unwrap();
        let generated = doc.build().unwrap();
        assert_eq!(explicit.hx(), generated.hx());
        assert_eq!(explicit.params().dz, generated.params().dz);
    }
}
