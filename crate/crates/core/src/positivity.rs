//! Positivity strategies for hermitian moment-matrix blocks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ldl_psd, min_eigenvalue, LdlCertificate, NegativityWitness};
use crate::scalar::{MomentBlocks, C64, FLOAT_TOL};
use crate::strategy::Named;

/// Decides whether every block is positive semidefinite.
pub trait PositivityMethod: Named + Send + Sync {
    fn check(&self, blocks: &MomentBlocks) -> Result<PositivityReport>;
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// One factorization per block.
    Ldl {
        #[serde(serialize_with = "pivots_only")]
        factors: Vec<LdlCertificate>,
    },
    Negative {
        block: usize,
        witness: NegativityWitness,
    },
    Eigen {
        min_eigenvalue: f64,
        block: Option<usize>,
    },
}

fn pivots_only<S: serde::Serializer>(
    f: &[LdlCertificate],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pivots: Vec<Vec<String>> = f
        .iter()
        .map(|c| c.pivots.iter().map(|p| p.to_string()).collect())
        .collect();
    serde::Serialize::serialize(&pivots, s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub method: &'static str,
    pub certificate: Certificate,
}

/// Exact pivoted `LDL^*`; a negative pivot or a zero pivot with a nonzero
/// coupling is a negativity witness.
pub struct LdlPositivity;

impl Named for LdlPositivity {
    fn name(&self) -> &'static str {
        "ldl"
    }
}

impl PositivityMethod for LdlPositivity {
    fn check(&self, blocks: &MomentBlocks) -> Result<PositivityReport> {
        let MomentBlocks::Exact(blocks) = blocks else {
            return Err(Error::FloatModeUnsupported);
        };
        let mut factors = Vec::with_capacity(blocks.len());
        for (k, b) in blocks.iter().enumerate() {
            match ldl_psd(b) {
                Ok(f) => factors.push(f),
                Err(witness) => {
                    return Ok(PositivityReport {
                        positive: false,
                        method: self.name(),
                        certificate: Certificate::Negative { block: k, witness },
                    })
                }
            }
        }
        Ok(PositivityReport {
            positive: true,
            method: self.name(),
            certificate: Certificate::Ldl { factors },
        })
    }
}

/// Minimum eigenvalue in `f64`, accepted down to `-FLOAT_TOL`.
pub struct EigenPositivity;

impl Named for EigenPositivity {
    fn name(&self) -> &'static str {
        "eigen"
    }
}

impl PositivityMethod for EigenPositivity {
    fn check(&self, blocks: &MomentBlocks) -> Result<PositivityReport> {
        let float: Vec<Vec<Vec<C64>>> = match blocks {
            MomentBlocks::Exact(b) => b
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|r| r.iter().map(|x| x.to_c64()).collect())
                        .collect()
                })
                .collect(),
            MomentBlocks::Float(b) => b.clone(),
        };
        let mut worst = f64::INFINITY;
        let mut at = None;
        for (k, m) in float.iter().enumerate() {
            let e = min_eigenvalue(m);
            if e < worst {
                worst = e;
                at = Some(k);
            }
        }
        if float.is_empty() {
            worst = 0.0;
        }
        Ok(PositivityReport {
            positive: worst >= -FLOAT_TOL,
            method: self.name(),
            certificate: Certificate::Eigen {
                min_eigenvalue: worst,
                block: at,
            },
        })
    }
}
