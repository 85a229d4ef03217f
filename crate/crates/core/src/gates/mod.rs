//! Gate application, Kraus channels, and the two LOCC impossibility tests.
//!
//! Lemma 1 applies when the allowed inputs contain a pure product state and
//! the maximally mixed state; any other input with nonzero symmetric discord
//! then rules out an implementation by local POVMs, CP maps and classical
//! communication. Lemma 2 applies to two non-orthogonal product inputs: if the
//! gate changes the symmetric discord of some mixture of them, no LOCC
//! protocol implements it on that set.

use rayon::prelude::*;
use serde::Serialize;

use crate::discord::{d2_side_with, d2_sym_with, is_zero_discord_with, DiscordOptions, DEFAULT_ZERO_TOL};
use crate::error::{Error, Result};
use crate::qmat::ComplexMatrix;
use crate::qstate::{
    density_from_ket, is_ppt_separable, overlap, product_factors, schmidt_coefficients, DensityMatrix, Ket, Side,
};

mod channel;

pub use channel::*;

pub const PRODUCT_TOL: f64 = 1e-9;
pub const OVERLAP_TOL: f64 = 1e-9;
pub const DISCORD_DIFF_TOL: f64 = 1e-5;
pub const STATE_MATCH_TOL: f64 = 1e-9;

pub fn default_weights() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// A bipartite unitary together with its allowed (unentangled) inputs.
#[derive(Debug, Clone)]
pub struct GateCase {
    unitary: ComplexMatrix,
    inputs: Vec<DensityMatrix>,
    labels: Vec<String>,
}

impl GateCase {
    /// Checks unitarity (1e-10) and that every input passes the PPT test.
    pub fn new(unitary: ComplexMatrix, inputs: Vec<DensityMatrix>, labels: Vec<String>) -> Result<Self> {
        unitary.ensure_unitary(UNITARY_TOL)?;
        if labels.len() != inputs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} inputs",
                labels.len(),
                inputs.len()
            )));
        }
        for (rho, label) in inputs.iter().zip(&labels) {
            if rho.dim() != unitary.dim() {
                return Err(Error::DimensionMismatch {
                    expected: unitary.dim(),
                    got: rho.dim(),
                });
            }
            if !is_ppt_separable(rho)? {
                return Err(Error::InvalidState(format!("input {label} is entangled")));
            }
        }
        Ok(Self {
            unitary,
            inputs,
            labels,
        })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn inputs(&self) -> &[DensityMatrix] {
        &self.inputs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapClass {
    /// Both local overlap moduli unchanged.
    Constant,
    /// One local overlap grew while the other shrank.
    Traded,
    NonProductOutput,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapFactorization {
    /// |⟨a1|a2⟩⟨b1|b2⟩| for the inputs.
    pub lhs: f64,
    /// |⟨ψ1'|ψ2'⟩| for the outputs.
    pub rhs: f64,
    pub input_a: f64,
    pub input_b: f64,
    pub output_a: Option<f64>,
    pub output_b: Option<f64>,
    /// Complex product equality of input and output overlaps (1e-9).
    pub product_equality: bool,
    pub classification: OverlapClass,
}

/// Compares local overlaps before and after U for two product inputs.
pub fn overlap_factorization(
    first: (&Ket, &Ket),
    second: (&Ket, &Ket),
    u: &ComplexMatrix,
) -> Result<OverlapFactorization> {
    let (a1, b1) = first;
    let (a2, b2) = second;
    let (da, db) = (a1.dim(), b1.dim());
    if u.dim() != da * db || a2.dim() != da || b2.dim() != db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            got: u.dim(),
        });
    }
    u.ensure_unitary(UNITARY_TOL)?;

    let in_a = overlap(a1, a2)?;
    let in_b = overlap(b1, b2)?;
    let lhs = in_a * in_b;

    let out1 = a1.tensor(b1).apply(u)?;
    let out2 = a2.tensor(b2).apply(u)?;
    let global = overlap(&out1, &out2)?;

    let factors = (
        product_factors(&out1, da, db, PRODUCT_TOL)?,
        product_factors(&out2, da, db, PRODUCT_TOL)?,
    );
    let mut record = OverlapFactorization {
        lhs: lhs.norm(),
        rhs: global.norm(),
        input_a: in_a.norm(),
        input_b: in_b.norm(),
        output_a: None,
        output_b: None,
        product_equality: (lhs - global).norm() <= PRODUCT_TOL,
        classification: OverlapClass::NonProductOutput,
    };
    if let (Some((a1o, b1o)), Some((a2o, b2o))) = factors {
        let out_a = overlap(&a1o, &a2o)?;
        let out_b = overlap(&b1o, &b2o)?;
        record.output_a = Some(out_a.norm());
        record.output_b = Some(out_b.norm());
        record.product_equality = (lhs - out_a * out_b).norm() <= PRODUCT_TOL && record.product_equality;
        let constant =
            (out_a.norm() - in_a.norm()).abs() <= PRODUCT_TOL && (out_b.norm() - in_b.norm()).abs() <= PRODUCT_TOL;
        record.classification = if constant {
            OverlapClass::Constant
        } else {
            OverlapClass::Traded
        };
    }
    Ok(record)
}

#[derive(Debug, Clone, Copy)]
pub struct VerdictOptions {
    pub discord: DiscordOptions,
    /// Discord below this (bits) counts as zero.
    pub zero_tol: f64,
    /// Discord change above this (bits) counts as a change.
    pub diff_tol: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            discord: DiscordOptions::default(),
            zero_tol: DEFAULT_ZERO_TOL,
            diff_tol: DISCORD_DIFF_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDiscord {
    pub index: usize,
    pub label: String,
    pub discord_a: f64,
    pub discord_b: f64,
    pub discord_sym: f64,
    pub zero_a: bool,
    pub zero_b: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub weight: f64,
    pub discord_in: f64,
    pub discord_out: f64,
    pub difference: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Lemma1 {
        pure_product_input: Option<usize>,
        maximally_mixed_input: Option<usize>,
        offending_input: Option<usize>,
        inputs: Vec<InputDiscord>,
    },
    Lemma2 {
        first_witness: Option<WeightRow>,
        rows: Vec<WeightRow>,
        overlaps: OverlapFactorization,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaVerdict {
    pub lemma: u8,
    pub applicable: bool,
    pub locc_ruled_out: bool,
    pub witness: Witness,
}

fn is_pure_product(rho: &DensityMatrix) -> Result<bool> {
    if !rho.is_pure(PURITY_TOL) {
        return Ok(false);
    }
    let eig = crate::qmat::eig_hermitian(rho.matrix())?;
    let top = Ket::normalized(eig.eigenvectors.last().expect("non-empty").clone())?;
    let sv = schmidt_coefficients(&top, rho.dim_a(), rho.dim_b())?;
    Ok(sv.get(1).is_none_or(|&s| s < PRODUCT_TOL))
}

fn require_two_qubits(dims: (usize, usize)) -> Result<()> {
    if dims != (2, 2) {
        return Err(Error::UnsupportedDimension(format!(
            "two-qubit case required, got {}x{}",
            dims.0, dims.1
        )));
    }
    Ok(())
}

/// Lemma 1 check on the inputs of `case`.
pub fn lemma1_verdict(case: &GateCase) -> Result<LemmaVerdict> {
    lemma1_verdict_with(case, &VerdictOptions::default())
}

pub fn lemma1_verdict_with(case: &GateCase, opts: &VerdictOptions) -> Result<LemmaVerdict> {
    for rho in case.inputs() {
        require_two_qubits(rho.dims())?;
    }
    let mixed = DensityMatrix::maximally_mixed(2, 2);
    let mut pure_product_input = None;
    let mut maximally_mixed_input = None;
    for (i, rho) in case.inputs().iter().enumerate() {
        if maximally_mixed_input.is_none() && rho.matrix().max_abs_diff(mixed.matrix()) <= STATE_MATCH_TOL {
            maximally_mixed_input = Some(i);
        } else if pure_product_input.is_none() && is_pure_product(rho)? {
            pure_product_input = Some(i);
        }
    }
    let applicable = pure_product_input.is_some() && maximally_mixed_input.is_some();

    let others: Vec<usize> = (0..case.inputs().len())
        .filter(|i| Some(*i) != pure_product_input && Some(*i) != maximally_mixed_input)
        .collect();
    let inputs = others
        .par_iter()
        .map(|&i| -> Result<InputDiscord> {
            let rho = &case.inputs()[i];
            let zero_a = is_zero_discord_with(rho, Side::A, opts.zero_tol, &opts.discord)?;
            let zero_b = is_zero_discord_with(rho, Side::B, opts.zero_tol, &opts.discord)?;
            let discord_a = if zero_a {
                0.0
            } else {
                d2_side_with(rho, Side::A, &opts.discord)?.value
            };
            let discord_b = if zero_b {
                0.0
            } else {
                d2_side_with(rho, Side::B, &opts.discord)?.value
            };
            Ok(InputDiscord {
                index: i,
                label: case.labels()[i].clone(),
                discord_a,
                discord_b,
                discord_sym: discord_a.min(discord_b),
                zero_a,
                zero_b,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let offending_input = inputs.iter().find(|d| !d.zero_a && !d.zero_b).map(|d| d.index);
    Ok(LemmaVerdict {
        lemma: 1,
        applicable,
        locc_ruled_out: applicable && offending_input.is_some(),
        witness: Witness::Lemma1 {
            pure_product_input,
            maximally_mixed_input,
            offending_input,
            inputs,
        },
    })
}

/// Lemma 2 scan over mixtures w ρ_ψ1 + (1 − w) ρ_ψ2 of two product kets.
pub fn lemma2_verdict(
    psi1: &Ket,
    psi2: &Ket,
    dims: (usize, usize),
    u: &ComplexMatrix,
    weights: &[f64],
) -> Result<LemmaVerdict> {
    lemma2_verdict_with(psi1, psi2, dims, u, weights, &VerdictOptions::default())
}

pub fn lemma2_verdict_with(
    psi1: &Ket,
    psi2: &Ket,
    dims: (usize, usize),
    u: &ComplexMatrix,
    weights: &[f64],
    opts: &VerdictOptions,
) -> Result<LemmaVerdict> {
    require_two_qubits(dims)?;
    let (da, db) = dims;
    u.ensure_unitary(UNITARY_TOL)?;
    if u.dim() != da * db || psi1.dim() != da * db || psi2.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            got: u.dim(),
        });
    }
    let ov = overlap(psi1, psi2)?.norm();
    if ov <= OVERLAP_TOL {
        return Err(Error::OrthogonalInputs { overlap: ov });
    }
    let mut factors = Vec::with_capacity(2);
    for (index, psi) in [psi1, psi2].into_iter().enumerate() {
        match product_factors(psi, da, db, PRODUCT_TOL)? {
            Some(f) => factors.push(f),
            None => {
                let schmidt = schmidt_coefficients(psi, da, db)?[1];
                return Err(Error::NotProduct { index, schmidt });
            }
        }
    }
    if weights.is_empty() {
        return Err(Error::InvalidArgument("no weights to scan".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return Err(Error::InvalidArgument(format!("weight {w} outside (0, 1)")));
    }
    let overlaps = overlap_factorization((&factors[0].0, &factors[0].1), (&factors[1].0, &factors[1].1), u)?;

    let rho1 = density_from_ket(psi1, da, db)?;
    let rho2 = density_from_ket(psi2, da, db)?;
    let rows = weights
        .par_iter()
        .map(|&w| -> Result<WeightRow> {
            let rho = DensityMatrix::mixture(&[(w, &rho1), (1.0 - w, &rho2)])?;
            let out = apply_unitary(&rho, u)?;
            let discord_in = d2_sym_with(&rho, &opts.discord)?.value;
            let discord_out = d2_sym_with(&out, &opts.discord)?.value;
            let difference = (discord_in - discord_out).abs();
            Ok(WeightRow {
                weight: w,
                discord_in,
                discord_out,
                difference,
                exceeds: difference > opts.diff_tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let first_witness = rows
        .iter()
        .filter(|r| r.exceeds)
        .min_by(|a, b| a.weight.total_cmp(&b.weight))
        .cloned();
    Ok(LemmaVerdict {
        lemma: 2,
        applicable: true,
        locc_ruled_out: first_witness.is_some(),
        witness: Witness::Lemma2 {
            first_witness,
            rows,
            overlaps,
        },
    })
}

#[cfg(test)]
mod tests;
