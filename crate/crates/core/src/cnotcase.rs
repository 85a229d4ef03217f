//! The CNOT worked example: four product inputs, the flip/non-flip typing of
//! each party's local operation, and what observing those types reveals.
//!
//! If CNOT could be run on the four inputs below by LOCC alone, each party
//! would learn the type of their own local operation on |Y₊⟩. The pair of
//! types narrows the input to two candidates; any other type pair seen on a
//! later use pins it down. That amounts to unambiguous discrimination of
//! non-orthogonal states from one copy.

use std::collections::BTreeSet;
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{cnot, QuantumChannel};
use crate::qmat::{self, ComplexMatrix, C64, I, ONE};
use crate::qstate::{overlap, pauli_eigenstate, Ket, PauliAxis, Sign};

/// Fidelity above which a channel output counts as |Y₋⟩ or |Y₊⟩.
pub const TYPE_FIDELITY: f64 = 1.0 - 1e-9;
/// Fidelity required of exact (unitary) constructions.
pub const EXACT_FIDELITY: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    A,
    B,
    C,
    D,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 4] = [CaseLabel::A, CaseLabel::B, CaseLabel::C, CaseLabel::D];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(Self::A),
            "b" => Some(Self::B),
            "c" => Some(Self::C),
            "d" => Some(Self::D),
            _ => None,
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
        })
    }
}

/// Flipping, non-flipping or undetermined, judged by the action on |Y₊⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OpType {
    F,
    N,
    U,
}

impl OpType {
    pub const ALL: [OpType; 3] = [OpType::F, OpType::N, OpType::U];

    pub fn is_definite(self) -> bool {
        self != OpType::U
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "F" | "f" => Some(Self::F),
            "N" | "n" => Some(Self::N),
            "U" | "u" => Some(Self::U),
            _ => None,
        }
    }
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::F => "F",
            Self::N => "N",
            Self::U => "U",
        })
    }
}

pub type TypePair = (OpType, OpType);

fn y_plus() -> Ket {
    pauli_eigenstate(PauliAxis::Y, Sign::Plus)
}

fn y_minus() -> Ket {
    pauli_eigenstate(PauliAxis::Y, Sign::Minus)
}

/// One row of the input/output table, kept factorised per party.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub label: CaseLabel,
    pub input_a: Ket,
    pub input_b: Ket,
    /// Global phase printed in front of the output.
    pub output_phase: C64,
    pub output_a: Ket,
    pub output_b: Ket,
}

impl TableRow {
    pub fn input(&self) -> Ket {
        self.input_a.tensor(&self.input_b)
    }

    pub fn output(&self) -> Ket {
        let prod = self.output_a.tensor(&self.output_b);
        Ket::new(prod.amplitudes().iter().map(|z| z * self.output_phase).collect()).expect("unit phase")
    }
}

pub fn table1() -> Vec<TableRow> {
    let z0 = Ket::basis(2, 0);
    let z1 = Ket::basis(2, 1);
    let xp = pauli_eigenstate(PauliAxis::X, Sign::Plus);
    let xm = pauli_eigenstate(PauliAxis::X, Sign::Minus);
    let row = |label, input_a: &Ket, input_b: &Ket, output_phase, output_a: &Ket, output_b: &Ket| TableRow {
        label,
        input_a: input_a.clone(),
        input_b: input_b.clone(),
        output_phase,
        output_a: output_a.clone(),
        output_b: output_b.clone(),
    };
    vec![
        row(CaseLabel::A, &z1, &y_plus(), I, &z1, &y_minus()),
        row(CaseLabel::B, &z0, &y_plus(), ONE, &z0, &y_plus()),
        row(CaseLabel::C, &y_plus(), &xm, ONE, &y_minus(), &xm),
        row(CaseLabel::D, &y_plus(), &xp, ONE, &y_plus(), &xp),
    ]
}

pub fn table_row(label: CaseLabel) -> TableRow {
    table1()
        .into_iter()
        .find(|r| r.label == label)
        .expect("every label has a row")
}

/// How well CNOT reproduces one printed row.
#[derive(Debug, Clone, Serialize)]
pub struct RowCheck {
    pub label: CaseLabel,
    /// |⟨printed|CNOT·input⟩|²
    pub fidelity: f64,
    /// Largest amplitude difference, printed phase included.
    pub amplitude_error: f64,
}

pub fn table1_check() -> Vec<RowCheck> {
    let u = cnot();
    table1()
        .iter()
        .map(|row| {
            let computed = u.mul_vec(row.input().amplitudes());
            let printed = row.output();
            let amplitude_error = computed
                .iter()
                .zip(printed.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            RowCheck {
                label: row.label,
                fidelity: qmat::vdot(printed.amplitudes(), &computed).norm_sqr(),
                amplitude_error,
            }
        })
        .collect()
}

/// Types a single-qubit channel by where it sends |Y₊⟩.
pub fn classify_optype(phi: &QuantumChannel) -> Result<OpType> {
    if phi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: phi.dim(),
        });
    }
    let sigma = phi.apply_matrix(&y_plus().projector());
    let fid = |k: &Ket| qmat::vdot(k.amplitudes(), &sigma.mul_vec(k.amplitudes())).re;
    Ok(if fid(&y_minus()) > TYPE_FIDELITY {
        OpType::F
    } else if fid(&y_plus()) > TYPE_FIDELITY {
        OpType::N
    } else {
        OpType::U
    })
}

/// The type a party's operation must have on this row, if the row constrains
/// it at all (only rows whose local input is |Y₊⟩ do).
fn required_type(input: &Ket, output: &Ket) -> Option<OpType> {
    if input.fidelity(&y_plus()) < EXACT_FIDELITY {
        return None;
    }
    if output.fidelity(&y_minus()) > EXACT_FIDELITY {
        Some(OpType::F)
    } else if output.fidelity(&y_plus()) > EXACT_FIDELITY {
        Some(OpType::N)
    } else {
        Some(OpType::U)
    }
}

fn row_allows(row: &TableRow, (ta, tb): TypePair) -> bool {
    let ok = |req: Option<OpType>, t: OpType| req.is_none_or(|r| r == t);
    ok(required_type(&row.input_a, &row.output_a), ta) && ok(required_type(&row.input_b, &row.output_b), tb)
}

/// Inputs compatible with Alice's and Bob's observed types. Empty only for
/// (U, U), which no correctly processed input allows.
pub fn table2_candidates(type_a: OpType, type_b: OpType) -> BTreeSet<CaseLabel> {
    table1()
        .iter()
        .filter(|row| row_allows(row, (type_a, type_b)))
        .map(|row| row.label)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const SEARCH_ORDER: [Pauli; 4] = [Pauli::I, Pauli::Z, Pauli::X, Pauli::Y];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => qmat::pauli_x(),
            Pauli::Y => qmat::pauli_y(),
            Pauli::Z => qmat::pauli_z(),
        }
    }
}

/// Local Paulis undoing the gate on both candidates of a definite type pair.
pub fn reset_paulis(type_a: OpType, type_b: OpType) -> Result<(Pauli, Pauli)> {
    if !type_a.is_definite() || !type_b.is_definite() {
        return Err(Error::UndeterminedType);
    }
    let rows: Vec<TableRow> = table2_candidates(type_a, type_b).into_iter().map(table_row).collect();
    let fits = |p: Pauli, pick: fn(&TableRow) -> (&Ket, &Ket)| {
        let m = p.matrix();
        rows.iter().all(|row| {
            let (out, inp) = pick(row);
            out.apply(&m).is_ok_and(|k| k.fidelity(inp) >= EXACT_FIDELITY)
        })
    };
    let pa = Pauli::SEARCH_ORDER
        .into_iter()
        .find(|&p| fits(p, |r| (&r.output_a, &r.input_a)));
    let pb = Pauli::SEARCH_ORDER
        .into_iter()
        .find(|&p| fits(p, |r| (&r.output_b, &r.input_b)));
    match (pa, pb) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::Numerical(format!("no Pauli reset for ({type_a}, {type_b})"))),
    }
}

pub fn reset_unitaries(type_a: OpType, type_b: OpType) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (a, b) = reset_paulis(type_a, type_b)?;
    Ok((a.matrix(), b.matrix()))
}

/// The "gate design": how often each type pair occurs.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeSampler {
    Deterministic(TypePair),
    /// Uniform over the definite pairs whose candidates include the input.
    UniformConsistent,
    Custom(Vec<(TypePair, f64)>),
}

impl TypeSampler {
    fn support(&self, true_input: CaseLabel) -> Result<(Vec<TypePair>, Option<WeightedIndex<f64>>)> {
        match self {
            Self::Deterministic(pair) => Ok((vec![*pair], None)),
            Self::UniformConsistent => Ok((consistent_pairs(true_input), None)),
            Self::Custom(entries) => {
                let pairs = entries.iter().map(|(p, _)| *p).collect();
                let dist = WeightedIndex::new(entries.iter().map(|(_, w)| *w))
                    .map_err(|e| Error::InvalidArgument(format!("custom sampler weights: {e}")))?;
                Ok((pairs, Some(dist)))
            }
        }
    }
}

/// Definite type pairs (F/N on both sides) that keep `label` a candidate.
pub fn consistent_pairs(label: CaseLabel) -> Vec<TypePair> {
    let definite = [OpType::F, OpType::N];
    definite
        .iter()
        .flat_map(|&a| definite.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| table2_candidates(a, b).contains(&label))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub type_a: OpType,
    pub type_b: OpType,
    pub candidates_before: BTreeSet<CaseLabel>,
    pub candidates_after: BTreeSet<CaseLabel>,
    /// Local Paulis (Alice, Bob) applied to undo the gate, when both types are definite.
    pub reset_applied: Option<(Pauli, Pauli)>,
    /// Whether the reset returned the true input (fidelity ≥ 1 − 1e-12).
    pub input_restored: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationRun {
    pub true_input: CaseLabel,
    /// The unique remaining candidate, or `None` if still ambiguous.
    pub identified: Option<CaseLabel>,
    pub candidates: BTreeSet<CaseLabel>,
    pub rounds: usize,
    pub log: Vec<RoundLog>,
}

/// Repeated uses of the gate on fresh copies of `true_input`, narrowing the
/// candidate set with each observed type pair.
pub fn discrimination_run(
    true_input: CaseLabel,
    sampler: &TypeSampler,
    max_rounds: usize,
    seed: u64,
) -> Result<DiscriminationRun> {
    run_on_stream(true_input, sampler, max_rounds, seed, 0)
}

fn run_on_stream(
    true_input: CaseLabel,
    sampler: &TypeSampler,
    max_rounds: usize,
    seed: u64,
    stream: u64,
) -> Result<DiscriminationRun> {
    if max_rounds == 0 {
        return Err(Error::InvalidArgument("max_rounds must be at least 1".into()));
    }
    let (pairs, weights) = sampler.support(true_input)?;
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no type pair is consistent with input {true_input}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let row = table_row(true_input);
    let mut candidates: BTreeSet<CaseLabel> = CaseLabel::ALL.into_iter().collect();
    let mut log = Vec::new();
    for round in 1..=max_rounds {
        let (type_a, type_b) = match (&weights, pairs.len()) {
            (Some(dist), _) => pairs[dist.sample(&mut rng)],
            (None, 1) => pairs[0],
            (None, n) => pairs[rng.random_range(0..n)],
        };
        let cell = table2_candidates(type_a, type_b);
        if !cell.contains(&true_input) {
            return Err(Error::InconsistentSampler {
                alice: type_a.to_string(),
                bob: type_b.to_string(),
                input: true_input.to_string(),
            });
        }
        let before = candidates.clone();
        candidates = candidates.intersection(&cell).copied().collect();

        let reset_applied = reset_paulis(type_a, type_b).ok();
        let input_restored = reset_applied.map(|(pa, pb)| {
            let u = qmat::tensor_product(&pa.matrix(), &pb.matrix());
            row.output()
                .apply(&u)
                .is_ok_and(|k| k.fidelity(&row.input()) >= EXACT_FIDELITY)
        });
        log.push(RoundLog {
            round,
            type_a,
            type_b,
            candidates_before: before,
            candidates_after: candidates.clone(),
            reset_applied,
            input_restored,
        });
        if candidates.len() == 1 {
            break;
        }
    }
    Ok(DiscriminationRun {
        true_input,
        identified: (candidates.len() == 1).then(|| *candidates.first().expect("one element")),
        candidates,
        rounds: log.len(),
        log,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloSummary {
    pub runs: usize,
    pub max_rounds: usize,
    pub identified: usize,
    pub misidentified: usize,
    pub identification_rate: f64,
    /// Mean rounds used by runs that identified the input.
    pub mean_rounds_to_identify: Option<f64>,
    /// `rounds_histogram[k]` counts runs identified after k + 1 rounds.
    pub rounds_histogram: Vec<usize>,
    /// Union of final candidate sets over ambiguous runs.
    pub ambiguous_candidates: BTreeSet<CaseLabel>,
}

/// `runs` independent discrimination runs; run k uses stream k of `seed`.
pub fn monte_carlo(
    true_input: CaseLabel,
    sampler: &TypeSampler,
    runs: usize,
    max_rounds: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if runs == 0 {
        return Err(Error::InvalidArgument("at least one run is required".into()));
    }
    let results = (0..runs as u64)
        .into_par_iter()
        .map(|k| run_on_stream(true_input, sampler, max_rounds, seed, k))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = MonteCarloSummary {
        runs,
        max_rounds,
        identified: 0,
        misidentified: 0,
        identification_rate: 0.0,
        mean_rounds_to_identify: None,
        rounds_histogram: vec![0; max_rounds],
        ambiguous_candidates: BTreeSet::new(),
    };
    let mut total_rounds = 0;
    for run in &results {
        match run.identified {
            Some(l) if l == true_input => {
                summary.identified += 1;
                summary.rounds_histogram[run.rounds - 1] += 1;
                total_rounds += run.rounds;
            }
            Some(_) => summary.misidentified += 1,
            None => summary.ambiguous_candidates.extend(run.candidates.iter().copied()),
        }
    }
    summary.identification_rate = summary.identified as f64 / runs as f64;
    if summary.identified > 0 {
        summary.mean_rounds_to_identify = Some(total_rounds as f64 / summary.identified as f64);
    }
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapEntry {
    pub first: CaseLabel,
    pub second: CaseLabel,
    pub modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Entry {
    pub type_a: OpType,
    pub type_b: OpType,
    pub candidates: BTreeSet<CaseLabel>,
    /// False when no correctly processed input produces this pair.
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContradictionReport {
    pub overlaps: Vec<OverlapEntry>,
    pub table2: Vec<Table2Entry>,
    pub statements: Vec<String>,
}

pub fn table2_map() -> Vec<Table2Entry> {
    OpType::ALL
        .iter()
        .flat_map(|&a| OpType::ALL.iter().map(move |&b| (a, b)))
        .map(|(type_a, type_b)| {
            let candidates = table2_candidates(type_a, type_b);
            Table2Entry {
                type_a,
                type_b,
                consistent: !candidates.is_empty(),
                candidates,
            }
        })
        .collect()
}

pub fn overlap_table() -> Vec<OverlapEntry> {
    let rows = table1();
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        for s in &rows[i + 1..] {
            let modulus = overlap(&r.input(), &s.input()).expect("equal dims").norm();
            out.push(OverlapEntry {
                first: r.label,
                second: s.label,
                modulus,
            });
        }
    }
    out
}

/// Why LOCC access to CNOT on these inputs would be too powerful.
pub fn single_copy_contradiction_report() -> ContradictionReport {
    let overlaps = overlap_table();
    let non_orthogonal: Vec<String> = overlaps
        .iter()
        .filter(|e| e.modulus > 1e-12)
        .map(|e| format!("{}{}", e.first, e.second))
        .collect();
    let statements = vec![
        format!(
            "non-orthogonal input pairs: {} (each with overlap modulus {:.6})",
            non_orthogonal.join(", "),
            overlaps.iter().map(|e| e.modulus).fold(0.0, f64::max)
        ),
        "each definite type pair leaves exactly two candidate inputs".into(),
        "a type pair containing U leaves exactly one candidate; (U, U) leaves none".into(),
        "seeing two different definite type pairs identifies the input from a single copy, \
         since the local resets return that copy unchanged"
            .into(),
        "no measurement unambiguously distinguishes non-orthogonal states from one copy, \
         so CNOT on this set is not implementable by LOCC without entanglement"
            .into(),
    ];
    ContradictionReport {
        overlaps,
        table2: table2_map(),
        statements,
    }
}
