use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::config::ProtocolConfig;
use super::engine::{BlockBranch, BranchProbability};
use super::program::{BlockProgram, SlotKind};
use super::queries::QuerySet;
use crate::pauli::{LabelVector, WeylLabel};

/// Which protocol produced a transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Qspir,
    Qspir3,
    Classical,
}

/// One complete run: what was asked, what every party did, what the user got.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolTranscript {
    pub protocol: ProtocolKind,
    pub config: ProtocolConfig,
    pub queries: QuerySet,
    /// `H_t` for each server.
    pub answers: Vec<LabelVector>,
    /// `G_2..G_{N-1}` per block.
    pub middle_outcomes: Vec<Vec<WeylLabel>>,
    /// Two-sum readouts per block, one per server pair.
    pub two_sum_outputs: Vec<Vec<WeylLabel>>,
    /// Classical messages per block, by register name.
    pub classical_messages: Vec<BTreeMap<String, WeylLabel>>,
    /// The user's Weyl correction per block; `null` when skipped.
    pub user_corrections: Vec<Option<WeylLabel>>,
    /// `Ŵ_K`.
    pub outcome: LabelVector,
    pub uploaded_bits: u64,
    pub downloaded_qubits: u64,
    pub downloaded_cbits: u64,
    pub download_qubit_equivalents: u64,
    #[serde(serialize_with = "decimal_string")]
    pub branch_probability: f64,
    #[serde(serialize_with = "optional_ratio")]
    pub branch_probability_exact: Option<BigRational>,
}

fn decimal_string<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn optional_ratio<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl ProtocolTranscript {
    pub fn is_correct(&self) -> bool {
        self.outcome == *self.config.target()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transcripts always serialize")
    }

    /// Builds a transcript from one branch per block.
    pub(crate) fn assemble(
        protocol: ProtocolKind,
        config: &ProtocolConfig,
        queries: &QuerySet,
        answers: &[LabelVector],
        programs: &[BlockProgram],
        branches: &[&BlockBranch],
    ) -> Self {
        let mut middle_outcomes = Vec::new();
        let mut two_sum_outputs = Vec::new();
        let mut classical_messages = Vec::new();
        let mut user_corrections = Vec::new();
        let mut outcome = Vec::new();
        let mut probability = BranchProbability::ONE;
        for (program, branch) in programs.iter().zip(branches) {
            let mut middle = Vec::new();
            let mut two_sum = Vec::new();
            let mut classical = BTreeMap::new();
            for (kind, &value) in program.slots.iter().zip(&branch.slots) {
                match kind {
                    SlotKind::Middle(_) => middle.push(value),
                    SlotKind::TwoSum(_) => two_sum.push(value),
                    SlotKind::Classical(name) => {
                        classical.insert(name.clone(), value);
                    }
                    SlotKind::Output => {}
                }
            }
            middle_outcomes.push(middle);
            two_sum_outputs.push(two_sum);
            classical_messages.push(classical);
            user_corrections.push(branch.correction);
            outcome.push(branch.output);
            probability = probability.times(branch.probability);
        }
        let qubits: u64 = programs.iter().map(BlockProgram::downloaded_qubits).sum();
        let cbits: u64 = programs.iter().map(BlockProgram::downloaded_cbits).sum();
        ProtocolTranscript {
            protocol,
            config: config.clone(),
            queries: queries.clone(),
            answers: answers.to_vec(),
            middle_outcomes,
            two_sum_outputs,
            classical_messages,
            user_corrections,
            outcome: LabelVector::from_labels(&outcome),
            uploaded_bits: (config.n_servers * config.n_files) as u64,
            downloaded_qubits: qubits,
            downloaded_cbits: cbits,
            download_qubit_equivalents: qubits + cbits,
            branch_probability: probability.value,
            branch_probability_exact: probability.exact(),
        }
    }
}
