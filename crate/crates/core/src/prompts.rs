//! Zero-shot and few-shot prompt texts for both tasks, and conclusion-polarity
//! twins for the faithfulness measure.

use crate::instantiate::{ArgumentInstance, NegativeStrategy};
use crate::logic::SchemeId;
use crate::templates::{wrap_conclusion, ConclusionWrapper};
use crate::Label;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

const CONTEXT: &str = "Suppose you are a specialist with existing knowledge about a signaling and metabolic molecules and their relations organized into biological pathways and processes.";
const INSTRUCTIONS: &str = "Given premises marked with the letter P and the following number and the conclusion marked with the letter C, determine whether the conclusion logically follows from these premises.";
const RELEVANCE: &str = "If the conclusion logically follows from the premises, you need to return 'True'. If the conclusion does not follow logically from the premises, you need to return 'False'.";
const SELECTION: &str = "Specify the premises you used to determine whether the conclusion logically follows from the premises, and only these premises.";
const CONSTRAINT_T1: &str = "The output should be a single word <True> or <False>.";
const CONSTRAINT_T2: &str = "The output should be a single word <True> or <False> and the numbers of the selected premises after the decimal point, like <True, P1, P2>.";
const ANSWER_PREFIX: &str = "The correct answer is: ";

#[derive(Clone, Copy)]
struct Demo {
    premises: &'static [&'static str],
    conclusion: &'static str,
    /// `None` for the final demonstration, which is shown without an answer.
    answer: Option<&'static str>,
}

const DEMOS_T1: [Demo; 5] = [
    Demo {
        premises: &[
            "Every member of Diseases of hemostasis pathway is a member of Disease pathway",
            "Gene GP1BB is a member of Diseases of hemostasis pathway",
        ],
        conclusion: "Gene GP1BB is a member of Disease pathway",
        answer: Some("True"),
    },
    Demo {
        premises: &[
            "Every member of Infectious disease pathway is a member of Disease pathway",
            "Gene PKQQ is a member of Infectious disease pathway",
        ],
        conclusion: "Gene PKQQ is a member of Infectious disease pathway",
        answer: Some("True"),
    },
    Demo {
        premises: &[
            "Every member of SLC transporter disorders pathway is a member of Disorders of transmembrane transporters pathway",
            "Gene AXZY is a member of SLC transporter disorders pathway",
        ],
        conclusion: "Gene AXZY is not a member of Disorders of transmembrane transporters pathway",
        answer: Some("False"),
    },
    Demo {
        premises: &[
            "Every member of HIV Life Cycle pathway is a member of HIV Infection pathway",
            "Gene MLLX is a member of HIV Life Cycle pathway",
        ],
        conclusion: "Gene MLLW is a member of HIV Infection pathway",
        answer: Some("False"),
    },
    Demo {
        premises: &[
            "Every member of ABC transporter disorders pathway is a member of Disorders of transmembrane transporters pathway",
            "Gene PSMC5 is a member of ABC transporter disorders pathway",
        ],
        conclusion: "It is true that Gene PSMC5 is a member of Disorders of transmembrane transporters pathway",
        answer: None,
    },
];

const DEMOS_T2: [Demo; 5] = [
    Demo {
        premises: &[
            "Every member of Diseases of hemostasis pathway is a member of Disease pathway",
            "Every member of NS1 Mediated Effects on Host Pathways pathway is a member of Influenza Infection pathway",
            "Gene AABC is a member of Diseases of hemostasis pathway",
        ],
        conclusion: "Gene AABC is a member of Disease pathway",
        answer: Some("True, P1, P3"),
    },
    Demo {
        premises: &[
            "Every member of SARS-CoV Infections pathway is a member of Viral Infection Pathways pathway",
            "Every member of Infectious disease pathway is a member of Disease pathway",
            "Gene PKQQ is a member of Infectious disease pathway",
        ],
        conclusion: "Gene PKQQ is a member of Infectious disease pathway",
        answer: Some("True, P2, P3"),
    },
    DEMOS_T1[2],
    DEMOS_T1[3],
    DEMOS_T1[4],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Task 1: label only.
    Entailment,
    /// Task 2: label and supporting premises.
    PremiseSelection,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::Entailment, Task::PremiseSelection];

    pub fn number(self) -> u8 {
        match self {
            Task::Entailment => 1,
            Task::PremiseSelection => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.number() == n)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ZeroShot,
    FewShot,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::ZeroShot, Mode::FewShot];

    pub fn key(self) -> &'static str {
        match self {
            Mode::ZeroShot => "zs",
            Mode::FewShot => "fs",
        }
    }

    pub fn from_key(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.key() == s.to_ascii_lowercase())
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Gold answer; premise numbers are 1-based as shown in the prompt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub label: Label,
    pub premises: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwinRole {
    AssertTrue,
    AssertFalse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub schema_version: u32,
    pub prompt_id: String,
    pub instance_id: String,
    pub task: Task,
    pub mode: Mode,
    pub text: String,
    pub twin_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin_role: Option<TwinRole>,
    pub expected: Expected,
    pub n_premises: usize,
    pub scheme: SchemeId,
    pub n_distractors: usize,
    pub negative_strategy: NegativeStrategy,
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("instance {0} already has a wrapped conclusion")]
    AlreadyWrapped(String),
    #[error("faithfulness twins are built from positive instances; {0} is negative")]
    NotPositive(String),
}

fn preamble(task: Task, mode: Mode) -> String {
    let constraint = match task {
        Task::Entailment => CONSTRAINT_T1,
        Task::PremiseSelection => CONSTRAINT_T2,
    };
    let relevance = match task {
        Task::Entailment => RELEVANCE.to_string(),
        Task::PremiseSelection => format!("{RELEVANCE} {SELECTION}"),
    };
    match mode {
        Mode::ZeroShot => format!("{CONTEXT} {INSTRUCTIONS} {relevance} {constraint}"),
        Mode::FewShot => {
            let demos = match task {
                Task::Entailment => &DEMOS_T1,
                Task::PremiseSelection => &DEMOS_T2,
            };
            let header = format!(
                "Context: {CONTEXT}\nInstructions: {INSTRUCTIONS}\nRelevance: {relevance}\nConstraint: {constraint}\nDemonstration:"
            );
            let blocks: Vec<String> = demos
                .iter()
                .map(|d| {
                    let mut block = argument_block(d.premises.iter().copied(), d.conclusion);
                    if let Some(a) = d.answer {
                        block.push_str(&format!("\n\n{ANSWER_PREFIX}{a}"));
                    }
                    block
                })
                .collect();
            format!("{header}\n\n{}", blocks.join("\n\n"))
        }
    }
}

/// The fixed text that precedes the query argument.
pub fn prompt_prefix(task: Task, mode: Mode) -> String {
    format!("{}\n\n", preamble(task, mode))
}

/// `P<k>: ` lines followed by the `C:` line, blank-line separated.
pub fn argument_block<'a>(premises: impl IntoIterator<Item = &'a str>, conclusion: &str) -> String {
    let mut lines: Vec<String> = premises.into_iter().enumerate().map(|(i, p)| format!("P{}: {p}", i + 1)).collect();
    lines.push(format!("C:{conclusion}"));
    lines.join("\n\n")
}

fn one_based(gold: &[usize]) -> Vec<usize> {
    gold.iter().map(|i| i + 1).collect()
}

fn prompt_id(inst: &ArgumentInstance, task: Task, mode: Mode, role: Option<TwinRole>) -> String {
    let base = format!("{}:{task}:{mode}", inst.instance_id);
    match role {
        None => base,
        Some(TwinRole::AssertTrue) => format!("{base}:twin-true"),
        Some(TwinRole::AssertFalse) => format!("{base}:twin-false"),
    }
}

fn record(inst: &ArgumentInstance, task: Task, mode: Mode, conclusion: &str, expected: Expected, role: Option<TwinRole>) -> PromptRecord {
    let text = prompt_prefix(task, mode) + &argument_block(inst.premises.iter().map(|p| p.text.as_str()), conclusion);
    PromptRecord {
        schema_version: SCHEMA_VERSION,
        prompt_id: prompt_id(inst, task, mode, role),
        instance_id: inst.instance_id.clone(),
        task,
        mode,
        text,
        twin_id: None,
        twin_role: role,
        expected,
        n_premises: inst.premises.len(),
        scheme: inst.scheme,
        n_distractors: inst.perturbation.n_distractors,
        negative_strategy: inst.negative_strategy,
    }
}

fn expected(inst: &ArgumentInstance) -> Expected {
    Expected {
        label: inst.gold_label,
        premises: one_based(&inst.gold_premises),
    }
}

pub fn build_zs_prompt(inst: &ArgumentInstance, task: Task) -> PromptRecord {
    record(inst, task, Mode::ZeroShot, &inst.conclusion.text, expected(inst), None)
}

pub fn build_fs_prompt(inst: &ArgumentInstance, task: Task) -> PromptRecord {
    record(inst, task, Mode::FewShot, &inst.conclusion.text, expected(inst), None)
}

pub fn build_prompt(inst: &ArgumentInstance, task: Task, mode: Mode) -> PromptRecord {
    match mode {
        Mode::ZeroShot => build_zs_prompt(inst, task),
        Mode::FewShot => build_fs_prompt(inst, task),
    }
}

/// Two prompts differing only in the conclusion's "It is true/false that"
/// wrapper; the false twin's expected label is the complement, with no
/// supporting premises.
pub fn build_faithfulness_pair(inst: &ArgumentInstance, task: Task, mode: Mode) -> Result<(PromptRecord, PromptRecord), PromptError> {
    if inst.conclusion.wrapper != ConclusionWrapper::None {
        return Err(PromptError::AlreadyWrapped(inst.instance_id.clone()));
    }
    if !inst.gold_label.is_true() {
        return Err(PromptError::NotPositive(inst.instance_id.clone()));
    }
    let sentence = &inst.conclusion.sentence;
    let mut a = record(
        inst,
        task,
        mode,
        &wrap_conclusion(sentence, ConclusionWrapper::AssertTrue),
        expected(inst),
        Some(TwinRole::AssertTrue),
    );
    let mut b = record(
        inst,
        task,
        mode,
        &wrap_conclusion(sentence, ConclusionWrapper::AssertFalse),
        Expected {
            label: Label::False,
            premises: Vec::new(),
        },
        Some(TwinRole::AssertFalse),
    );
    a.twin_id = Some(b.prompt_id.clone());
    b.twin_id = Some(a.prompt_id.clone());
    Ok((a, b))
}

/// One prompt per instance and (task, mode), plus a twin pair per positive
/// instance when `faithfulness` is set. Order: instance, task, mode.
pub fn build_prompts(instances: &[ArgumentInstance], tasks: &[Task], modes: &[Mode], faithfulness: bool) -> Vec<PromptRecord> {
    let mut out = Vec::new();
    for inst in instances {
        for &task in tasks {
            for &mode in modes {
                out.push(build_prompt(inst, task, mode));
                if faithfulness && inst.gold_label.is_true() && inst.conclusion.wrapper == ConclusionWrapper::None {
                    let (a, b) = build_faithfulness_pair(inst, task, mode).expect("checked preconditions");
                    out.push(a);
                    out.push(b);
                }
            }
        }
    }
    out
}
