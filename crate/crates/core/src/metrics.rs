//! Scoring: response-type fractions, accuracy / precision / recall / F1,
//! reasoning accuracy and faithfulness, grouped into report rows.
//!
//! Every prompt counts in the denominators. A response that does not follow
//! the instruction is wrong and, by default, is not a prediction of either
//! class. The positive class is `True`.

use crate::parse::{ParsedResponse, ResponseClass};
use crate::prompts::{Expected, Mode, PromptRecord, Task, TwinRole};
use crate::Label;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const ALL: &str = "all";

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("response {0} has no matching prompt")]
    UnknownPrompt(String),
    #[error("prompt {0} has no response")]
    MissingResponse(String),
    #[error("duplicate response for prompt {0}")]
    DuplicateResponse(String),
    #[error("twin prompt {0} has no partner")]
    UnpairedTwin(String),
    #[error("no rows to report")]
    NoRows,
}

/// How a non-compliant response enters the accuracy count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnparsedPolicy {
    /// Always wrong, never a prediction.
    #[default]
    Incorrect,
    /// Read as a `False` prediction. With `True` as the positive class this
    /// leaves precision and recall unchanged and can only raise accuracy.
    PredictedFalse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionScores {
    pub n: usize,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn predicted(r: &ParsedResponse, policy: UnparsedPolicy) -> Option<Label> {
    match (r.class, policy) {
        (ResponseClass::FollowingInstruction, _) => r.label,
        (_, UnparsedPolicy::PredictedFalse) => Some(Label::False),
        (_, UnparsedPolicy::Incorrect) => None,
    }
}

fn aligned<'a, 'g>(
    parsed: &'a [ParsedResponse],
    gold: &'g BTreeMap<String, Expected>,
) -> Result<Vec<(&'a ParsedResponse, &'g Expected)>, MetricsError> {
    let mut seen = HashMap::new();
    let mut out = Vec::with_capacity(parsed.len());
    for r in parsed {
        let g = gold.get(&r.prompt_id).ok_or_else(|| MetricsError::UnknownPrompt(r.prompt_id.clone()))?;
        if seen.insert(r.prompt_id.as_str(), ()).is_some() {
            return Err(MetricsError::DuplicateResponse(r.prompt_id.clone()));
        }
        out.push((r, g));
    }
    if let Some(id) = gold.keys().find(|k| !seen.contains_key(k.as_str())) {
        return Err(MetricsError::MissingResponse(id.clone()));
    }
    Ok(out)
}

fn confusion_of(items: &[(&ParsedResponse, &Expected)], policy: UnparsedPolicy) -> ConfusionScores {
    let (mut correct, mut tp, mut fp, mut fn_) = (0, 0, 0, 0);
    for (r, g) in items {
        let p = predicted(r, policy);
        if p == Some(g.label) {
            correct += 1;
        }
        match (p, g.label) {
            (Some(Label::True), Label::True) => tp += 1,
            (Some(Label::True), Label::False) => fp += 1,
            (_, Label::True) => fn_ += 1,
            _ => {}
        }
    }
    let n = items.len();
    ConfusionScores {
        n,
        accuracy: ratio(correct, n).unwrap_or(0.0),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
    }
}

fn ra_of(items: &[(&ParsedResponse, &Expected)]) -> Option<f64> {
    let hits = items
        .iter()
        .filter(|(r, g)| {
            r.class == ResponseClass::FollowingInstruction
                && r.label == Some(g.label)
                && r.premises.as_deref() == Some(g.premises.as_slice())
        })
        .count();
    ratio(hits, items.len())
}

fn faithful(x: &ParsedResponse, y: &ParsedResponse) -> bool {
    let ok = |r: &ParsedResponse| r.class == ResponseClass::FollowingInstruction;
    ok(x) && ok(y) && x.label != y.label
}

/// Accuracy, precision, recall and F1 against gold labels keyed by prompt id.
pub fn confusion_scores(
    parsed: &[ParsedResponse],
    gold: &BTreeMap<String, Expected>,
    policy: UnparsedPolicy,
) -> Result<ConfusionScores, MetricsError> {
    Ok(confusion_of(&aligned(parsed, gold)?, policy))
}

/// Share of responses with the right label and exactly the gold premises.
pub fn reasoning_accuracy(parsed: &[ParsedResponse], gold: &BTreeMap<String, Expected>) -> Result<Option<f64>, MetricsError> {
    Ok(ra_of(&aligned(parsed, gold)?))
}

/// Share of twin pairs whose predictions differ, both responses following
/// the instruction.
pub fn faithfulness(pairs: &[(ParsedResponse, ParsedResponse)]) -> Option<f64> {
    ratio(pairs.iter().filter(|(x, y)| faithful(x, y)).count(), pairs.len())
}

/// Joins twin responses through the prompts' `twin_id`, true twin first.
pub fn pair_twins(prompts: &[PromptRecord], parsed: &[ParsedResponse]) -> Result<Vec<(ParsedResponse, ParsedResponse)>, MetricsError> {
    let by_id: HashMap<&str, &ParsedResponse> = parsed.iter().map(|r| (r.prompt_id.as_str(), r)).collect();
    let prompt_ids: HashMap<&str, &PromptRecord> = prompts.iter().map(|p| (p.prompt_id.as_str(), p)).collect();
    let mut out = Vec::new();
    for p in prompts.iter().filter(|p| p.twin_role == Some(TwinRole::AssertTrue)) {
        let twin = p.twin_id.as_deref().ok_or_else(|| MetricsError::UnpairedTwin(p.prompt_id.clone()))?;
        let partner = prompt_ids.get(twin).ok_or_else(|| MetricsError::UnpairedTwin(p.prompt_id.clone()))?;
        if partner.twin_id.as_deref() != Some(p.prompt_id.as_str()) {
            return Err(MetricsError::UnpairedTwin(twin.to_string()));
        }
        let x = by_id.get(p.prompt_id.as_str()).ok_or_else(|| MetricsError::MissingResponse(p.prompt_id.clone()))?;
        let y = by_id.get(twin).ok_or_else(|| MetricsError::MissingResponse(twin.to_string()))?;
        out.push(((*x).clone(), (*y).clone()));
    }
    for p in prompts.iter().filter(|p| p.twin_role == Some(TwinRole::AssertFalse)) {
        let back = p.twin_id.as_deref().and_then(|t| prompt_ids.get(t));
        if back.is_none_or(|b| b.twin_role != Some(TwinRole::AssertTrue)) {
            return Err(MetricsError::UnpairedTwin(p.prompt_id.clone()));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub model: String,
    pub task: Task,
    pub mode: Mode,
    pub scheme: String,
    pub variant: String,
    pub n_distractors: String,
    pub n: usize,
    pub non_empty: f64,
    pub irrelevant: f64,
    pub cot_like: f64,
    pub following: f64,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub reasoning_accuracy: Option<f64>,
    pub n_pairs: usize,
    pub faithfulness: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub unparsed: UnparsedPolicy,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct GroupKey {
    task: Task,
    mode: Mode,
    grouping: u8,
    scheme: String,
    variant: String,
    n_distractors: String,
}

#[derive(Default)]
struct Bucket<'a> {
    items: Vec<(&'a ParsedResponse, &'a Expected)>,
    pairs: Vec<(&'a ParsedResponse, &'a ParsedResponse)>,
}

fn group_keys(p: &PromptRecord) -> Vec<GroupKey> {
    let base = p.scheme.base.key().to_string();
    let variant = p.scheme.variant.key().to_string();
    let nd = p.n_distractors.to_string();
    let all = || ALL.to_string();
    let key = |grouping: u8, scheme: String, variant: String, n_distractors: String| GroupKey {
        task: p.task,
        mode: p.mode,
        grouping,
        scheme,
        variant,
        n_distractors,
    };
    vec![
        key(0, all(), all(), all()),
        key(1, base.clone(), all(), all()),
        key(2, all(), variant.clone(), all()),
        key(3, base.clone(), variant, all()),
        key(4, all(), all(), nd.clone()),
        key(5, base, all(), nd),
    ]
}

/// Report rows for one model: overall, per scheme, per variant, per scheme
/// and variant, per distractor count, per scheme and distractor count; each
/// within (task, mode). Twin prompts feed only the faithfulness columns.
pub fn evaluate(model: &str, prompts: &[PromptRecord], parsed: &[ParsedResponse], cfg: &ScoreConfig) -> Result<Vec<EvalRow>, MetricsError> {
    let gold: BTreeMap<String, Expected> = prompts.iter().map(|p| (p.prompt_id.clone(), p.expected.clone())).collect();
    let items = aligned(parsed, &gold)?;
    let by_prompt: HashMap<&str, &PromptRecord> = prompts.iter().map(|p| (p.prompt_id.as_str(), p)).collect();
    let by_response: HashMap<&str, &ParsedResponse> = parsed.iter().map(|r| (r.prompt_id.as_str(), r)).collect();
    pair_twins(prompts, parsed)?;

    let mut buckets: BTreeMap<GroupKey, Bucket> = BTreeMap::new();
    for (r, g) in &items {
        let p = by_prompt[r.prompt_id.as_str()];
        match p.twin_role {
            None => {
                for k in group_keys(p) {
                    buckets.entry(k).or_default().items.push((r, g));
                }
            }
            Some(TwinRole::AssertTrue) => {
                let y = by_response[p.twin_id.as_deref().expect("paired")];
                for k in group_keys(p) {
                    buckets.entry(k).or_default().pairs.push((r, y));
                }
            }
            Some(TwinRole::AssertFalse) => {}
        }
    }

    let mut rows = Vec::new();
    for (k, b) in buckets {
        if b.items.is_empty() {
            continue;
        }
        let n = b.items.len();
        let count = |class: ResponseClass| b.items.iter().filter(|(r, _)| r.class == class).count();
        let conf = confusion_of(&b.items, cfg.unparsed);
        rows.push(EvalRow {
            model: model.to_string(),
            task: k.task,
            mode: k.mode,
            scheme: k.scheme,
            variant: k.variant,
            n_distractors: k.n_distractors,
            n,
            non_empty: 1.0 - count(ResponseClass::Empty) as f64 / n as f64,
            irrelevant: count(ResponseClass::Irrelevant) as f64 / n as f64,
            cot_like: b.items.iter().filter(|(r, _)| r.cot_like).count() as f64 / n as f64,
            following: count(ResponseClass::FollowingInstruction) as f64 / n as f64,
            accuracy: conf.accuracy,
            precision: conf.precision,
            recall: conf.recall,
            f1: conf.f1,
            reasoning_accuracy: match k.task {
                Task::Entailment => None,
                Task::PremiseSelection => ra_of(&b.items),
            },
            n_pairs: b.pairs.len(),
            faithfulness: ratio(b.pairs.iter().filter(|(x, y)| faithful(x, y)).count(), b.pairs.len()),
        });
    }
    Ok(rows)
}

pub const CSV_COLUMNS: [&str; 18] = [
    "model",
    "task",
    "mode",
    "scheme",
    "variant",
    "n_distractors",
    "n",
    "non_empty",
    "irrelevant",
    "cot_like",
    "following",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "reasoning_accuracy",
    "n_pairs",
    "faithfulness",
];

/// Fixed four-decimal rendering; undefined cells are "-".
pub fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn csv_fields(r: &EvalRow) -> Vec<String> {
    vec![
        r.model.clone(),
        r.task.to_string(),
        r.mode.to_string(),
        r.scheme.clone(),
        r.variant.clone(),
        r.n_distractors.clone(),
        r.n.to_string(),
        cell(Some(r.non_empty)),
        cell(Some(r.irrelevant)),
        cell(Some(r.cot_like)),
        cell(Some(r.following)),
        cell(Some(r.accuracy)),
        cell(r.precision),
        cell(r.recall),
        cell(r.f1),
        cell(r.reasoning_accuracy),
        r.n_pairs.to_string(),
        cell(r.faithfulness),
    ]
}

pub fn rows_to_csv(rows: &[EvalRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(csv_fields(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Overall rows as an aligned text table.
pub fn summary_table(rows: &[EvalRow]) -> String {
    let header = ["model", "task", "mode", "n", "non_empty", "irrelevant", "following", "accuracy", "precision", "recall", "f1", "RA", "faithfulness"];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in rows.iter().filter(|r| r.scheme == ALL && r.variant == ALL && r.n_distractors == ALL) {
        table.push(vec![
            r.model.clone(),
            r.task.to_string(),
            r.mode.to_string(),
            r.n.to_string(),
            cell(Some(r.non_empty)),
            cell(Some(r.irrelevant)),
            cell(Some(r.following)),
            cell(Some(r.accuracy)),
            cell(r.precision),
            cell(r.recall),
            cell(r.f1),
            cell(r.reasoning_accuracy),
            cell(r.faithfulness),
        ]);
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: PathBuf,
}

/// Writes `report.csv`, `report.json` and `summary.txt` into `dir`.
pub fn emit_report(rows: &[EvalRow], dir: &Path) -> Result<ReportFiles, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Metrics(MetricsError::NoRows));
    }
    std::fs::create_dir_all(dir)?;
    let files = ReportFiles {
        csv: dir.join("report.csv"),
        json: dir.join("report.json"),
        summary: dir.join("summary.txt"),
    };
    std::fs::write(&files.csv, rows_to_csv(rows))?;
    let mut json = serde_json::to_string_pretty(rows).expect("rows serialize");
    json.push('\n');
    std::fs::write(&files.json, json)?;
    std::fs::write(&files.summary, summary_table(rows))?;
    Ok(files)
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("cannot write report: {0}")]
    Io(#[from] io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(id: &str, class: ResponseClass, label: Option<Label>, premises: Option<Vec<usize>>) -> ParsedResponse {
        ParsedResponse {
            prompt_id: id.into(),
            class,
            cot_like: false,
            label,
            premises,
        }
    }

    fn follow(id: &str, l: Label) -> ParsedResponse {
        resp(id, ResponseClass::FollowingInstruction, Some(l), None)
    }

    fn gold(labels: &[Label]) -> BTreeMap<String, Expected> {
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                (
                    format!("p{i}"),
                    Expected {
                        label: l,
                        premises: vec![],
                    },
                )
            })
            .collect()
    }

    #[test]
    fn all_empty_scores_zero() {
        let g = gold(&[Label::True, Label::False]);
        let r = vec![resp("p0", ResponseClass::Empty, None, None), resp("p1", ResponseClass::Empty, None, None)];
        let c = confusion_scores(&r, &g, UnparsedPolicy::Incorrect).unwrap();
        assert_eq!(c.accuracy, 0.0);
        assert_eq!(c.f1, Some(0.0));
        assert_eq!(c.precision, None);
    }

    #[test]
    fn id_mismatch_is_an_error() {
        let g = gold(&[Label::True]);
        assert!(matches!(
            confusion_scores(&[follow("zz", Label::True)], &g, UnparsedPolicy::Incorrect),
            Err(MetricsError::UnknownPrompt(_))
        ));
        assert!(matches!(confusion_scores(&[], &g, UnparsedPolicy::Incorrect), Err(MetricsError::MissingResponse(_))));
    }

    #[test]
    fn policy_only_moves_accuracy() {
        let g = gold(&[Label::False, Label::True]);
        let r = vec![resp("p0", ResponseClass::Irrelevant, None, None), follow("p1", Label::True)];
        let a = confusion_scores(&r, &g, UnparsedPolicy::Incorrect).unwrap();
        let b = confusion_scores(&r, &g, UnparsedPolicy::PredictedFalse).unwrap();
        assert_eq!((a.accuracy, b.accuracy), (0.5, 1.0));
        assert_eq!((a.precision, a.recall), (b.precision, b.recall));
    }

    #[test]
    fn cells_render_dashes() {
        assert_eq!(cell(None), "-");
        assert_eq!(cell(Some(2.0 / 3.0)), "0.6667");
    }
}
