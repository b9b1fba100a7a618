//! Reading model outputs: response class, predicted label and premise set.
//!
//! A response follows the instruction when it opens with an answer head:
//! an optional "The correct answer is:" lead-in, an optionally angle-bracketed
//! True/False, and for premise selection a comma-separated `P<k>` list.
//! Anything after the head is ignored, unless the first line also contains
//! the opposite label.

use crate::prompts::{PromptRecord, Task};
use crate::Label;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::LazyLock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseClass {
    Empty,
    Irrelevant,
    FollowingInstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub prompt_id: String,
    pub class: ResponseClass,
    /// Step-by-step reasoning instead of an answer; only set on `Irrelevant`.
    pub cot_like: bool,
    pub label: Option<Label>,
    /// 1-based premise numbers, ascending; only for premise selection.
    pub premises: Option<Vec<usize>>,
}

static HEAD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"(?i)^[\s"'`*]*(?:the\s+correct\s+answer\s+is\s*:?\s*)?(<\s*)?(true|false)\b"#).expect("valid regex")
});
static PREMISE_LIST: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(?:\s*(?:,|\band\b)?\s*p\s*(\d+)\b)+").expect("valid regex"));
static PREMISE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)p\s*(\d+)").expect("valid regex"));
static ANSWER_IS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)the\s+correct\s+answer\s+is\s*:?\s*<?\s*(true|false)\b").expect("valid regex"));
static BRACKETED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)<\s*(true|false)\b").expect("valid regex"));
static BARE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(true|false)\b").expect("valid regex"));
static COT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)step[\s-]+by[\s-]+step|let'?s\s+(?:break|think|analy[sz]e|go\s+through|examine|look)|\bstep\s+\d|^\s*(?:first(?:ly)?|to\s+determine)\b|\bpremise\s+\d\s+(?:states|says)")
        .expect("valid regex")
});

fn to_label(s: &str) -> Label {
    Label::from_bool(s.eq_ignore_ascii_case("true"))
}

/// Scans for a label anywhere in the text. "The correct answer is: X" wins,
/// then the first angle-bracketed `<X>`, then a bare word; bare words of both
/// polarities make the text ambiguous.
pub fn extract_label(text: &str) -> Option<Label> {
    if let Some(c) = ANSWER_IS.captures(text) {
        return Some(to_label(&c[1]));
    }
    if let Some(c) = BRACKETED.captures(text) {
        return Some(to_label(&c[1]));
    }
    let found: BTreeSet<Label> = BARE.captures_iter(text).map(|c| to_label(&c[1])).collect();
    match found.len() {
        1 => found.into_iter().next(),
        _ => None,
    }
}

/// The `P<k>` list at the start of `rest`, deduplicated; `None` when an index
/// is 0 or exceeds `n_premises`. An absent list is the empty set.
pub fn extract_premises(rest: &str, n_premises: usize) -> Option<Vec<usize>> {
    let Some(m) = PREMISE_LIST.find(rest) else {
        return Some(Vec::new());
    };
    let mut out = BTreeSet::new();
    for c in PREMISE.captures_iter(m.as_str()) {
        let k: usize = c[1].parse().ok()?;
        if k == 0 || k > n_premises {
            return None;
        }
        out.insert(k);
    }
    Some(out.into_iter().collect())
}

pub fn is_cot_like(text: &str) -> bool {
    COT.is_match(text)
}

/// Total classification of one raw output.
pub fn classify(prompt_id: &str, text: &str, task: Task, n_premises: usize) -> ParsedResponse {
    let mut out = ParsedResponse {
        prompt_id: prompt_id.to_string(),
        class: ResponseClass::Irrelevant,
        cot_like: false,
        label: None,
        premises: None,
    };
    if text.trim().is_empty() {
        out.class = ResponseClass::Empty;
        return out;
    }
    let head = HEAD.captures(text).and_then(|c| {
        let label = to_label(&c[2]);
        let end = c.get(0).expect("whole match").end();
        let rest = &text[end..];
        let first_line = rest.lines().next().unwrap_or("");
        let conflicting = BARE.captures_iter(first_line).any(|x| to_label(&x[1]) != label);
        if conflicting {
            return None;
        }
        let premises = match task {
            Task::Entailment => None,
            Task::PremiseSelection => Some(extract_premises(rest, n_premises)?),
        };
        Some((label, premises))
    });
    match head {
        Some((label, premises)) => {
            out.class = ResponseClass::FollowingInstruction;
            out.label = Some(label);
            out.premises = premises;
        }
        None => out.cot_like = is_cot_like(text),
    }
    out
}

/// [`classify`] using the task and premise count of the prompt.
pub fn classify_for(prompt: &PromptRecord, text: &str) -> ParsedResponse {
    classify(&prompt.prompt_id, text, prompt.task, prompt.n_premises)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2(text: &str) -> ParsedResponse {
        classify("p", text, Task::PremiseSelection, 4)
    }

    #[test]
    fn empty_and_whitespace() {
        assert_eq!(t2("").class, ResponseClass::Empty);
        assert_eq!(t2(" \n\t").class, ResponseClass::Empty);
    }

    #[test]
    fn chain_of_thought_is_irrelevant() {
        let r = classify("p", "A nice logical puzzle! Let's break it down step by step...", Task::Entailment, 2);
        assert_eq!(r.class, ResponseClass::Irrelevant);
        assert!(r.cot_like);
        assert_eq!(r.label, None);
    }

    #[test]
    fn premise_selection_head() {
        let r = t2("True, P1, P3");
        assert_eq!(r.class, ResponseClass::FollowingInstruction);
        assert_eq!(r.label, Some(Label::True));
        assert_eq!(r.premises, Some(vec![1, 3]));
        assert_eq!(t2("<True, P3, P1, P3>").premises, Some(vec![1, 3]));
        assert_eq!(t2("False").premises, Some(vec![]));
        assert_eq!(t2("True, P9").class, ResponseClass::Irrelevant);
        assert_eq!(t2("True, P1, P2. Because the gene is in the pathway.").premises, Some(vec![1, 2]));
    }

    #[test]
    fn label_forms() {
        assert_eq!(extract_label("<False>"), Some(Label::False));
        assert_eq!(extract_label("The correct answer is: True"), Some(Label::True));
        assert_eq!(extract_label("True or False"), None);
        assert_eq!(extract_label("the answer is false, not true <True>"), Some(Label::True));
        assert_eq!(extract_label("nothing here"), None);
        assert_eq!(extract_label("TRUE"), Some(Label::True));
    }

    #[test]
    fn anchored_head() {
        let e = |s: &str| classify("p", s, Task::Entailment, 2);
        assert_eq!(e("The correct answer is: False").label, Some(Label::False));
        assert_eq!(e("  <true>").label, Some(Label::True));
        assert_eq!(e("True or False").class, ResponseClass::Irrelevant);
        assert_eq!(e("Truely").class, ResponseClass::Irrelevant);
        assert_eq!(e("The conclusion is True").class, ResponseClass::Irrelevant);
        assert_eq!(e("True\nSome would say false.").label, Some(Label::True));
        assert_eq!(e("True, P1").premises, None);
    }
}
