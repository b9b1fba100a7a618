mod common;

use common::{load_metric_cases, metric_prompt};
use proptest::prelude::*;
use std::collections::BTreeMap;
use syllo_core::metrics::{confusion_scores, evaluate, faithfulness, reasoning_accuracy, ScoreConfig, UnparsedPolicy, ALL};
use syllo_core::parse::{classify_for, ParsedResponse, ResponseClass};
use syllo_core::prompts::{Expected, Task};
use syllo_core::Label;

fn resp(id: &str, class: ResponseClass, label: Option<Label>, premises: Option<Vec<usize>>) -> ParsedResponse {
    ParsedResponse {
        prompt_id: id.into(),
        class,
        cot_like: false,
        label,
        premises,
    }
}

fn says(id: &str, l: Label) -> ParsedResponse {
    resp(id, ResponseClass::FollowingInstruction, Some(l), None)
}

fn gold(items: &[(&str, Label)]) -> BTreeMap<String, Expected> {
    items
        .iter()
        .map(|&(id, label)| (id.to_string(), Expected { label, premises: vec![] }))
        .collect()
}

#[test]
fn ten_item_hand_count() {
    use Label::{False as F, True as T};
    // 6 right on True, 2 right on False, one False answered True, one True
    // answered off-format.
    let mut g = Vec::new();
    let mut r = Vec::new();
    let ids: Vec<String> = (0..10).map(|i| format!("q{i}")).collect();
    for id in &ids[..6] {
        g.push((id.as_str(), T));
        r.push(says(id, T));
    }
    for id in &ids[6..8] {
        g.push((id.as_str(), F));
        r.push(says(id, F));
    }
    g.push((&ids[8], F));
    r.push(says(&ids[8], T));
    g.push((&ids[9], T));
    r.push(resp(&ids[9], ResponseClass::Irrelevant, None, None));

    let c = confusion_scores(&r, &gold(&g), UnparsedPolicy::Incorrect).unwrap();
    assert_eq!(c.accuracy, 0.8);
    assert_eq!(c.precision, Some(6.0 / 7.0));
    assert_eq!(c.recall, Some(6.0 / 7.0));
    assert!((c.f1.unwrap() - 6.0 / 7.0).abs() < 1e-12);
}

#[test]
fn perfect_four_items() {
    use Label::{False as F, True as T};
    let g = gold(&[("a", T), ("b", F), ("c", T), ("d", F)]);
    let r: Vec<_> = g.iter().map(|(id, e)| says(id, e.label)).collect();
    let c = confusion_scores(&r, &g, UnparsedPolicy::Incorrect).unwrap();
    assert_eq!((c.accuracy, c.precision, c.recall, c.f1), (1.0, Some(1.0), Some(1.0), Some(1.0)));
}

#[test]
fn reasoning_accuracy_needs_exact_premise_sets() {
    let g: BTreeMap<String, Expected> = [
        ("a".to_string(), Expected { label: Label::True, premises: vec![1, 2] }),
        ("b".to_string(), Expected { label: Label::True, premises: vec![1, 2] }),
    ]
    .into();
    let exact = resp("a", ResponseClass::FollowingInstruction, Some(Label::True), Some(vec![1, 2]));
    let superset = resp("b", ResponseClass::FollowingInstruction, Some(Label::True), Some(vec![1, 2, 3]));
    assert_eq!(reasoning_accuracy(&[exact, superset], &g).unwrap(), Some(0.5));
}

#[test]
fn faithfulness_pairs() {
    let t = says("x", Label::True);
    let f = says("y", Label::False);
    let off = resp("y", ResponseClass::Irrelevant, None, None);
    assert_eq!(faithfulness(&[(t.clone(), f)]), Some(1.0));
    assert_eq!(faithfulness(&[(t.clone(), says("y", Label::True))]), Some(0.0));
    assert_eq!(faithfulness(&[(t, off)]), Some(0.0));
    assert_eq!(faithfulness(&[]), None);
}

#[test]
fn fixture_overall_rows() {
    let cases = load_metric_cases("metrics/fixture20.jsonl");
    let task2: Vec<_> = cases.iter().map(|c| metric_prompt(c, Task::PremiseSelection)).collect();
    let parsed: Vec<_> = task2.iter().zip(&cases).map(|(p, c)| classify_for(p, &c.text)).collect();
    let rows = evaluate("m", &task2, &parsed, &ScoreConfig::default()).unwrap();
    let overall = rows.iter().find(|r| r.scheme == ALL && r.variant == ALL && r.n_distractors == ALL).unwrap();
    assert_eq!(overall.n, 12);
    assert_eq!(overall.accuracy, 7.0 / 12.0);
    assert_eq!(overall.precision, Some(4.0 / 5.0));
    assert_eq!(overall.recall, Some(4.0 / 7.0));
    assert_eq!(overall.reasoning_accuracy, Some(5.0 / 12.0));
    assert_eq!(overall.following, 9.0 / 12.0);
    assert_eq!(overall.non_empty, 11.0 / 12.0);
    assert_eq!(overall.n_pairs, 4);
    assert_eq!(overall.faithfulness, Some(0.5));
}

fn arb_response(id: String) -> impl Strategy<Value = ParsedResponse> {
    prop_oneof![
        Just(resp(&id, ResponseClass::Empty, None, None)),
        Just(resp(&id, ResponseClass::Irrelevant, None, None)),
        any::<bool>().prop_map(move |b| says(&id, if b { Label::True } else { Label::False })),
    ]
}

fn arb_case() -> impl Strategy<Value = (BTreeMap<String, Expected>, Vec<ParsedResponse>)> {
    proptest::collection::vec(any::<bool>(), 1..40).prop_flat_map(|labels| {
        let g: BTreeMap<String, Expected> = labels
            .iter()
            .enumerate()
            .map(|(i, &b)| (format!("p{i:02}"), Expected { label: if b { Label::True } else { Label::False }, premises: vec![] }))
            .collect();
        let rs: Vec<_> = g.keys().cloned().map(arb_response).collect();
        (Just(g), rs)
    })
}

proptest! {
    #[test]
    fn accuracy_bounded_by_following((g, r) in arb_case()) {
        let c = confusion_scores(&r, &g, UnparsedPolicy::Incorrect).unwrap();
        let following = r.iter().filter(|x| x.class == ResponseClass::FollowingInstruction).count() as f64 / r.len() as f64;
        prop_assert!(c.accuracy <= following + 1e-12);
        if let (Some(p), Some(rc), Some(f1)) = (c.precision, c.recall, c.f1) {
            if p > 0.0 && rc > 0.0 {
                prop_assert!((f1 - 2.0 * p * rc / (p + rc)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn order_invariant((g, r) in arb_case(), seed in any::<u64>()) {
        let mut shuffled = r.clone();
        let n = shuffled.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(
            confusion_scores(&r, &g, UnparsedPolicy::Incorrect).unwrap(),
            confusion_scores(&shuffled, &g, UnparsedPolicy::Incorrect).unwrap()
        );
    }

    #[test]
    fn faithfulness_bounded_by_compliant_pairs((_, r) in arb_case()) {
        let pairs: Vec<_> = r.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect();
        if let Some(f) = faithfulness(&pairs) {
            let ok = pairs
                .iter()
                .filter(|(x, y)| x.class == ResponseClass::FollowingInstruction && y.class == ResponseClass::FollowingInstruction)
                .count() as f64
                / pairs.len() as f64;
            prop_assert!(f <= ok + 1e-12);
        }
    }
}
