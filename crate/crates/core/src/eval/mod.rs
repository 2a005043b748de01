//! Coverage evaluation against human-elicited gold requirements.

mod coverage;
mod io;
mod report;
mod suggest;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::codec::RequirementRecord;

pub use coverage::{theme_coverage, CoverageReport, TopicLexicon, TopicLexiconError, DEFAULT_TOPIC_KEYWORDS, UNCLASSIFIED};
pub use io::{read_gold, read_mapping, write_gold, write_mapping, CsvError, GOLD_HEADER, MAPPING_HEADER};
pub use report::{format_percent, render_aggregate, render_table, EvalRecord, TABLE_KEY};
pub use suggest::{suggest_mapping, SUGGEST_PROMPT};

/// One human-elicited requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldRequirement {
    pub id: String,
    pub topic: String,
    pub text: String,
}

/// A judgement about one generated requirement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub gen_id: String,
    pub gold_id: Option<String>,
    /// Judged for unmapped records only.
    pub relevant: Option<bool>,
    /// Also produced by the comparison approach.
    pub shared: Option<bool>,
    /// Draft produced by the suggestion mode and not yet checked by a person.
    pub unreviewed: bool,
}

impl MappingRecord {
    pub fn is_unique(&self) -> bool {
        self.gold_id.is_none() && self.shared == Some(false)
    }
}

/// Counts and ratios for one case and approach. Ratios are fractions in
/// [0, 1]; `None` when the denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub gold_size: usize,
    pub prod: usize,
    pub tp: usize,
    pub fp: usize,
    pub tp_a: usize,
    pub fn_a: usize,
    /// tp / prod
    pub precision: Option<f64>,
    /// tp_a / (tp_a + fn_a)
    pub recall: Option<f64>,
    pub unique: usize,
    pub unique_relevant: usize,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(mapping: &[MappingRecord], gold: &[GoldRequirement]) -> MetricsReport {
    let prod = mapping.len();
    let tp = mapping.iter().filter(|m| m.gold_id.is_some()).count();
    let covered: BTreeSet<&str> = mapping.iter().filter_map(|m| m.gold_id.as_deref()).collect();
    let tp_a = covered.len();
    let gold_size = gold.len();
    let fn_a = gold_size.saturating_sub(tp_a);
    let unique = mapping.iter().filter(|m| m.is_unique()).count();
    let unique_relevant = mapping
        .iter()
        .filter(|m| m.is_unique() && m.relevant == Some(true))
        .count();
    MetricsReport {
        gold_size,
        prod,
        tp,
        fp: prod - tp,
        tp_a,
        fn_a,
        precision: ratio(tp, prod),
        recall: ratio(tp_a, tp_a + fn_a),
        unique,
        unique_relevant,
    }
}

/// Sums over several cases plus pooled ratios.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub cases: usize,
    pub gold_size: usize,
    pub prod: usize,
    pub tp: usize,
    pub fp: usize,
    pub tp_a: usize,
    pub fn_a: usize,
    pub unique: usize,
    pub unique_relevant: usize,
    /// sum(tp) / sum(prod)
    pub pooled_precision: Option<f64>,
    /// sum(tp) / (sum(tp) + sum(fn_a))
    pub pooled_recall: Option<f64>,
}

pub fn aggregate(reports: &[MetricsReport]) -> AggregateReport {
    let mut a = AggregateReport {
        cases: reports.len(),
        ..AggregateReport::default()
    };
    for r in reports {
        a.gold_size += r.gold_size;
        a.prod += r.prod;
        a.tp += r.tp;
        a.fp += r.fp;
        a.tp_a += r.tp_a;
        a.fn_a += r.fn_a;
        a.unique += r.unique;
        a.unique_relevant += r.unique_relevant;
    }
    a.pooled_precision = ratio(a.tp, a.prod);
    a.pooled_recall = ratio(a.tp, a.tp + a.fn_a);
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    DuplicateGoldId,
    DuplicateGenId,
    UnknownGoldId,
    RelevanceMissing,
    UnknownGenId,
    UnmappedRequirement,
    Unreviewed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFinding {
    pub kind: FindingKind,
    pub subject: String,
    pub message: String,
}

/// Checks the mapping against the gold set and, when given, the
/// requirements export. Returns every finding; an empty list means valid.
pub fn validate_mapping(
    mapping: &[MappingRecord],
    gold: &[GoldRequirement],
    requirements: Option<&[RequirementRecord]>,
) -> Vec<ValidationFinding> {
    let mut out = Vec::new();
    let mut push = |kind, subject: &str, message: String| {
        out.push(ValidationFinding {
            kind,
            subject: subject.to_string(),
            message,
        })
    };
    let mut gold_ids = BTreeSet::new();
    for g in gold {
        if !gold_ids.insert(g.id.as_str()) {
            push(FindingKind::DuplicateGoldId, &g.id, format!("gold id {} appears more than once", g.id));
        }
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for m in mapping {
        let n = seen.entry(m.gen_id.as_str()).or_insert(0);
        *n += 1;
        if *n == 2 {
            push(FindingKind::DuplicateGenId, &m.gen_id, format!("gen_id {} is mapped more than once", m.gen_id));
        }
        match &m.gold_id {
            Some(g) if !gold_ids.contains(g.as_str()) => push(
                FindingKind::UnknownGoldId,
                &m.gen_id,
                format!("{} maps to unknown gold id {g}", m.gen_id),
            ),
            None if m.relevant.is_none() => push(
                FindingKind::RelevanceMissing,
                &m.gen_id,
                format!("{} has no gold id and no relevance judgement", m.gen_id),
            ),
            _ => {}
        }
        if m.unreviewed {
            push(FindingKind::Unreviewed, &m.gen_id, format!("{} is an unreviewed suggestion", m.gen_id));
        }
    }
    if let Some(reqs) = requirements {
        let req_ids: BTreeSet<&str> = reqs.iter().map(|r| r.id.as_str()).collect();
        for id in seen.keys() {
            if !req_ids.contains(id) {
                push(FindingKind::UnknownGenId, id, format!("{id} is not in the requirements export"));
            }
        }
        for r in reqs {
            if !seen.contains_key(r.id.as_str()) {
                push(
                    FindingKind::UnmappedRequirement,
                    &r.id,
                    format!("requirement {} has no mapping record", r.id),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gold(n: usize) -> Vec<GoldRequirement> {
        (1..=n)
            .map(|i| GoldRequirement {
                id: format!("G{i}"),
                topic: "privacy".into(),
                text: format!("gold {i}"),
            })
            .collect()
    }

    fn mapped(id: &str, g: &str) -> MappingRecord {
        MappingRecord {
            gen_id: id.into(),
            gold_id: Some(g.into()),
            ..Default::default()
        }
    }

    fn unmapped(id: &str, relevant: bool, shared: bool) -> MappingRecord {
        MappingRecord {
            gen_id: id.into(),
            relevant: Some(relevant),
            shared: Some(shared),
            ..Default::default()
        }
    }

    /// Builds a mapping from explicit per-gold hit counts and unmapped tallies.
    fn build(hits: &[(usize, usize)], shared_fp: usize, unique_rel: usize, unique_irr: usize) -> Vec<MappingRecord> {
        let mut out = Vec::new();
        let mut n = 0;
        let mut next = || {
            n += 1;
            format!("R-{n}")
        };
        for (g, count) in hits {
            for _ in 0..*count {
                out.push(mapped(&next(), &format!("G{g}")));
            }
        }
        for _ in 0..shared_fp {
            out.push(unmapped(&next(), true, true));
        }
        for _ in 0..unique_rel {
            out.push(unmapped(&next(), true, false));
        }
        for _ in 0..unique_irr {
            out.push(unmapped(&next(), false, false));
        }
        out
    }

    #[test]
    fn ssl_malea_row() {
        // 12 hits over 7 distinct of 13 gold; 3 shared + 12 relevant + 1 irrelevant unmapped.
        let m = build(&[(1, 2), (3, 2), (5, 2), (7, 2), (11, 2), (12, 1), (13, 1)], 3, 12, 1);
        let r = compute_metrics(&m, &gold(13));
        assert_eq!((r.prod, r.tp, r.fp, r.tp_a, r.fn_a), (28, 12, 16, 7, 6));
        assert_eq!((r.unique, r.unique_relevant), (13, 12));
        assert!((r.precision.unwrap() * 100.0 - 42.9).abs() < 0.05);
        assert!((r.recall.unwrap() * 100.0 - 53.8).abs() < 0.05);
    }

    #[test]
    fn fake_review_malea_row() {
        let m = build(&[(1, 3), (2, 3), (3, 3), (4, 3), (5, 2), (6, 2), (7, 2)], 3, 4, 0);
        let r = compute_metrics(&m, &gold(8));
        assert_eq!((r.prod, r.tp, r.fp, r.tp_a, r.fn_a), (25, 18, 7, 7, 1));
        assert_eq!((r.unique, r.unique_relevant), (4, 4));
        assert_eq!(r.precision, Some(0.72));
        assert_eq!(r.recall, Some(0.875));
    }

    #[test]
    fn empty_mapping() {
        let r = compute_metrics(&[], &gold(8));
        assert_eq!((r.prod, r.tp, r.fp, r.tp_a, r.fn_a), (0, 0, 0, 0, 8));
        assert_eq!(r.precision, None);
        assert_eq!(r.recall, Some(0.0));
        assert_eq!(compute_metrics(&[], &[]).recall, None);
    }

    #[test]
    fn pooled_recall_differs_from_case_recall() {
        let m = build(&[(1, 2), (3, 2), (5, 2), (7, 2), (11, 2), (12, 1), (13, 1)], 3, 12, 1);
        let r = compute_metrics(&m, &gold(13));
        let a = aggregate(&[r]);
        assert!((a.pooled_recall.unwrap() - 12.0 / 18.0).abs() < 1e-12);
        assert!((r.recall.unwrap() - 7.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn pooled_malea_and_single() {
        let row = |tp, fn_a, prod| MetricsReport {
            tp,
            fn_a,
            prod,
            ..Default::default()
        };
        let malea = aggregate(&[row(12, 6, 28), row(18, 1, 25)]);
        assert!((malea.pooled_recall.unwrap() * 100.0 - 81.08).abs() < 0.01);
        let single = aggregate(&[row(12, 5, 24), row(9, 2, 21)]);
        assert!((single.pooled_recall.unwrap() * 100.0 - 75.0).abs() < 0.01);
    }

    #[test]
    fn validation_findings() {
        let g = gold(2);
        let dup = vec![mapped("R-1", "G1"), mapped("R-1", "G2")];
        let f = validate_mapping(&dup, &g, None);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FindingKind::DuplicateGenId);

        let no_rel = vec![MappingRecord {
            gen_id: "R-1".into(),
            ..Default::default()
        }];
        let f = validate_mapping(&no_rel, &g, None);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FindingKind::RelevanceMissing);

        let unknown = vec![mapped("R-1", "G9")];
        assert_eq!(validate_mapping(&unknown, &g, None)[0].kind, FindingKind::UnknownGoldId);

        assert!(validate_mapping(&[mapped("R-1", "G1")], &g, None).is_empty());
    }

    #[test]
    fn referential_integrity() {
        let rec = |id: &str| RequirementRecord {
            id: id.into(),
            text: "t".into(),
            story_id: "US-1".into(),
            criterion_id: None,
            placeholders: vec![],
            themes: vec![],
        };
        let reqs = vec![rec("R-1"), rec("R-2")];
        let m = vec![mapped("R-1", "G1"), mapped("R-3", "G1")];
        let kinds: Vec<FindingKind> = validate_mapping(&m, &gold(1), Some(&reqs))
            .into_iter()
            .map(|f| f.kind)
            .collect();
        assert_eq!(kinds, [FindingKind::UnknownGenId, FindingKind::UnmappedRequirement]);
    }

    fn arb_mapping() -> impl Strategy<Value = Vec<MappingRecord>> {
        prop::collection::vec(
            (prop::option::of(1usize..10), any::<bool>(), any::<bool>()),
            0..40,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (g, rel, shared))| MappingRecord {
                    gen_id: format!("R-{i}"),
                    gold_id: g.map(|g| format!("G{g}")),
                    relevant: Some(rel),
                    shared: Some(shared),
                    unreviewed: false,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn invariants_hold(m in arb_mapping()) {
            let g = gold(9);
            let r = compute_metrics(&m, &g);
            prop_assert_eq!(r.prod, r.tp + r.fp);
            prop_assert_eq!(r.tp_a + r.fn_a, g.len());
            prop_assert!(r.tp_a <= r.tp);
            if let Some(p) = r.precision { prop_assert!((0.0..=1.0).contains(&p)); }
            if let Some(x) = r.recall { prop_assert!((0.0..=1.0).contains(&x)); }
        }

        #[test]
        fn order_does_not_matter(m in arb_mapping(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = m.clone();
            shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            prop_assert_eq!(compute_metrics(&m, &gold(9)), compute_metrics(&shuffled, &gold(9)));
        }

        #[test]
        fn unmapped_record_only_adds_fp(m in arb_mapping(), rel in any::<bool>()) {
            let before = compute_metrics(&m, &gold(9));
            let mut more = m.clone();
            more.push(unmapped("R-extra", rel, true));
            let after = compute_metrics(&more, &gold(9));
            prop_assert_eq!(after.prod, before.prod + 1);
            prop_assert_eq!(after.fp, before.fp + 1);
            prop_assert_eq!(after.recall, before.recall);
        }
    }
}
