use serde::{Deserialize, Serialize};

use super::{AggregateReport, MetricsReport};

pub const TABLE_KEY: &str = "Key: Prod. = total requirements produced; TP = true positives; \
FP = false positives; TP_A = unique ground-truth requirements covered; FN_A = ground-truth \
requirements missed; Prec. = precision = TP/Prod.; Recall = per-case recall = TP_A/(TP_A+FN_A).";

/// `0.4286` at one decimal is "42.9 %"; undefined ratios print as "n/a".
pub fn format_percent(ratio: Option<f64>, decimals: usize) -> String {
    match ratio {
        Some(r) => format!("{:.*} %", decimals, r * 100.0),
        None => "n/a".to_string(),
    }
}

/// Machine-readable row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub label: String,
    #[serde(flatten)]
    pub metrics: MetricsReport,
    pub recall_formula: String,
}

impl EvalRecord {
    pub fn new(label: impl Into<String>, metrics: MetricsReport) -> Self {
        Self {
            label: label.into(),
            metrics,
            recall_formula: "tp_a/(tp_a+fn_a)".into(),
        }
    }
}

pub fn render_table(rows: &[EvalRecord]) -> String {
    let label_w = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max("Set".len());
    let mut out = format!(
        "{:<label_w$}  {:>5}  {:>3}  {:>3}  {:>4}  {:>4}  {:>7}  {:>7}  {:>6}  {}\n",
        "Set", "Prod.", "TP", "FP", "TP_A", "FN_A", "Prec.", "Recall", "Unique", "Unique and relevant",
    );
    for r in rows {
        let m = &r.metrics;
        out.push_str(&format!(
            "{:<label_w$}  {:>5}  {:>3}  {:>3}  {:>4}  {:>4}  {:>7}  {:>7}  {:>6}  {:>19}\n",
            r.label,
            m.prod,
            m.tp,
            m.fp,
            m.tp_a,
            m.fn_a,
            format_percent(m.precision, 1),
            format_percent(m.recall, 1),
            m.unique,
            m.unique_relevant,
        ));
    }
    out.push_str(TABLE_KEY);
    out.push('\n');
    out
}

pub fn render_aggregate(a: &AggregateReport) -> String {
    format!(
        "Pooled over {} cases: Prod. {}  TP {}  FP {}  TP_A {}  FN_A {}  Unique {}  Unique and relevant {}\n\
         Pooled precision, sum(TP)/sum(Prod.): {}\n\
         Pooled recall, sum(TP)/(sum(TP)+sum(FN_A)): {}\n",
        a.cases,
        a.prod,
        a.tp,
        a.fp,
        a.tp_a,
        a.fn_a,
        a.unique,
        a.unique_relevant,
        format_percent(a.pooled_precision, 2),
        format_percent(a.pooled_recall, 2),
    )
}
