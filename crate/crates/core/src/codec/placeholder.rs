//! `[PLACEHOLDER]` / `[PLACEHOLDER: description]` tags.
//!
//! The keyword is case-insensitive and the description may itself contain
//! balanced square brackets. Tags are reported left to right and never
//! overlap. A tag whose closing bracket is missing is skipped with a warning.

use crate::model::{Placeholder, Span};

const KEYWORD: &str = "placeholder";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlaceholderScan {
    pub placeholders: Vec<Placeholder>,
    pub warnings: Vec<String>,
}

pub fn extract_placeholders(text: &str) -> PlaceholderScan {
    let bytes = text.as_bytes();
    let mut scan = PlaceholderScan::default();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'[' {
            i += 1;
            continue;
        }
        let start = i;
        let mut j = i + 1;
        while j < bytes.len() && bytes[j] == b' ' {
            j += 1;
        }
        let kw_end = j + KEYWORD.len();
        if kw_end > bytes.len() || !bytes[j..kw_end].eq_ignore_ascii_case(KEYWORD.as_bytes()) {
            i += 1;
            continue;
        }
        let mut k = kw_end;
        while k < bytes.len() && bytes[k] == b' ' {
            k += 1;
        }
        match bytes.get(k) {
            Some(b']') => {
                let end = k + 1;
                scan.placeholders.push(Placeholder {
                    span: Span::new(start, end),
                    raw: text[start..end].to_string(),
                    description: None,
                });
                i = end;
            }
            Some(b':') => match closing_bracket(bytes, k + 1) {
                Some(close) => {
                    let end = close + 1;
                    let desc = text[k + 1..close].trim();
                    scan.placeholders.push(Placeholder {
                        span: Span::new(start, end),
                        raw: text[start..end].to_string(),
                        description: (!desc.is_empty()).then(|| desc.to_string()),
                    });
                    i = end;
                }
                None => {
                    scan.warnings
                        .push(format!("unterminated placeholder at byte {start}"));
                    i = kw_end;
                }
            },
            None => {
                scan.warnings
                    .push(format!("unterminated placeholder at byte {start}"));
                i = kw_end;
            }
            // "[Placeholders]", "[placeholder text]" and the like are not tags.
            Some(_) => i += 1,
        }
    }
    scan
}

/// Index of the `]` that balances an already-open bracket, scanning from `from`.
fn closing_bracket(bytes: &[u8], from: usize) -> Option<usize> {
    let mut depth = 1usize;
    for (offset, b) in bytes[from..].iter().enumerate() {
        match b {
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(from + offset);
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use regex::Regex;

    #[test]
    fn described_tag() {
        let text = "gap ≤ [PLACEHOLDER: statistical parity gap ≤ Z %]";
        let scan = extract_placeholders(text);
        assert_eq!(scan.placeholders.len(), 1);
        let p = &scan.placeholders[0];
        assert_eq!(p.description.as_deref(), Some("statistical parity gap ≤ Z %"));
        assert_eq!(p.span.slice(text), "[PLACEHOLDER: statistical parity gap ≤ Z %]");
        assert!(scan.warnings.is_empty());
    }

    #[test]
    fn no_tags() {
        assert!(extract_placeholders("no tags here").placeholders.is_empty());
    }

    #[test]
    fn adjacent_tags() {
        let scan = extract_placeholders("[placeholder][PLACEHOLDER: x]");
        assert_eq!(scan.placeholders.len(), 2);
        assert_eq!(scan.placeholders[0].description, None);
        assert_eq!(scan.placeholders[1].description.as_deref(), Some("x"));
    }

    #[test]
    fn nested_brackets_stay_in_description() {
        let scan = extract_placeholders("[PLACEHOLDER: threshold [in %]] end");
        assert_eq!(scan.placeholders.len(), 1);
        assert_eq!(
            scan.placeholders[0].description.as_deref(),
            Some("threshold [in %]")
        );
    }

    #[test]
    fn unterminated_is_warned_and_ignored() {
        let scan = extract_placeholders("keep for [PLACEHOLDER: retention period");
        assert!(scan.placeholders.is_empty());
        assert_eq!(scan.warnings.len(), 1);
    }

    #[test]
    fn lookalikes_are_not_tags() {
        assert!(extract_placeholders("[Placeholders] and [placeholder text]")
            .placeholders
            .is_empty());
    }

    // Independent route: a regex over the same grammar, restricted to
    // descriptions without nested brackets.
    fn regex_oracle(text: &str) -> Vec<(usize, usize)> {
        let re = Regex::new(r"(?i)\[ *placeholder *(?:\]|:[^\[\]]*\])").unwrap();
        re.find_iter(text).map(|m| (m.start(), m.end())).collect()
    }

    proptest! {
        #[test]
        fn matches_regex_oracle(parts in proptest::collection::vec(
            prop_oneof![
                Just("[PLACEHOLDER]".to_string()),
                Just("[placeholder: value]".to_string()),
                Just("[Placeholder:x]".to_string()),
                Just("[note]".to_string()),
                Just(" text ".to_string()),
                Just("[".to_string()),
                "[a-z ]{0,6}".prop_map(|s| s),
            ],
            0..12,
        )) {
            let text = parts.concat();
            let got: Vec<_> = extract_placeholders(&text)
                .placeholders
                .iter()
                .map(|p| (p.span.start, p.span.end))
                .collect();
            prop_assert_eq!(got, regex_oracle(&text));
        }

        #[test]
        fn spans_disjoint_and_ordered(text in "[\\[\\]a-zA-Z: ]{0,60}") {
            let scan = extract_placeholders(&text);
            for w in scan.placeholders.windows(2) {
                prop_assert!(w[0].span.end <= w[1].span.start);
            }
            for p in &scan.placeholders {
                prop_assert_eq!(p.span.slice(&text), p.raw.as_str());
            }
        }
    }
}
