use crate::model::Span;

pub const DEFAULT_LEXICON: &str = include_str!("../../assets/vague_terms.txt");

/// Vague terms, stored lowercase and sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    terms: Vec<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_LEXICON)
    }
}

impl Lexicon {
    /// One term per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::from_terms(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut terms: Vec<String> = terms
            .into_iter()
            .map(|t| t.as_ref().trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        terms.sort();
        terms.dedup();
        Self { terms }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn without(&self, term: &str) -> Self {
        let term = term.to_lowercase();
        Self {
            terms: self.terms.iter().filter(|t| **t != term).cloned().collect(),
        }
    }

    /// Every occurrence of every term, overlaps included, ordered by span.
    pub fn find_all(&self, text: &str) -> Vec<(Span, &str)> {
        let lower = text.to_lowercase();
        // Lowercasing can change byte lengths outside ASCII; fall back to
        // ASCII folding so spans stay valid for the original text.
        let hay = if lower.len() == text.len() {
            lower
        } else {
            text.to_ascii_lowercase()
        };
        let mut hits = Vec::new();
        for term in &self.terms {
            let mut from = 0;
            while let Some(pos) = hay[from..].find(term.as_str()) {
                let start = from + pos;
                let end = start + term.len();
                if boundary_before(&hay, start, term) && boundary_after(&hay, end, term) {
                    hits.push((Span::new(start, end), term.as_str()));
                }
                from = start + hay[start..].chars().next().map_or(1, char::len_utf8);
            }
        }
        hits.sort_by_key(|(s, t)| (s.start, s.end, *t));
        hits
    }
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric()
}

fn boundary_before(hay: &str, start: usize, term: &str) -> bool {
    let first_is_word = term.chars().next().is_some_and(is_word);
    !first_is_word || !hay[..start].chars().next_back().is_some_and(is_word)
}

fn boundary_after(hay: &str, end: usize, term: &str) -> bool {
    let last_is_word = term.chars().next_back().is_some_and(is_word);
    !last_is_word || !hay[end..].chars().next().is_some_and(is_word)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_documented_terms() {
        let lex = Lexicon::default();
        for t in ["user-friendly", "appropriate", "fast", "etc.", "robust"] {
            assert!(lex.terms().iter().any(|x| x == t), "{t}");
        }
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let lex = Lexicon::parse("# header\n\nFast  # trailing\n robust\nfast\n");
        assert_eq!(lex.terms(), ["fast", "robust"]);
    }

    #[test]
    fn word_boundaries() {
        let lex = Lexicon::from_terms(["fast"]);
        assert!(lex.find_all("breakfast is fastidious").is_empty());
        let hits = lex.find_all("A Fast, fast response.");
        let spans: Vec<_> = hits.iter().map(|(s, _)| (s.start, s.end)).collect();
        assert_eq!(spans, [(2, 6), (8, 12)]);
    }

    #[test]
    fn punctuated_terms() {
        let lex = Lexicon::from_terms(["etc.", "user-friendly"]);
        let text = "Logs, reports, etc. in a User-Friendly view";
        let hits = lex.find_all(text);
        assert_eq!(hits.len(), 2);
        for (s, t) in hits {
            assert_eq!(s.slice(text).to_lowercase(), t);
        }
    }

    #[test]
    fn without_removes_term() {
        let lex = Lexicon::default();
        let smaller = lex.without("Fast");
        assert_eq!(smaller.len(), lex.len() - 1);
        assert!(smaller.find_all("fast").is_empty());
    }
}
