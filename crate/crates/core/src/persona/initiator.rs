use chrono::{DateTime, Utc};

use crate::model::{AgentRole, Message, Phase, RunConfig, SystemDescription};

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// English cardinal for `n`; numbers from one thousand up stay as digits.
pub fn number_word(n: u32) -> String {
    match n {
        0..=19 => ONES[n as usize].to_string(),
        20..=99 => {
            let t = TENS[(n / 10) as usize];
            match n % 10 {
                0 => t.to_string(),
                r => format!("{t}-{}", ONES[r as usize]),
            }
        }
        100..=999 => {
            let h = format!("{} hundred", ONES[(n / 100) as usize]);
            match n % 100 {
                0 => h,
                r => format!("{h} and {}", number_word(r)),
            }
        }
        _ => n.to_string(),
    }
}

/// "A", "A and B", "A, B, and C".
pub fn join_themes<S: AsRef<str>>(items: &[S]) -> String {
    match items {
        [] => String::new(),
        [one] => one.as_ref().to_string(),
        [a, b] => format!("{} and {}", a.as_ref(), b.as_ref()),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(AsRef::as_ref).collect();
            format!("{}, and {}", head.join(", "), last.as_ref())
        }
    }
}

pub fn initiator_text(description: &SystemDescription, config: &RunConfig) -> String {
    let themes: Vec<&str> = config.themes.iter().map(|t| t.theme.name()).collect();
    format!(
        "Generate {} or more ethics requirements, focusing on {}, in the form of user stories \
         with acceptance criteria, for building a system with the following\n\n{}",
        number_word(config.min_stories),
        join_themes(&themes),
        description.body()
    )
}

/// The controller message that opens every session.
pub fn build_initiator(
    description: &SystemDescription,
    config: &RunConfig,
    timestamp: DateTime<Utc>,
) -> Message {
    Message {
        seq: 0,
        role: AgentRole::Controller,
        phase: Phase::Drafting,
        content: initiator_text(description, config),
        tokens_in: 0,
        tokens_out: 0,
        timestamp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_taxonomy, Theme};

    const VERBATIM: &str = "Generate five or more ethics requirements, focusing on Transparency, \
        Fairness, and Data, in the form of user stories with acceptance criteria, for building a \
        system with the following";

    fn desc() -> SystemDescription {
        SystemDescription::new("SSL", "A mobile app that translates spoken English into sign language.")
            .unwrap()
    }

    #[test]
    fn default_initiator_is_verbatim() {
        let m = build_initiator(&desc(), &RunConfig::default(), DateTime::UNIX_EPOCH);
        assert!(m.content.starts_with(VERBATIM));
        assert!(m.content.ends_with("translates spoken English into sign language."));
        assert_eq!(m.role, AgentRole::Controller);
        assert_eq!(m.seq, 0);
    }

    #[test]
    fn min_stories_substituted() {
        let cfg = RunConfig { min_stories: 8, ..RunConfig::default() };
        assert!(initiator_text(&desc(), &cfg).starts_with("Generate eight or more ethics requirements, "));
    }

    #[test]
    fn themes_substituted() {
        let cfg = RunConfig {
            themes: default_taxonomy()
                .into_iter()
                .filter(|t| t.theme != Theme::Fairness)
                .collect(),
            ..RunConfig::default()
        };
        assert!(initiator_text(&desc(), &cfg).contains("focusing on Transparency and Data, in the form"));
    }

    #[test]
    fn number_words() {
        let cases = [
            (1, "one"),
            (5, "five"),
            (8, "eight"),
            (13, "thirteen"),
            (20, "twenty"),
            (42, "forty-two"),
            (100, "one hundred"),
            (215, "two hundred and fifteen"),
            (1000, "1000"),
        ];
        for (n, w) in cases {
            assert_eq!(number_word(n), w);
        }
    }

    #[test]
    fn oxford_comma() {
        assert_eq!(join_themes::<&str>(&[]), "");
        assert_eq!(join_themes(&["A"]), "A");
        assert_eq!(join_themes(&["A", "B"]), "A and B");
        assert_eq!(join_themes(&["A", "B", "C", "D"]), "A, B, C, and D");
    }
}
