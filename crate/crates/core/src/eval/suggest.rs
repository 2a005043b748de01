//! Draft mappings from a model, always flagged unreviewed.

use std::collections::BTreeMap;

use super::{GoldRequirement, MappingRecord};
use crate::codec::RequirementRecord;
use crate::provider::{ChatProvider, ChatRequest, ProviderError};

pub const SUGGEST_PROMPT: &str = "\
You compare generated requirements with human-elicited reference requirements.
For every generated requirement, decide which reference requirement it expresses, if any.
Reply with one line per generated requirement in the form `<generated id> -> <reference id>`, \
or `<generated id> -> none` when it matches no reference requirement. Do not write anything else.";

fn parse_reply(reply: &str) -> BTreeMap<String, Option<String>> {
    let mut out = BTreeMap::new();
    for line in reply.lines() {
        let line = line.trim().trim_start_matches(['-', '*']).trim();
        let Some((gen, gold)) = line.split_once("->") else {
            continue;
        };
        let gold = gold.trim().trim_end_matches('.');
        let gold = (!gold.eq_ignore_ascii_case("none") && !gold.is_empty()).then(|| gold.to_string());
        out.insert(gen.trim().to_string(), gold);
    }
    out
}

/// Asks the model for a mapping. Unknown or missing answers become
/// unmapped records; every record is marked unreviewed, so the mapping
/// does not validate until a person has checked it.
pub fn suggest_mapping(
    requirements: &[RequirementRecord],
    gold: &[GoldRequirement],
    provider: &dyn ChatProvider,
    model_name: &str,
) -> Result<Vec<MappingRecord>, ProviderError> {
    let mut prompt = String::from("Reference requirements:\n");
    for g in gold {
        prompt.push_str(&format!("{}: {}\n", g.id, g.text));
    }
    prompt.push_str("\nGenerated requirements:\n");
    for r in requirements {
        prompt.push_str(&format!("{}: {}\n", r.id, r.text));
    }
    let request = ChatRequest {
        system_prompt: SUGGEST_PROMPT.to_string(),
        history: vec![("user".to_string(), prompt)],
        temperature: Some(0.0),
        model_name: model_name.to_string(),
        seed: None,
    };
    let reply = provider.complete(&request)?.validate()?;
    let answers = parse_reply(&reply.content);
    Ok(requirements
        .iter()
        .map(|r| {
            let gold_id = answers
                .get(&r.id)
                .cloned()
                .flatten()
                .filter(|g| gold.iter().any(|x| &x.id == g));
            MappingRecord {
                gen_id: r.id.clone(),
                gold_id,
                relevant: None,
                shared: None,
                unreviewed: true,
            }
        })
        .collect())
}
