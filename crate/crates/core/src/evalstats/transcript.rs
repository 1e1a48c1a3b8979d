use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Utterances in file order, one `UTT_ID word1 word2 ...` line each.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub utterances: Vec<(String, Vec<String>)>,
}

impl Transcript {
    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }
}

pub fn parse_transcripts(text: &str) -> Result<Transcript> {
    let mut seen = HashMap::new();
    let mut utterances = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut tokens = line.split_whitespace();
        let Some(id) = tokens.next() else { continue };
        if let Some(prev) = seen.insert(id.to_string(), lineno + 1) {
            return Err(Error::Data(format!(
                "utterance `{id}` appears on lines {prev} and {}",
                lineno + 1
            )));
        }
        utterances.push((id.to_string(), tokens.map(str::to_string).collect()));
    }
    Ok(Transcript { utterances })
}

pub fn read_transcripts(path: impl AsRef<Path>) -> Result<Transcript> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_transcripts(&text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

/// `(utterance id, reference words, hypothesis words)`.
pub type UtterancePair<'a> = (&'a str, &'a [String], &'a [String]);

/// Matches hypothesis utterances to references by ID, in reference order.
/// IDs present on only one side are an error that lists them.
pub fn pair_transcripts<'a>(
    reference: &'a Transcript,
    hyp: &'a Transcript,
) -> Result<Vec<UtterancePair<'a>>> {
    let by_id: HashMap<&str, &[String]> = hyp
        .utterances
        .iter()
        .map(|(id, w)| (id.as_str(), w.as_slice()))
        .collect();
    let ref_ids: std::collections::HashSet<&str> =
        reference.utterances.iter().map(|(id, _)| id.as_str()).collect();
    let mut missing_in_hyp = Vec::new();
    let mut pairs = Vec::with_capacity(reference.len());
    for (id, words) in &reference.utterances {
        match by_id.get(id.as_str()) {
            Some(h) => pairs.push((id.as_str(), words.as_slice(), *h)),
            None => missing_in_hyp.push(id.as_str()),
        }
    }
    let extra_in_hyp: Vec<&str> = hyp
        .utterances
        .iter()
        .map(|(id, _)| id.as_str())
        .filter(|id| !ref_ids.contains(id))
        .collect();
    if !missing_in_hyp.is_empty() || !extra_in_hyp.is_empty() {
        return Err(Error::Data(format!(
            "unmatched utterance IDs: missing from hypothesis [{}]; missing from reference [{}]",
            missing_in_hyp.join(", "),
            extra_in_hyp.join(", ")
        )));
    }
    Ok(pairs)
}
