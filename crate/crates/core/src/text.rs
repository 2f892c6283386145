//! Token normalization shared by parsing, indexing, and matching.
//!
//! Every matcher in the crate goes through [`tokens`]: lowercase, split on
//! non-alphanumerics, drop tokens shorter than two characters.

use std::collections::BTreeSet;

const MIN_TOKEN_CHARS: usize = 2;

/// Tokens in order of appearance, repeats kept.
pub fn token_stream(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS)
        .map(str::to_lowercase)
}

/// Deduplicated, sorted token set of `text`.
pub fn tokens(text: &str) -> BTreeSet<String> {
    token_stream(text).collect()
}

/// Token set over several phrases.
pub fn tokens_of_all<'a, I>(phrases: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a String>,
{
    phrases.into_iter().flat_map(|p| token_stream(p)).collect()
}

/// Sorted keyword list, as used for query normalization.
pub fn keywords(text: &str) -> Vec<String> {
    tokens(text).into_iter().collect()
}

/// |a ∩ b| / |a ∪ b|, zero when both are empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Lowercased slug: runs of non-alphanumerics collapse to one `-`.
pub fn slug(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut pending_dash = false;
    for c in name.chars() {
        if c.is_alphanumeric() {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            out.extend(c.to_lowercase());
        } else {
            pending_dash = true;
        }
    }
    out
}

/// First sentence of `text`: up to and including the first `.`, `!` or `?`
/// that is followed by whitespace or the end of the text.
pub fn first_sentence(text: &str) -> String {
    let text = text.trim();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = chars.peek().is_none_or(|(_, next)| next.is_whitespace());
            if at_boundary {
                return text[..i + c.len_utf8()].to_string();
            }
        }
    }
    collapse_whitespace(text)
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Truncate to at most `budget` characters, cutting at the last whitespace
/// boundary that fits. Falls back to a hard cut when no whitespace exists in
/// the allowed prefix.
pub fn truncate_at_whitespace(text: &str, budget: usize) -> String {
    if text.chars().count() <= budget {
        return text.to_string();
    }
    let cut = text
        .char_indices()
        .nth(budget)
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let head = &text[..cut];
    // The character right after the cut being whitespace means `head` already
    // ends on a word boundary.
    let next_is_space = text[cut..].starts_with(char::is_whitespace);
    let end = if next_is_space {
        head.len()
    } else {
        match head.rfind(char::is_whitespace) {
            Some(pos) => pos,
            None => head.len(),
        }
    };
    head[..end].trim_end().to_string()
}

/// Trim, drop empties, and deduplicate preserving first occurrence.
pub(crate) fn dedup_phrases<I>(items: I, lowercase: bool) -> Vec<String>
where
    I: IntoIterator<Item = String>,
{
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for item in items {
        let item = collapse_whitespace(&item);
        let item = if lowercase { item.to_lowercase() } else { item };
        if item.is_empty() {
            continue;
        }
        if seen.insert(item.clone()) {
            out.push(item);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_drop_short_and_dedupe() {
        let t = keywords("Count pedestrians in MP4 video, a video!");
        assert_eq!(t, vec!["count", "in", "mp4", "pedestrians", "video"]);
    }

    #[test]
    fn jaccard_partial_overlap() {
        let a = tokens("png frame sequence");
        let b = tokens("frame sequence");
        assert!((jaccard(&a, &b) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(jaccard(&tokens(""), &tokens("")), 0.0);
    }

    #[test]
    fn slug_is_lowercase_dashed() {
        assert_eq!(slug("PCAP Analysis"), "pcap-analysis");
        assert_eq!(slug("  video--frames_v2 "), "video-frames-v2");
        assert_eq!(slug("pcap-analysis"), "pcap-analysis");
    }

    #[test]
    fn first_sentence_stops_at_boundary() {
        assert_eq!(first_sentence("Parses v1.2 files. Then more."), "Parses v1.2 files.");
        assert_eq!(first_sentence("no terminator here"), "no terminator here");
    }

    #[test]
    fn truncation_respects_whitespace() {
        let t = truncate_at_whitespace("alpha beta gamma", 12);
        assert_eq!(t, "alpha beta");
        assert_eq!(truncate_at_whitespace("alpha beta", 5), "alpha");
        assert_eq!(truncate_at_whitespace("alphabet", 4), "alph");
        assert_eq!(truncate_at_whitespace("short", 100), "short");
    }
}
