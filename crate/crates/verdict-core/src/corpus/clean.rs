//! Text normalization.
//!
//! The cleaning pipeline lowercases, strips `<...>` markup spans, strips URL
//! tokens (`http://`, `https://`, `www.` up to the next whitespace), drops
//! every codepoint outside the allowed set, and collapses whitespace runs.
//!
//! Allowed codepoints after cleaning: `a-z`, `0-9`, whitespace, and
//! `. , ! ? ' %`. Punctuation is kept on purpose: repeated exclamation marks
//! and question marks are themselves sensationalism cues. Everything else,
//! including emoji and symbol codepoints, is removed rather than replaced.

/// Normalize raw text into the cleaned form stored on `Document`.
///
/// Runs the cleaning pass to a fixed point, so the function is idempotent:
/// `clean_text(clean_text(x)) == clean_text(x)` for every input.
pub fn clean_text(raw: &str) -> String {
    let mut cur = clean_pass(raw);
    loop {
        let next = clean_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn clean_pass(s: &str) -> String {
    let lowered = s.to_lowercase();
    let untagged = strip_markup(&lowered);
    let unlinked = strip_urls(&untagged);
    let filtered = filter_charset(&unlinked);
    collapse_whitespace(&filtered)
}

/// Remove `<...>` spans. An unmatched `<` is left in place; the charset
/// filter removes it later.
fn strip_markup(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(open) = rest.find('<') {
        out.push_str(&rest[..open]);
        match rest[open..].find('>') {
            Some(close) => rest = &rest[open + close + 1..],
            None => {
                out.push_str(&rest[open..]);
                return out;
            }
        }
    }
    out.push_str(rest);
    out
}

const URL_MARKERS: [&str; 3] = ["http://", "https://", "www."];

/// Delete from each URL marker up to the next whitespace character.
fn strip_urls(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    loop {
        let hit = URL_MARKERS
            .iter()
            .filter_map(|m| rest.find(m))
            .min();
        match hit {
            Some(start) => {
                out.push_str(&rest[..start]);
                let tail = &rest[start..];
                let end = tail
                    .char_indices()
                    .find(|(_, c)| c.is_whitespace())
                    .map(|(i, _)| i)
                    .unwrap_or(tail.len());
                rest = &tail[end..];
            }
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

fn allowed(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c.is_whitespace() || ".,!?'%".contains(c)
}

fn filter_charset(s: &str) -> String {
    s.chars().filter(|c| allowed(*c)).collect()
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
