//! Coalition-mask to text materialization.

/// How absent (mask=0) tokens are realized in the perturbed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaskMode {
    /// Delete absent tokens (LIME-style perturbation).
    Delete,
    /// Replace absent tokens with a neutral baseline token, keeping sequence
    /// length and positions intact (default for Shapley methods, so position
    /// effects do not leak into the attributions). Pick a token that is
    /// out-of-vocabulary for the model, e.g. `Vocab::oov_token`.
    Replace(String),
}

/// Realize a coalition: kept tokens stay in order, absent ones are deleted or
/// replaced per `mode`.
pub fn mask_to_text(tokens: &[String], mask: &[bool], mode: &MaskMode) -> String {
    assert_eq!(tokens.len(), mask.len(), "mask length must match token count");
    match mode {
        MaskMode::Delete => tokens
            .iter()
            .zip(mask)
            .filter(|(_, keep)| **keep)
            .map(|(t, _)| t.as_str())
            .collect::<Vec<_>>()
            .join(" "),
        MaskMode::Replace(baseline) => tokens
            .iter()
            .zip(mask)
            .map(|(t, keep)| if *keep { t.as_str() } else { baseline.as_str() })
            .collect::<Vec<_>>()
            .join(" "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn full_mask_is_identity() {
        let t = toks(&["vaccine", "is", "a", "hoax"]);
        assert_eq!(mask_to_text(&t, &[true; 4], &MaskMode::Delete), "vaccine is a hoax");
    }

    #[test]
    fn deletion_drops_masked_tokens() {
        let t = toks(&["vaccine", "is", "a", "hoax"]);
        assert_eq!(
            mask_to_text(&t, &[true, true, true, false], &MaskMode::Delete),
            "vaccine is a"
        );
        assert_eq!(mask_to_text(&t, &[false; 4], &MaskMode::Delete), "");
    }

    #[test]
    fn replacement_keeps_positions() {
        let t = toks(&["vaccine", "is", "a", "hoax"]);
        let mode = MaskMode::Replace("qq".to_string());
        assert_eq!(
            mask_to_text(&t, &[true, false, false, true], &mode),
            "vaccine qq qq hoax"
        );
    }
}
