//! Whitespace-normalized edit distance used by the stopping rule.

/// Collapse every whitespace run to one space and trim the ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Levenshtein distance over normalized text divided by the longer length.
/// Symmetric, in `[0, 1]`, zero for identical normalized text.
pub fn normalized_edit_distance(a: &str, b: &str) -> f64 {
    let (a, b) = (normalize_whitespace(a), normalize_whitespace(b));
    1.0 - strsim::normalized_levenshtein(&a, &b)
}

/// Largest distance over all unordered pairs; zero for fewer than two texts.
pub fn max_pairwise_distance<S: AsRef<str>>(texts: &[S]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in texts.iter().enumerate() {
        for b in &texts[i + 1..] {
            worst = worst.max(normalized_edit_distance(a.as_ref(), b.as_ref()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn whitespace_is_ignored() {
        assert_eq!(normalized_edit_distance("a  b\n c", " a b c "), 0.0);
        assert_eq!(normalized_edit_distance("", ""), 0.0);
        assert_eq!(normalized_edit_distance("abc", ""), 1.0);
        assert_eq!(max_pairwise_distance(&["x"]), 0.0);
    }

    proptest! {
        #[test]
        fn distance_is_symmetric_and_bounded(a in ".{0,40}", b in ".{0,40}") {
            let ab = normalized_edit_distance(&a, &b);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((ab - normalized_edit_distance(&b, &a)).abs() < 1e-12);
            prop_assert_eq!(normalized_edit_distance(&a, &a), 0.0);
        }
    }
}
