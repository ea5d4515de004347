//! Lexical label normalization.
//!
//! Normalization is purely lexical by design: NFC, lowercase, collapsed
//! whitespace, and no leading or trailing punctuation. No stemming or
//! lemmatization happens here; semantic merging belongs to the optional
//! similarity edge layer.

use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

fn is_punctuation(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Punctuation
}

/// Normalize a raw surface string into its canonical label form.
///
/// Applies NFC, lowercases, collapses whitespace runs to single spaces,
/// and strips leading/trailing punctuation. Idempotent. May return an
/// empty string; callers must reject empty results.
pub fn normalize_label(raw: &str) -> String {
    // Lowercasing can in rare cases emit decomposed sequences, so NFC
    // runs again afterwards to keep the output form stable.
    let lowered: String = raw.nfc().collect::<String>().to_lowercase();
    let recomposed: String = lowered.nfc().collect();
    let collapsed = recomposed.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed
        .trim_matches(|c: char| c.is_whitespace() || is_punctuation(c))
        .to_string()
}

/// Whitespace-delimited tokens of an already-normalized label.
pub(crate) fn label_tokens(label: &str) -> impl Iterator<Item = &str> {
    label.split(' ').filter(|t| !t.is_empty())
}
