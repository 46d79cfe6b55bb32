#pragma once

#include <filesystem>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "reform/term_bag.hpp"

namespace reform {

/// The bundled SMART stopword list (523 punctuation-free entries).
[[nodiscard]] auto smart_stoplist() -> const std::set<std::string>&;

struct NormalizationConfig {
    /// Lowercase, punctuation-free words removed before stemming.
    std::set<std::string> stoplist = smart_stoplist();
    bool stemming_enabled = true;
    bool keep_numeric_tokens = true;

    auto operator==(const NormalizationConfig&) const -> bool = default;
};

/// Stable 16-hex-digit fingerprint of a normalization config (FNV-1a 64).
[[nodiscard]] auto fingerprint(const NormalizationConfig& config) -> std::string;

/// Reads a stoplist: one word per line, `#` starts a comment, blank lines ignored.
/// Words are lowercased; a word containing punctuation is a ParseError.
[[nodiscard]] auto parse_stoplist(std::istream& in) -> std::set<std::string>;
[[nodiscard]] auto load_stoplist(const std::filesystem::path& path) -> std::set<std::string>;

/// Copy of `bytes` with every malformed UTF-8 sequence replaced by U+FFFD.
[[nodiscard]] auto sanitize_utf8(std::string_view bytes) -> std::string;

/// Visible text of an HTML fragment.
///
/// Script and style contents are dropped, every tag (and comment, doctype,
/// processing instruction) becomes a single space, the entities amp, lt, gt,
/// quot, apos, nbsp and numeric references are decoded, runs of whitespace
/// collapse to one space and the result is trimmed. Invalid UTF-8 bytes are
/// replaced with U+FFFD. Unbalanced markup is tolerated.
[[nodiscard]] auto strip_html(std::string_view html) -> std::string;

/// Lowercase ASCII alphanumeric tokens split on punctuation and whitespace.
/// Non-ASCII letters stay inside tokens unchanged; Unicode punctuation and
/// U+FFFD separate tokens. Pure-digit tokens are dropped unless `keep_numeric`.
[[nodiscard]] auto tokenize(std::string_view text, bool keep_numeric = true) -> std::vector<std::string>;

/// Classic Porter (1980) stemmer. Tokens of length <= 2 and tokens holding
/// non-ASCII bytes are returned unchanged.
[[nodiscard]] auto stem(std::string_view token) -> std::string;

/// tokenize -> stopword filter -> stem (if enabled), counted into a bag.
[[nodiscard]] auto normalize(std::string_view text, const NormalizationConfig& config) -> TermBag;

}  // namespace reform
