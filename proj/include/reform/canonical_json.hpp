#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "reform/corpus.hpp"

namespace reform {

inline constexpr int kCanonicalSchemaVersion = 1;

/// Serializes a corpus to the versioned canonical JSON interchange format
/// (see docs/canonical-json.md). Output is byte-deterministic.
[[nodiscard]] auto to_canonical_json(const Corpus& corpus) -> std::string;

/// Inverse of to_canonical_json. Truncated or malformed input is a ParseError,
/// an unknown schema version an UnsupportedVersionError.
[[nodiscard]] auto from_canonical_json(std::string_view bytes) -> Corpus;

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
[[nodiscard]] auto load_corpus(const std::filesystem::path& path) -> Corpus;

}  // namespace reform
