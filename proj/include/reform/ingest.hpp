#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "reform/corpus.hpp"
#include "reform/textnorm.hpp"

namespace reform {

/// Parses a TREC Session Track log (2011-2014 layouts).
///
/// Each `<session>` becomes a Session; each `<interaction>` an impression in
/// document order; a trailing `<currentquery>` (or a final interaction without
/// results) becomes the test query. When `dataset` is non-empty, session and
/// topic identifiers are qualified as `dataset/id` so several years can share
/// one corpus.
[[nodiscard]] auto parse_trec_xml(std::istream& in, const NormalizationConfig& config, const std::string& dataset = {})
    -> Corpus;
[[nodiscard]] auto ingest_trec_xml(const std::filesystem::path& path, const NormalizationConfig& config,
                                   const std::string& dataset = {}) -> Corpus;

/// Reads `topic 0 docid grade` lines. Negative grades are stored as 0, grades
/// above 4 and non-integer grades are errors carrying the line number.
/// Topics are qualified as `topic_prefix/topic` when a prefix is given.
[[nodiscard]] auto parse_qrels(std::istream& in, const std::string& topic_prefix = {}) -> RelevanceJudgments;
[[nodiscard]] auto ingest_qrels(const std::filesystem::path& path, const std::string& topic_prefix = {})
    -> RelevanceJudgments;

/// Loads document text for every docid the corpus ranks from files in `dir`
/// named by docid (an extension is allowed). Ranked impressions whose clicked
/// documents are absent are flagged document-incomplete. Unreadable files are
/// skipped and reported through `warnings`.
[[nodiscard]] auto attach_documents(Corpus corpus, const std::filesystem::path& dir,
                                    std::vector<std::string>* warnings = nullptr) -> Corpus;

/// Recomputes document_incomplete flags against the current docstore.
void flag_incomplete_impressions(Corpus& corpus);

/// Concatenates corpora; provenance labels are joined with "; ".
/// Judgments and docstores are merged; session identifiers must stay unique.
[[nodiscard]] auto merge_corpora(std::vector<Corpus> parts) -> Corpus;

}  // namespace reform
