#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reform/term_bag.hpp"
#include "reform/textnorm.hpp"

namespace reform {

/// One ranked result as displayed: the snippet title is joined onto the
/// snippet text for term extraction.
struct SnippetEntry {
    int rank = 0;
    std::string url;
    std::string docid;
    std::string title;
    std::string snippet;
    /// normalize(title + " " + snippet)
    TermBag terms;

    auto operator==(const SnippetEntry&) const -> bool = default;
};

struct ClickEvent {
    int rank = 0;
    /// Position in the impression's click sequence, starting at 1.
    int order = 0;
    /// Seconds from session start.
    double start_time = 0.0;
    double end_time = 0.0;

    [[nodiscard]] auto dwell() const noexcept -> double { return end_time - start_time; }
    auto operator==(const ClickEvent&) const -> bool = default;
};

struct Impression {
    int position = 0;
    std::string raw_query;
    TermBag query_terms;
    std::vector<SnippetEntry> results;
    std::vector<ClickEvent> clicks;
    /// Set by attach_documents when a clicked document has no text.
    bool document_incomplete = false;

    [[nodiscard]] auto ranked() const noexcept -> bool { return !results.empty(); }
    [[nodiscard]] auto size() const noexcept -> std::size_t { return results.size(); }
    [[nodiscard]] auto clicked(int rank) const -> bool;
    /// Distinct clicked ranks, ascending.
    [[nodiscard]] auto clicked_ranks() const -> std::vector<int>;
    /// Largest clicked rank; nullopt without clicks.
    [[nodiscard]] auto last_click() const -> std::optional<int>;
    /// Total dwell over all clicks on `rank`.
    [[nodiscard]] auto dwell_at(int rank) const -> double;
    [[nodiscard]] auto result(int rank) const -> const SnippetEntry& { return results.at(static_cast<std::size_t>(rank - 1)); }

    auto operator==(const Impression&) const -> bool = default;
};

struct Session {
    std::string id;
    /// Label of the source log (e.g. the file stem), used for per-dataset columns.
    std::string dataset;
    std::optional<std::string> topic_id;
    /// Positions 1..N in order.
    std::vector<Impression> impressions;
    /// The final query carries no ranking.
    bool has_test_query = false;

    [[nodiscard]] auto is_test_query(std::size_t index) const noexcept -> bool
    {
        return has_test_query && index + 1 == impressions.size();
    }
    auto operator==(const Session&) const -> bool = default;
};

/// Graded judgments keyed by (topic, docid); grades clamped to [0, 4].
/// Unjudged pairs read as grade 0.
class RelevanceJudgments {
  public:
    /// Stores `grade`, clamping negatives to 0. Grades above 4 are an IngestError.
    void set(const std::string& topic, const std::string& docid, int grade);
    [[nodiscard]] auto grade(const std::string& topic, const std::string& docid) const -> int;
    [[nodiscard]] auto has_topic(const std::string& topic) const -> bool;
    /// Every judged grade of the topic.
    [[nodiscard]] auto pool(const std::string& topic) const -> std::vector<int>;
    /// Number of judged documents with grade > 0.
    [[nodiscard]] auto relevant_count(const std::string& topic) const -> std::size_t;
    [[nodiscard]] auto size() const -> std::size_t;
    [[nodiscard]] auto topics() const -> const std::map<std::string, std::map<std::string, int>>& { return grades_; }

    auto operator==(const RelevanceJudgments&) const -> bool = default;

  private:
    std::map<std::string, std::map<std::string, int>> grades_;
};

using DocumentStore = std::map<std::string, std::string>;

struct Corpus {
    std::vector<Session> sessions;
    std::optional<RelevanceJudgments> qrels;
    std::optional<DocumentStore> docstore;
    std::string provenance;
    NormalizationConfig normalization;

    /// Throws IngestError on the first violated data-model invariant.
    void validate() const;

    auto operator==(const Corpus&) const -> bool = default;
};

}  // namespace reform
