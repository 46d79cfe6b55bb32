#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reform/actions.hpp"
#include "reform/corpus.hpp"
#include "reform/report.hpp"
#include "reform/similarity.hpp"

namespace reform {

/// What to do with a clicked document whose text is missing.
enum class DocstorePolicy {
    Drop,   ///< the impression is excluded from document-based results
    Empty,  ///< the document counts as an instance without terms
};

/// Normalized term bags of the docstore's documents (visible text only),
/// computed once per corpus.
class DocumentBags {
  public:
    /// No documents available.
    DocumentBags() = default;
    explicit DocumentBags(const Corpus& corpus);

    /// True when the corpus carried a docstore, even an empty one.
    [[nodiscard]] auto available() const noexcept -> bool { return available_; }
    [[nodiscard]] auto find(std::string_view docid) const -> const TermBag*;

  private:
    bool available_ = false;
    std::map<std::string, TermBag, std::less<>> bags_;
};

/// The instances of one source kind in one impression.
struct TermSourceView {
    SourceKind kind = SourceKind::AllSnippets;
    std::vector<TermBag> instances;
    /// False when a clicked document was missing under DocstorePolicy::Drop.
    bool complete = true;

    [[nodiscard]] auto merged() const -> TermBag;
    [[nodiscard]] auto terms() const -> TermSet;
};

/// Instances of `kind` in `imp`. Snippets and documents are split by whether
/// any click references their rank; Impression is a single instance joining
/// every snippet and every clicked document (the query itself excluded).
/// Document kinds without a docstore raise MissingDocstoreError; Historical
/// needs the session and is served by historical_terms.
[[nodiscard]] auto extract_source(const Impression& imp, SourceKind kind, const DocumentBags& docs,
                                  DocstorePolicy policy = DocstorePolicy::Drop) -> TermSourceView;

/// Snippets plus clicked documents of `imp`; snippets only without a docstore.
[[nodiscard]] auto impression_bag(const Impression& imp, const DocumentBags& docs) -> TermBag;

/// H_n: count-summed impression bags of positions 1..n (test query skipped).
[[nodiscard]] auto historical_terms(const Session& session, std::size_t n, const DocumentBags& docs) -> TermBag;

struct AnalysisOptions {
    ScoringParams scoring;
    DocstorePolicy policy = DocstorePolicy::Drop;
};

/// Corpus plus derived document bags and lazily built collection statistics.
/// Not safe for concurrent first use of stats().
class SourceContext {
  public:
    explicit SourceContext(const Corpus& corpus, AnalysisOptions options = {});

    [[nodiscard]] auto corpus() const noexcept -> const Corpus& { return *corpus_; }
    [[nodiscard]] auto documents() const noexcept -> const DocumentBags& { return docs_; }
    [[nodiscard]] auto options() const noexcept -> const AnalysisOptions& { return options_; }
    [[nodiscard]] auto stats(SourceKind kind) const -> const CollectionStats&;
    /// The impression q_n of a pair.
    [[nodiscard]] auto predecessor(const QueryPair& pair) const -> const Impression&;
    [[nodiscard]] auto successor(const QueryPair& pair) const -> const Impression&;

  private:
    const Corpus* corpus_;
    AnalysisOptions options_;
    DocumentBags docs_;
    mutable std::map<SourceKind, CollectionStats> stats_;
};

struct SimilarityScores {
    double jaccard = 0.0;
    double cosine = 0.0;
    double bm25 = 0.0;
};

/// Similarity of the pair's added terms with one source instance; all zero
/// when nothing was added.
[[nodiscard]] auto score_added(const QueryPair& pair, const TermBag& instance, const CollectionStats& stats,
                               const ScoringParams& params) -> SimilarityScores;

/// Added terms against snippets of ranks 1..k for k = 1..k_max (clamped to
/// M), averaged per snippet and then per pair. Pairs whose q_n has no ranking
/// are skipped.
[[nodiscard]] auto rank_prefix_similarity(const std::vector<QueryPair>& pairs, const SourceContext& ctx, int k_max)
    -> ReportTable;

/// Same averaging with prefixes ending at LC-1, LC, LC+1, LC+2 and M.
/// Impressions without clicks contribute all M snippets to every column.
[[nodiscard]] auto last_click_similarity(const std::vector<QueryPair>& pairs, const SourceContext& ctx)
    -> ReportTable;

/// Added terms against each click-differentiated source, with Welch tests of
/// clicked snippets against non-clicked and all snippets, and of clicked
/// documents against non-clicked and all documents (flag: both p < 0.01).
/// Without a docstore the document rows are omitted with a footnote.
[[nodiscard]] auto source_comparison(const std::vector<QueryPair>& pairs, const SourceContext& ctx) -> ReportTable;

/// Mean TF-IDF cosine of added terms with the clicked documents whose summed
/// dwell reaches each threshold. Thresholds with no surviving pair are omitted.
[[nodiscard]] auto dwell_threshold_curve(const std::vector<QueryPair>& pairs, const SourceContext& ctx,
                                         const std::vector<double>& thresholds) -> ReportTable;

/// Mean summed dwell per clicked document and the share reaching 30 s.
[[nodiscard]] auto dwell_summary(const Corpus& corpus) -> ReportTable;

[[nodiscard]] auto default_dwell_thresholds() -> std::vector<double>;

}  // namespace reform
