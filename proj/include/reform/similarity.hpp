#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "reform/corpus.hpp"
#include "reform/term_bag.hpp"

namespace reform {

/// Click-differentiated pools of impression terms.
enum class SourceKind {
    AllSnippets,
    ClickedSnippets,
    NonClickedSnippets,
    AllDocuments,
    ClickedDocuments,
    NonClickedDocuments,
    Impression,
    Historical,
};

[[nodiscard]] auto to_string(SourceKind kind) -> std::string_view;
[[nodiscard]] auto is_document_kind(SourceKind kind) noexcept -> bool;

enum class TfidfIdf {
    Plain,   ///< ln(N / df)
    Smooth,  ///< ln(1 + N / df)
};

enum class Bm25Idf {
    NonNegative,  ///< ln(1 + (N - df + 0.5) / (df + 0.5))
    Robertson,    ///< ln((N - df + 0.5) / (df + 0.5)), may go negative
};

struct ScoringParams {
    double k1 = 1.2;
    double b = 0.75;
    TfidfIdf tfidf_idf = TfidfIdf::Plain;
    Bm25Idf bm25_idf = Bm25Idf::NonNegative;
};

/// Document frequencies over every instance of one source kind.
struct CollectionStats {
    SourceKind kind = SourceKind::AllSnippets;
    std::size_t document_count = 0;
    std::map<std::string, std::size_t, std::less<>> df;
    double avgdl = 0.0;

    [[nodiscard]] static auto from_instances(SourceKind kind, std::span<const TermBag> instances) -> CollectionStats;

    [[nodiscard]] auto document_frequency(std::string_view term) const -> std::size_t;
    /// 0 for terms absent from the collection.
    [[nodiscard]] auto tfidf_idf(std::string_view term, TfidfIdf variant = TfidfIdf::Plain) const -> double;
    [[nodiscard]] auto bm25_idf(std::string_view term, Bm25Idf variant = Bm25Idf::NonNegative) const -> double;
};

/// |A n B| / |A u B|; 1 when both sets are empty.
[[nodiscard]] auto jaccard(const TermSet& a, const TermSet& b) -> double;
/// Jaccard over the term sets of two bags.
[[nodiscard]] auto jaccard(const TermBag& a, const TermBag& b) -> double;

/// Cosine of raw term-frequency vectors; 0 when either bag is empty.
[[nodiscard]] auto cosine_tf(const TermBag& a, const TermBag& b) -> double;

/// Cosine of tf * idf vectors, idf from `stats`; 0 on a zero-norm vector.
[[nodiscard]] auto cosine_tfidf(const TermBag& a, const TermBag& b, const CollectionStats& stats,
                                TfidfIdf variant = TfidfIdf::Plain) -> double;

/// Okapi BM25 of a query term set against one document bag.
[[nodiscard]] auto bm25(const TermSet& query, const TermBag& doc, const CollectionStats& stats,
                        const ScoringParams& params = {}) -> double;

class DocumentBags;

/// Collection statistics for one source kind across the ranked impressions of
/// the corpus. Document kinds need a docstore (MissingDocstoreError otherwise).
[[nodiscard]] auto build_stats(const Corpus& corpus, SourceKind kind) -> CollectionStats;
[[nodiscard]] auto build_stats(const Corpus& corpus, SourceKind kind, const DocumentBags& docs) -> CollectionStats;

}  // namespace reform
