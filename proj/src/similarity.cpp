#include "reform/similarity.hpp"

#include <cmath>
#include <numeric>

#include "reform/errors.hpp"
#include "reform/sources.hpp"

namespace reform {

auto to_string(SourceKind kind) -> std::string_view
{
    switch (kind) {
    case SourceKind::AllSnippets:
        return "all-snippets";
    case SourceKind::ClickedSnippets:
        return "clicked-snippets";
    case SourceKind::NonClickedSnippets:
        return "non-clicked-snippets";
    case SourceKind::AllDocuments:
        return "all-documents";
    case SourceKind::ClickedDocuments:
        return "clicked-documents";
    case SourceKind::NonClickedDocuments:
        return "non-clicked-documents";
    case SourceKind::Impression:
        return "impression";
    case SourceKind::Historical:
        return "historical";
    }
    return "unknown";
}

auto is_document_kind(SourceKind kind) noexcept -> bool
{
    return kind == SourceKind::AllDocuments || kind == SourceKind::ClickedDocuments
        || kind == SourceKind::NonClickedDocuments;
}

auto CollectionStats::from_instances(SourceKind kind, std::span<const TermBag> instances) -> CollectionStats
{
    CollectionStats stats;
    stats.kind = kind;
    stats.document_count = instances.size();
    std::size_t total = 0;
    for (const auto& bag : instances) {
        total += bag.length();
        for (const auto& [term, n] : bag.counts()) {
            ++stats.df[term];
        }
    }
    if (!instances.empty()) {
        stats.avgdl = static_cast<double>(total) / static_cast<double>(instances.size());
    }
    return stats;
}

auto CollectionStats::document_frequency(std::string_view term) const -> std::size_t
{
    auto it = df.find(term);
    return it == df.end() ? 0 : it->second;
}

auto CollectionStats::tfidf_idf(std::string_view term, TfidfIdf variant) const -> double
{
    auto n = document_frequency(term);
    if (n == 0) {
        return 0.0;
    }
    double ratio = static_cast<double>(document_count) / static_cast<double>(n);
    return variant == TfidfIdf::Plain ? std::log(ratio) : std::log1p(ratio);
}

auto CollectionStats::bm25_idf(std::string_view term, Bm25Idf variant) const -> double
{
    auto n = static_cast<double>(document_frequency(term));
    double ratio = (static_cast<double>(document_count) - n + 0.5) / (n + 0.5);
    return variant == Bm25Idf::NonNegative ? std::log1p(ratio) : std::log(ratio);
}

auto jaccard(const TermSet& a, const TermSet& b) -> double
{
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t common = 0;
    for (const auto& t : a) {
        common += b.count(t);
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

auto jaccard(const TermBag& a, const TermBag& b) -> double
{
    return jaccard(a.set(), b.set());
}

namespace {

/// Cosine of two weighted vectors given per-term weight functions.
template <typename WeightA, typename WeightB>
auto weighted_cosine(const TermBag& a, const TermBag& b, WeightA wa, WeightB wb) -> double
{
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [term, n] : a.counts()) {
        double x = wa(term, n);
        na += x * x;
        if (auto m = b.count(term); m > 0) {
            dot += x * wb(term, m);
        }
    }
    for (const auto& [term, n] : b.counts()) {
        double y = wb(term, n);
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    // Rounding can push identical vectors a hair past 1.
    return std::min(1.0, dot / (std::sqrt(na) * std::sqrt(nb)));
}

}  // namespace

auto cosine_tf(const TermBag& a, const TermBag& b) -> double
{
    auto tf = [](std::string_view, std::uint32_t n) { return static_cast<double>(n); };
    return weighted_cosine(a, b, tf, tf);
}

auto cosine_tfidf(const TermBag& a, const TermBag& b, const CollectionStats& stats, TfidfIdf variant) -> double
{
    auto w = [&](std::string_view term, std::uint32_t n) { return n * stats.tfidf_idf(term, variant); };
    return weighted_cosine(a, b, w, w);
}

auto bm25(const TermSet& query, const TermBag& doc, const CollectionStats& stats, const ScoringParams& params)
    -> double
{
    if (stats.avgdl <= 0.0) {
        return 0.0;
    }
    double norm = params.k1 * (1.0 - params.b + params.b * static_cast<double>(doc.length()) / stats.avgdl);
    double score = 0.0;
    for (const auto& term : query) {
        auto tf = static_cast<double>(doc.count(term));
        if (tf == 0.0) {
            continue;
        }
        score += stats.bm25_idf(term, params.bm25_idf) * tf * (params.k1 + 1.0) / (tf + norm);
    }
    return score;
}

auto build_stats(const Corpus& corpus, SourceKind kind) -> CollectionStats
{
    if (is_document_kind(kind) && !corpus.docstore) {
        throw MissingDocstoreError("source kind '" + std::string(to_string(kind))
                                   + "' needs document text but the corpus has no docstore");
    }
    return build_stats(corpus, kind, DocumentBags(corpus));
}

auto build_stats(const Corpus& corpus, SourceKind kind, const DocumentBags& docs) -> CollectionStats
{
    if (is_document_kind(kind) && !docs.available()) {
        throw MissingDocstoreError("source kind '" + std::string(to_string(kind))
                                   + "' needs document text but the corpus has no docstore");
    }
    std::vector<TermBag> instances;
    for (const auto& session : corpus.sessions) {
        TermBag history;
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            const auto& imp = session.impressions[i];
            if (session.is_test_query(i) || !imp.ranked()) {
                continue;
            }
            if (kind == SourceKind::Historical) {
                history.merge(impression_bag(imp, docs));
                instances.push_back(history);
                continue;
            }
            // Statistics skip absent documents regardless of the analysis policy.
            auto view = extract_source(imp, kind, docs, DocstorePolicy::Drop);
            for (auto& bag : view.instances) {
                instances.push_back(std::move(bag));
            }
        }
    }
    return CollectionStats::from_instances(kind, instances);
}

}  // namespace reform
