#include "reform/sources.hpp"

#include <algorithm>
#include <array>

#include "accumulate.hpp"
#include "reform/errors.hpp"
#include "reform/stattests.hpp"
#include "reform/textnorm.hpp"

namespace reform {

using detail::Mean;

DocumentBags::DocumentBags(const Corpus& corpus)
{
    if (!corpus.docstore) {
        return;
    }
    available_ = true;
    for (const auto& [docid, text] : *corpus.docstore) {
        bags_.emplace(docid, normalize(strip_html(text), corpus.normalization));
    }
}

auto DocumentBags::find(std::string_view docid) const -> const TermBag*
{
    auto it = bags_.find(docid);
    return it == bags_.end() ? nullptr : &it->second;
}

auto TermSourceView::merged() const -> TermBag
{
    TermBag out;
    for (const auto& bag : instances) {
        out.merge(bag);
    }
    return out;
}

auto TermSourceView::terms() const -> TermSet
{
    TermSet out;
    for (const auto& bag : instances) {
        for (const auto& [term, n] : bag.counts()) {
            out.insert(term);
        }
    }
    return out;
}

namespace {

void require_documents(SourceKind kind, const DocumentBags& docs)
{
    if (!docs.available()) {
        throw MissingDocstoreError("source kind '" + std::string(to_string(kind))
                                   + "' needs document text but the corpus has no docstore");
    }
}

/// True when every clicked document of `imp` has text.
auto clicked_documents_present(const Impression& imp, const DocumentBags& docs) -> bool
{
    return std::all_of(imp.results.begin(), imp.results.end(), [&](const SnippetEntry& r) {
        return !imp.clicked(r.rank) || docs.find(r.docid) != nullptr;
    });
}

}  // namespace

auto extract_source(const Impression& imp, SourceKind kind, const DocumentBags& docs, DocstorePolicy policy)
    -> TermSourceView
{
    TermSourceView view;
    view.kind = kind;
    switch (kind) {
    case SourceKind::AllSnippets:
    case SourceKind::ClickedSnippets:
    case SourceKind::NonClickedSnippets:
        for (const auto& r : imp.results) {
            bool clicked = imp.clicked(r.rank);
            if (kind == SourceKind::AllSnippets || clicked == (kind == SourceKind::ClickedSnippets)) {
                view.instances.push_back(r.terms);
            }
        }
        break;
    case SourceKind::AllDocuments:
    case SourceKind::ClickedDocuments:
    case SourceKind::NonClickedDocuments:
        require_documents(kind, docs);
        for (const auto& r : imp.results) {
            bool clicked = imp.clicked(r.rank);
            if (kind != SourceKind::AllDocuments && clicked != (kind == SourceKind::ClickedDocuments)) {
                continue;
            }
            if (const auto* bag = docs.find(r.docid)) {
                view.instances.push_back(*bag);
            } else if (clicked && policy == DocstorePolicy::Empty) {
                view.instances.emplace_back();
            } else if (clicked) {
                view.complete = false;
            }
        }
        break;
    case SourceKind::Impression:
        view.instances.push_back(impression_bag(imp, docs));
        view.complete = !docs.available() || policy == DocstorePolicy::Empty || clicked_documents_present(imp, docs);
        break;
    case SourceKind::Historical:
        throw Error("historical terms depend on the session; use historical_terms");
    }
    return view;
}

auto impression_bag(const Impression& imp, const DocumentBags& docs) -> TermBag
{
    TermBag bag;
    for (const auto& r : imp.results) {
        bag.merge(r.terms);
        if (docs.available() && imp.clicked(r.rank)) {
            if (const auto* doc = docs.find(r.docid)) {
                bag.merge(*doc);
            }
        }
    }
    return bag;
}

auto historical_terms(const Session& session, std::size_t n, const DocumentBags& docs) -> TermBag
{
    TermBag bag;
    for (std::size_t i = 0; i < n && i < session.impressions.size(); ++i) {
        if (!session.is_test_query(i)) {
            bag.merge(impression_bag(session.impressions[i], docs));
        }
    }
    return bag;
}

SourceContext::SourceContext(const Corpus& corpus, AnalysisOptions options)
    : corpus_(&corpus), options_(options), docs_(corpus)
{
}

auto SourceContext::stats(SourceKind kind) const -> const CollectionStats&
{
    auto it = stats_.find(kind);
    if (it == stats_.end()) {
        it = stats_.emplace(kind, build_stats(*corpus_, kind, docs_)).first;
    }
    return it->second;
}

auto SourceContext::predecessor(const QueryPair& pair) const -> const Impression&
{
    return corpus_->sessions.at(pair.session_index).impressions.at(static_cast<std::size_t>(pair.position - 1));
}

auto SourceContext::successor(const QueryPair& pair) const -> const Impression&
{
    return corpus_->sessions.at(pair.session_index).impressions.at(static_cast<std::size_t>(pair.position));
}

auto score_added(const QueryPair& pair, const TermBag& instance, const CollectionStats& stats,
                 const ScoringParams& params) -> SimilarityScores
{
    if (pair.added.empty()) {
        return {};
    }
    SimilarityScores s;
    s.jaccard = jaccard(pair.added, instance.set());
    s.cosine = cosine_tfidf(pair.bag_n1.restricted_to(pair.added), instance, stats, params.tfidf_idf);
    s.bm25 = bm25(pair.added, instance, stats, params);
    return s;
}

namespace {

const std::array<std::string, 3> kMeasures{"Jaccard", "Cosine", "BM25"};

/// Per-snippet means over ranks 1..k of one impression.
auto prefix_scores(const QueryPair& pair, const Impression& imp, int k, const CollectionStats& stats,
                   const ScoringParams& params) -> std::array<double, 4>
{
    std::array<double, 4> sum{};
    int upto = std::clamp(k, 1, static_cast<int>(imp.size()));
    for (int r = 1; r <= upto; ++r) {
        const auto& snippet = imp.result(r).terms;
        auto s = score_added(pair, snippet, stats, params);
        sum[0] += s.jaccard;
        sum[1] += s.cosine;
        sum[2] += s.bm25;
        sum[3] += static_cast<double>(snippet.length());
    }
    for (auto& x : sum) {
        x /= upto;
    }
    return sum;
}

/// Fills a measure-by-column table from per-column prefix lengths.
template <typename PrefixFn>
auto prefix_table(const std::vector<QueryPair>& pairs, const SourceContext& ctx, std::string name, std::string title,
                  const std::vector<std::string>& columns, PrefixFn prefix) -> ReportTable
{
    std::vector<std::string> rows(kMeasures.begin(), kMeasures.end());
    rows.emplace_back("# terms");
    ReportTable table(std::move(name), std::move(title), rows, columns);
    std::vector<std::array<Mean, 4>> acc(columns.size());
    const auto& stats = ctx.stats(SourceKind::AllSnippets);
    for (const auto& pair : pairs) {
        const auto& imp = ctx.predecessor(pair);
        if (!imp.ranked()) {
            continue;
        }
        for (std::size_t c = 0; c < columns.size(); ++c) {
            auto scores = prefix_scores(pair, imp, prefix(imp, c), stats, ctx.options().scoring);
            for (std::size_t m = 0; m < 4; ++m) {
                acc[c][m].add(scores[m]);
            }
        }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (std::size_t m = 0; m < 4; ++m) {
            table.at(rows[m], columns[c]) = acc[c][m].cell();
        }
    }
    return table;
}

struct RowSamples {
    std::array<std::vector<double>, 3> measures;
    Mean length;
};

}  // namespace

auto rank_prefix_similarity(const std::vector<QueryPair>& pairs, const SourceContext& ctx, int k_max) -> ReportTable
{
    if (k_max < 1) {
        throw std::invalid_argument("k_max must be at least 1");
    }
    std::vector<std::string> columns;
    for (int k = 1; k <= k_max; ++k) {
        columns.push_back(std::to_string(k));
    }
    return prefix_table(pairs, ctx, "rank_prefix_similarity", "Added terms vs snippets up to rank k", columns,
                        [](const Impression&, std::size_t c) { return static_cast<int>(c) + 1; });
}

auto last_click_similarity(const std::vector<QueryPair>& pairs, const SourceContext& ctx) -> ReportTable
{
    static const std::vector<std::string> columns{"LC-1", "LC", "LC+1", "LC+2", "M"};
    return prefix_table(pairs, ctx, "last_click_similarity", "Added terms vs snippets up to and around the last click",
                        columns, [](const Impression& imp, std::size_t c) {
                            auto m = static_cast<int>(imp.size());
                            auto lc = imp.last_click();
                            if (!lc || c == 4) {
                                return m;
                            }
                            return *lc - 1 + static_cast<int>(c);
                        });
}

auto source_comparison(const std::vector<QueryPair>& pairs, const SourceContext& ctx) -> ReportTable
{
    struct RowSpec {
        std::string label;
        SourceKind kind;
    };
    const std::vector<RowSpec> specs{
        {"s(M)", SourceKind::AllSnippets},      {"cs", SourceKind::ClickedSnippets},
        {"ncs", SourceKind::NonClickedSnippets}, {"ad", SourceKind::AllDocuments},
        {"cd", SourceKind::ClickedDocuments},    {"ncd", SourceKind::NonClickedDocuments},
        {"impression", SourceKind::Impression}, {"historical", SourceKind::Historical},
    };
    const auto& docs = ctx.documents();
    auto policy = ctx.options().policy;
    std::vector<std::string> rows;
    for (const auto& spec : specs) {
        if (!is_document_kind(spec.kind) || docs.available()) {
            rows.push_back(spec.label);
        }
    }
    std::vector<std::string> columns{"# terms"};
    columns.insert(columns.end(), kMeasures.begin(), kMeasures.end());
    ReportTable table("source_comparison", "Added terms vs click-differentiated term sources", rows, columns);
    if (!docs.available()) {
        table.footnotes.emplace_back("no docstore attached: document rows omitted, impression and historical rows "
                                     "use snippets only");
    }

    std::map<std::string, RowSamples> samples;
    for (const auto& pair : pairs) {
        const auto& imp = ctx.predecessor(pair);
        if (!imp.ranked()) {
            continue;
        }
        const auto& session = ctx.corpus().sessions[pair.session_index];
        for (const auto& spec : specs) {
            if (is_document_kind(spec.kind) && !docs.available()) {
                continue;
            }
            TermSourceView view;
            if (spec.kind == SourceKind::Historical) {
                view.kind = spec.kind;
                view.instances.push_back(historical_terms(session, static_cast<std::size_t>(pair.position), docs));
                if (docs.available() && policy == DocstorePolicy::Drop) {
                    for (int n = 0; n < pair.position; ++n) {
                        view.complete = view.complete
                            && clicked_documents_present(session.impressions[static_cast<std::size_t>(n)], docs);
                    }
                }
            } else {
                view = extract_source(imp, spec.kind, docs, policy);
            }
            if (!view.complete || view.instances.empty()) {
                continue;
            }
            const auto& stats = ctx.stats(spec.kind);
            std::array<double, 3> sum{};
            double length = 0.0;
            for (const auto& bag : view.instances) {
                auto s = score_added(pair, bag, stats, ctx.options().scoring);
                sum[0] += s.jaccard;
                sum[1] += s.cosine;
                sum[2] += s.bm25;
                length += static_cast<double>(bag.length());
            }
            auto count = static_cast<double>(view.instances.size());
            auto& row = samples[spec.label];
            for (std::size_t m = 0; m < 3; ++m) {
                row.measures[m].push_back(sum[m] / count);
            }
            row.length.add(length / count);
        }
    }

    for (const auto& label : rows) {
        const auto& row = samples[label];
        table.at(label, "# terms") = row.length.cell();
        for (std::size_t m = 0; m < 3; ++m) {
            Mean mean;
            for (double x : row.measures[m]) {
                mean.add(x);
            }
            table.at(label, kMeasures[m]) = mean.cell();
        }
    }

    // A clicked source is flagged when it differs from both comparators.
    auto flag = [&](const std::string& target, const std::string& a, const std::string& b) {
        if (!table.has_row(target)) {
            return;
        }
        for (std::size_t m = 0; m < 3; ++m) {
            auto& cell = table.at(target, kMeasures[m]);
            auto ta = welch_t(samples[target].measures[m], samples[a].measures[m]);
            auto tb = welch_t(samples[target].measures[m], samples[b].measures[m]);
            if (!ta || !tb) {
                cell.note = "test n/a";
                continue;
            }
            cell.p_value = std::max(ta->p_value, tb->p_value);
            cell.significant = *cell.p_value < 0.01;
        }
    };
    flag("cs", "ncs", "s(M)");
    flag("cd", "ncd", "ad");
    table.footnotes.emplace_back("significance: Welch's t-test, p < 0.01 against both comparators (cs vs ncs and "
                                 "s(M); cd vs ncd and ad); p_value is the larger of the two");
    return table;
}

auto dwell_threshold_curve(const std::vector<QueryPair>& pairs, const SourceContext& ctx,
                           const std::vector<double>& thresholds) -> ReportTable
{
    const auto& docs = ctx.documents();
    require_documents(SourceKind::ClickedDocuments, docs);
    const auto& stats = ctx.stats(SourceKind::ClickedDocuments);
    auto policy = ctx.options().policy;
    ReportTable table("dwell_threshold_curve", "Added terms vs clicked documents above a dwell threshold", {},
                      {"Cosine", "documents"});
    for (double tau : thresholds) {
        Mean mean;
        std::size_t surviving = 0;
        for (const auto& pair : pairs) {
            const auto& imp = ctx.predecessor(pair);
            if (!imp.ranked() || (policy == DocstorePolicy::Drop && !clicked_documents_present(imp, docs))) {
                continue;
            }
            auto added = pair.bag_n1.restricted_to(pair.added);
            double sum = 0.0;
            std::size_t n = 0;
            for (int rank : imp.clicked_ranks()) {
                if (imp.dwell_at(rank) < tau) {
                    continue;
                }
                const auto* bag = docs.find(imp.result(rank).docid);
                sum += bag == nullptr ? 0.0 : cosine_tfidf(added, *bag, stats, ctx.options().scoring.tfidf_idf);
                ++n;
            }
            if (n > 0) {
                mean.add(pair.added.empty() ? 0.0 : sum / static_cast<double>(n));
                surviving += n;
            }
        }
        if (mean.count == 0) {
            continue;
        }
        auto label = format_number(tau);
        table.add_row(label);
        table.at(label, "Cosine") = mean.cell();
        auto& docs_cell = table.at(label, "documents");
        docs_cell.value = static_cast<double>(surviving);
        docs_cell.population = mean.count;
    }
    return table;
}

auto dwell_summary(const Corpus& corpus) -> ReportTable
{
    Mean dwell;
    Mean sat;
    for (const auto& session : corpus.sessions) {
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            const auto& imp = session.impressions[i];
            if (session.is_test_query(i)) {
                continue;
            }
            for (int rank : imp.clicked_ranks()) {
                double d = imp.dwell_at(rank);
                dwell.add(d);
                sat.add(d >= 30.0 ? 1.0 : 0.0);
            }
        }
    }
    ReportTable table("dwell_summary", "Dwell time of clicked documents (summed per document)",
                      {"mean dwell (s)", "share with dwell >= 30 s"}, {"value"});
    table.at("mean dwell (s)", "value") = dwell.cell();
    table.at("share with dwell >= 30 s", "value") = sat.cell();
    return table;
}

auto default_dwell_thresholds() -> std::vector<double>
{
    std::vector<double> out;
    for (int t = 0; t <= 60; t += 5) {
        out.push_back(t);
    }
    return out;
}

}  // namespace reform
