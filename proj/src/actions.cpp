#include "reform/actions.hpp"

#include <algorithm>
#include <map>

#include "accumulate.hpp"
#include "reform/errors.hpp"
#include "reform/similarity.hpp"

namespace reform {

using detail::Mean;

auto term_actions(const TermSet& qn, const TermSet& qn1) -> TermActions
{
    return {set_intersection(qn, qn1), set_difference(qn, qn1), set_difference(qn1, qn)};
}

auto extract_pairs(const Corpus& corpus, bool include_test_queries) -> std::vector<QueryPair>
{
    std::vector<QueryPair> pairs;
    for (std::size_t s = 0; s < corpus.sessions.size(); ++s) {
        const auto& session = corpus.sessions[s];
        for (std::size_t i = 0; i + 1 < session.impressions.size(); ++i) {
            bool test = session.is_test_query(i + 1);
            if (test && !include_test_queries) {
                continue;
            }
            const auto& a = session.impressions[i];
            const auto& b = session.impressions[i + 1];
            QueryPair p;
            p.session_index = s;
            p.session_id = session.id;
            p.dataset = session.dataset;
            p.position = a.position;
            p.bag_n = a.query_terms;
            p.bag_n1 = b.query_terms;
            p.qn = a.query_terms.set();
            p.qn1 = b.query_terms.set();
            auto actions = term_actions(p.qn, p.qn1);
            p.retained = std::move(actions.retained);
            p.removed = std::move(actions.removed);
            p.added = std::move(actions.added);
            p.involves_test_query = test;
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

auto pair_summary(const std::vector<QueryPair>& pairs) -> ReportTable
{
    if (pairs.empty()) {
        throw EmptyInputError("pair summary needs at least one query pair");
    }
    static const std::vector<std::string> rows{"Jaccard", "Cosine", "Retained", "Removed", "Added",
                                               "All terms kept", "|Qn|", "|Qn+1|", "Pairs"};
    std::vector<std::string> columns;
    for (const auto& p : pairs) {
        auto label = p.dataset.empty() ? std::string("default") : p.dataset;
        if (std::find(columns.begin(), columns.end(), label) == columns.end()) {
            columns.push_back(label);
        }
    }
    columns.emplace_back("Combined");
    std::map<std::string, std::array<Mean, 8>> acc;
    for (const auto& p : pairs) {
        std::array<double, 8> x{jaccard(p.qn, p.qn1),
                                cosine_tf(p.bag_n, p.bag_n1),
                                static_cast<double>(p.retained.size()),
                                static_cast<double>(p.removed.size()),
                                static_cast<double>(p.added.size()),
                                p.removed.empty() ? 1.0 : 0.0,
                                static_cast<double>(p.qn.size()),
                                static_cast<double>(p.qn1.size())};
        for (const auto& label : {p.dataset.empty() ? std::string("default") : p.dataset, std::string("Combined")}) {
            auto& slot = acc[label];
            for (std::size_t k = 0; k < x.size(); ++k) {
                slot[k].add(x[k]);
            }
        }
    }
    ReportTable table("pair_summary", "Query pair similarity and term actions (macro-averaged over pairs)", rows,
                      columns);
    for (const auto& column : columns) {
        const auto& slot = acc[column];
        for (std::size_t k = 0; k < slot.size(); ++k) {
            table.at(rows[k], column) = slot[k].cell();
        }
        auto& count = table.at("Pairs", column);
        count.value = static_cast<double>(slot[0].count);
        count.population = slot[0].count;
    }
    return table;
}

auto length_by_position(const Corpus& corpus, int session_length) -> ReportTable
{
    if (session_length < 2) {
        throw std::invalid_argument("session length must be at least 2");
    }
    std::vector<Mean> acc(static_cast<std::size_t>(session_length));
    for (const auto& session : corpus.sessions) {
        if (session.impressions.size() != static_cast<std::size_t>(session_length)) {
            continue;
        }
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            acc[i].add(static_cast<double>(session.impressions[i].query_terms.distinct()));
        }
    }
    ReportTable table("length_by_position_L" + std::to_string(session_length),
                      "Mean query length by position, sessions of " + std::to_string(session_length) + " queries", {},
                      {"mean length"});
    if (acc[0].count == 0) {
        return table;
    }
    for (std::size_t i = 0; i < acc.size(); ++i) {
        auto label = std::to_string(i + 1);
        table.add_row(label);
        table.at(label, "mean length") = acc[i].cell();
    }
    return table;
}

auto similarity_by_position(const std::vector<QueryPair>& pairs, int max_position) -> ReportTable
{
    std::map<int, std::pair<Mean, Mean>> acc;
    for (const auto& p : pairs) {
        if (p.position > max_position) {
            continue;
        }
        auto& [j, c] = acc[p.position];
        j.add(jaccard(p.qn, p.qn1));
        c.add(cosine_tf(p.bag_n, p.bag_n1));
    }
    ReportTable table("similarity_by_position", "Similarity of q_n -> q_n+1 by position n", {}, {"Jaccard", "Cosine"});
    for (const auto& [n, means] : acc) {
        auto label = std::to_string(n);
        table.add_row(label);
        table.at(label, "Jaccard") = means.first.cell();
        table.at(label, "Cosine") = means.second.cell();
    }
    return table;
}

auto fixed_query_similarity(const Corpus& corpus, const std::vector<int>& xs, int max_position,
                            bool include_test_queries) -> ReportTable
{
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    for (int x : xs) {
        if (x < 1) {
            throw std::invalid_argument("fixed query position must be >= 1");
        }
        rows.push_back("x=" + std::to_string(x));
    }
    for (int n = 1; n <= max_position; ++n) {
        columns.push_back(std::to_string(n));
    }
    ReportTable table("fixed_query_similarity", "Mean cosine of fixed query q_x with q_n", rows, columns);
    for (std::size_t r = 0; r < xs.size(); ++r) {
        auto x = static_cast<std::size_t>(xs[r]);
        for (int n = 1; n <= max_position; ++n) {
            Mean m;
            for (const auto& session : corpus.sessions) {
                auto usable = session.impressions.size();
                if (!include_test_queries && session.has_test_query) {
                    --usable;
                }
                auto un = static_cast<std::size_t>(n);
                if (x > usable || un > usable) {
                    continue;
                }
                m.add(cosine_tf(session.impressions[x - 1].query_terms, session.impressions[un - 1].query_terms));
            }
            table.at(rows[r], columns[static_cast<std::size_t>(n - 1)]) = m.cell();
        }
    }
    return table;
}

}  // namespace reform
