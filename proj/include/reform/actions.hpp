#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "reform/corpus.hpp"
#include "reform/report.hpp"
#include "reform/term_bag.hpp"

namespace reform {

/// Adjacent queries q_n -> q_{n+1} of one session.
struct QueryPair {
    std::size_t session_index = 0;
    std::string session_id;
    std::string dataset;
    /// Position n of the earlier query (1-based).
    int position = 0;
    TermSet qn;
    TermSet qn1;
    TermBag bag_n;
    TermBag bag_n1;
    TermSet retained;
    TermSet removed;
    /// A_{n+1} = Q_{n+1} \ Q_n
    TermSet added;
    bool involves_test_query = false;
};

struct TermActions {
    TermSet retained;
    TermSet removed;
    TermSet added;
};

[[nodiscard]] auto term_actions(const TermSet& qn, const TermSet& qn1) -> TermActions;

/// One pair per adjacent couple of queries, sessions in corpus order. Pairs
/// ending in a test query are kept only when `include_test_queries`.
[[nodiscard]] auto extract_pairs(const Corpus& corpus, bool include_test_queries = true) -> std::vector<QueryPair>;

/// Per-dataset and combined macro-averages of pair similarity and term-action
/// counts. Throws EmptyInputError on an empty pair list.
[[nodiscard]] auto pair_summary(const std::vector<QueryPair>& pairs) -> ReportTable;

/// Mean normalized query length at positions 1..L over sessions with exactly
/// L queries. Rows are positions; empty when no session has length L.
[[nodiscard]] auto length_by_position(const Corpus& corpus, int session_length) -> ReportTable;

/// Mean Jaccard and Cosine of the pairs at each position n <= max_position.
/// Positions without pairs are omitted.
[[nodiscard]] auto similarity_by_position(const std::vector<QueryPair>& pairs, int max_position = 9) -> ReportTable;

/// Mean cosine(q_x, q_n) for every requested x (rows) and n = 1..max_position
/// (columns), over the sessions holding both positions.
[[nodiscard]] auto fixed_query_similarity(const Corpus& corpus, const std::vector<int>& xs, int max_position = 9,
                                          bool include_test_queries = true) -> ReportTable;

}  // namespace reform
