#include "reform/corpus.hpp"

#include <algorithm>
#include <set>

#include "reform/errors.hpp"

namespace reform {

auto Impression::clicked(int rank) const -> bool
{
    return std::any_of(clicks.begin(), clicks.end(), [rank](const ClickEvent& c) { return c.rank == rank; });
}

auto Impression::clicked_ranks() const -> std::vector<int>
{
    std::set<int> ranks;
    for (const auto& c : clicks) {
        ranks.insert(c.rank);
    }
    return {ranks.begin(), ranks.end()};
}

auto Impression::last_click() const -> std::optional<int>
{
    if (clicks.empty()) {
        return std::nullopt;
    }
    return std::max_element(clicks.begin(), clicks.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; })
        ->rank;
}

auto Impression::dwell_at(int rank) const -> double
{
    double total = 0.0;
    for (const auto& c : clicks) {
        if (c.rank == rank) {
            total += c.dwell();
        }
    }
    return total;
}

void RelevanceJudgments::set(const std::string& topic, const std::string& docid, int grade)
{
    if (grade > 4) {
        throw IngestError("relevance grade " + std::to_string(grade) + " above 4 for topic " + topic + ", document "
                          + docid);
    }
    grades_[topic][docid] = std::max(grade, 0);
}

auto RelevanceJudgments::grade(const std::string& topic, const std::string& docid) const -> int
{
    auto t = grades_.find(topic);
    if (t == grades_.end()) {
        return 0;
    }
    auto d = t->second.find(docid);
    return d == t->second.end() ? 0 : d->second;
}

auto RelevanceJudgments::has_topic(const std::string& topic) const -> bool { return grades_.count(topic) != 0; }

auto RelevanceJudgments::pool(const std::string& topic) const -> std::vector<int>
{
    std::vector<int> out;
    if (auto t = grades_.find(topic); t != grades_.end()) {
        for (const auto& [doc, g] : t->second) {
            out.push_back(g);
        }
    }
    return out;
}

auto RelevanceJudgments::relevant_count(const std::string& topic) const -> std::size_t
{
    auto grades = pool(topic);
    return static_cast<std::size_t>(std::count_if(grades.begin(), grades.end(), [](int g) { return g > 0; }));
}

auto RelevanceJudgments::size() const -> std::size_t
{
    std::size_t n = 0;
    for (const auto& [topic, docs] : grades_) {
        n += docs.size();
    }
    return n;
}

void Corpus::validate() const
{
    std::set<std::string> ids;
    for (const auto& session : sessions) {
        if (!ids.insert(session.id).second) {
            throw IngestError("duplicate session id " + session.id);
        }
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            const auto& imp = session.impressions[i];
            auto where = "session " + session.id + ", impression " + std::to_string(i + 1);
            if (imp.position != static_cast<int>(i) + 1) {
                throw IngestError(where + ": positions must run 1..N");
            }
            for (std::size_t r = 0; r < imp.results.size(); ++r) {
                if (imp.results[r].rank != static_cast<int>(r) + 1) {
                    throw IngestError(where + ": result ranks must run 1..M without gaps");
                }
            }
            for (const auto& click : imp.clicks) {
                if (click.rank < 1 || click.rank > static_cast<int>(imp.results.size())) {
                    throw IngestError(where + ": click on rank " + std::to_string(click.rank)
                                      + " outside the ranking");
                }
                if (click.dwell() < 0.0) {
                    throw IngestError(where + ": click ends before it starts");
                }
            }
        }
        if (session.has_test_query) {
            if (session.impressions.empty() || session.impressions.back().ranked()
                || !session.impressions.back().clicks.empty()) {
                throw IngestError("session " + session.id + ": test query must have no results or clicks");
            }
        }
    }
}

}  // namespace reform
