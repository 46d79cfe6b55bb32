#include "reform/term_bag.hpp"

#include <algorithm>
#include <iterator>

namespace reform {

void TermBag::add(std::string_view term, std::uint32_t count)
{
    if (count == 0) {
        return;
    }
    auto it = counts_.find(term);
    if (it == counts_.end()) {
        counts_.emplace(std::string(term), count);
    } else {
        it->second += count;
    }
    length_ += count;
}

void TermBag::merge(const TermBag& other)
{
    for (const auto& [term, n] : other.counts_) {
        add(term, n);
    }
}

auto TermBag::count(std::string_view term) const -> std::uint32_t
{
    auto it = counts_.find(term);
    return it == counts_.end() ? 0 : it->second;
}

auto TermBag::contains(std::string_view term) const -> bool { return counts_.find(term) != counts_.end(); }

auto TermBag::set() const -> TermSet
{
    TermSet out;
    for (const auto& [term, n] : counts_) {
        out.emplace_hint(out.end(), term);
    }
    return out;
}

auto TermBag::restricted_to(const TermSet& keep) const -> TermBag
{
    TermBag out;
    for (const auto& term : keep) {
        out.add(term, count(term));
    }
    return out;
}

auto set_intersection(const TermSet& a, const TermSet& b) -> TermSet
{
    TermSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

auto set_difference(const TermSet& a, const TermSet& b) -> TermSet
{
    TermSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

}  // namespace reform
