#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace reform {

using TermSet = std::set<std::string, std::less<>>;

/// Bag of normalized terms: term -> positive count, ordered by term.
class TermBag {
  public:
    using Counts = std::map<std::string, std::uint32_t, std::less<>>;

    TermBag() = default;

    /// Adds `count` occurrences of `term`; a zero count is a no-op.
    void add(std::string_view term, std::uint32_t count = 1);
    void merge(const TermBag& other);

    [[nodiscard]] auto count(std::string_view term) const -> std::uint32_t;
    [[nodiscard]] auto contains(std::string_view term) const -> bool;
    /// Sum of counts.
    [[nodiscard]] auto length() const noexcept -> std::size_t { return length_; }
    [[nodiscard]] auto distinct() const noexcept -> std::size_t { return counts_.size(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return counts_.empty(); }
    [[nodiscard]] auto set() const -> TermSet;
    [[nodiscard]] auto counts() const noexcept -> const Counts& { return counts_; }

    /// Bag restricted to the terms of `keep`, counts preserved.
    [[nodiscard]] auto restricted_to(const TermSet& keep) const -> TermBag;

    auto operator==(const TermBag& other) const -> bool = default;

  private:
    Counts counts_;
    std::size_t length_ = 0;
};

[[nodiscard]] auto set_intersection(const TermSet& a, const TermSet& b) -> TermSet;
[[nodiscard]] auto set_difference(const TermSet& a, const TermSet& b) -> TermSet;

}  // namespace reform
