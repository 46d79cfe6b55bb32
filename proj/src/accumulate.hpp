#pragma once

#include <cstddef>
#include <optional>

#include "reform/report.hpp"

namespace reform::detail {

struct Mean {
    double sum = 0.0;
    std::size_t count = 0;

    void add(double x)
    {
        sum += x;
        ++count;
    }
    [[nodiscard]] auto value() const -> std::optional<double>
    {
        if (count == 0) {
            return std::nullopt;
        }
        return sum / static_cast<double>(count);
    }
    /// Cell holding the mean and its population; NA when empty.
    [[nodiscard]] auto cell() const -> Cell
    {
        Cell c;
        c.value = value();
        c.population = count;
        return c;
    }
};

}  // namespace reform::detail
