#pragma once

#include "pdv/engine.hpp"

#include <cassert>

namespace pdv {

// Explicit table Lagrangian over index-valued X and Y; the oracle-mode
// workhorse for desk-scale experiments. Joins and strata are optional and
// configured per instance; witness checks scan in index order, which keeps
// counter selection deterministic for any seed.
class FiniteLagrangian {
public:
    using X = int;
    using Y = int;

    std::vector<std::vector<int>> table; // table[x][y]
    std::vector<int> range = {-1, 0, 1};
    std::function<int(int, int)> joiner_x; // optional
    std::function<int(int, int)> joiner_y; // optional
    std::vector<int> strata_y;             // optional, per y index
    bool enumeration_enabled = true;
    bool smallest_stratum = false;
    int start_x = 0;
    int start_y = 0;

    size_t x_size() const { return table.size(); }
    size_t y_size() const { return table.empty() ? 0 : table[0].size(); }

    Outcome evaluate(int x, int y) const {
        assert(x >= 0 && static_cast<size_t>(x) < x_size());
        assert(y >= 0 && static_cast<size_t>(y) < y_size());
        return Outcome{table[x][y], range};
    }

    DualCheckResult<int> dual_witness_check(int beta) const {
        for (size_t x = 0; x < x_size(); ++x) {
            if (table[x][beta] < 0) { return CounterPrimal<int>{static_cast<int>(x)}; }
        }
        return DualOk{};
    }

    PrimalCheckResult<int> primal_witness_check(int alpha) const {
        std::optional<int> best;
        for (size_t y = 0; y < y_size(); ++y) {
            if (table[alpha][y] > 0) {
                if (!smallest_stratum) { return CounterDual<int>{static_cast<int>(y)}; }
                if (!best || stratum_y(static_cast<int>(y)) < stratum_y(*best)) {
                    best = static_cast<int>(y);
                }
            }
        }
        if (best) { return CounterDual<int>{*best}; }
        return PrimalOk{};
    }

    int initial_x() const { return start_x; }
    int initial_y() const { return start_y; }

    int join_x(int a, int b) const { return joiner_x ? joiner_x(a, b) : b; }
    int join_y(int a, int b) const { return joiner_y ? joiner_y(a, b) : b; }
    bool has_join_x() const { return static_cast<bool>(joiner_x); }
    bool has_join_y() const { return static_cast<bool>(joiner_y); }

    int stratum_y(int y) const { return strata_y.empty() ? 0 : strata_y.at(y); }
    bool has_stratum_y() const { return !strata_y.empty(); }

    bool can_enumerate() const { return enumeration_enabled; }
    std::vector<int> enumerate_x() const {
        std::vector<int> v(x_size());
        for (size_t i = 0; i < v.size(); ++i) { v[i] = static_cast<int>(i); }
        return v;
    }
    std::vector<int> enumerate_y() const {
        std::vector<int> v(y_size());
        for (size_t i = 0; i < v.size(); ++i) { v[i] = static_cast<int>(i); }
        return v;
    }

    std::string describe_x(int x) const { return "x" + std::to_string(x); }
    std::string describe_y(int y) const { return "y" + std::to_string(y); }
};

static_assert(LagrangianInstance<FiniteLagrangian>);
static_assert(HasEnumerators<FiniteLagrangian>);

} // namespace pdv
