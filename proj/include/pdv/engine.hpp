#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pdv {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string const & m) : std::runtime_error("config error: " + m) {}
};

class OracleError : public std::runtime_error {
public:
    explicit OracleError(std::string const & m) : std::runtime_error("oracle error: " + m) {}
};

class NotEnumerable : public std::runtime_error {
public:
    NotEnumerable() : std::runtime_error("instance has no enumerators") {}
};

// Value in a declared finite totally-ordered codomain. The range always
// contains the threshold 0; checks compare against it.
struct Outcome {
    int value = 0;
    std::vector<int> range = {-1, 0, 1};

    void validate() const {
        if (!std::is_sorted(range.begin(), range.end())) {
            throw OracleError("outcome range not ascending");
        }
        if (!std::binary_search(range.begin(), range.end(), 0)) {
            throw OracleError("outcome range misses threshold 0");
        }
        if (!std::binary_search(range.begin(), range.end(), value)) {
            throw OracleError("outcome value outside declared range");
        }
    }
};

inline Outcome outcome_pm(int v) { return Outcome{v, {-1, 0, 1}}; }

struct DualOk {};
template <typename X> struct CounterPrimal { X delta; };
template <typename Y> struct CounterDual { Y gamma; };
struct PrimalOk {};

template <typename X> using DualCheckResult = std::variant<DualOk, CounterPrimal<X>>;
template <typename Y> using PrimalCheckResult = std::variant<PrimalOk, CounterDual<Y>>;

enum class Side { Primal, Dual };

struct EngineConfig {
    bool accumulate_x = false;
    bool accumulate_y = false;
    int max_iterations = 100;
    Side start_side = Side::Dual;
    bool smallest_stratum = false;
    std::uint64_t random_seed = 0;
};

// The pluggable Lagrangian: evaluation plus the two witness-check oracles.
// Joins, strata and enumerators are optional capabilities (detected below).
template <typename I>
concept LagrangianInstance = requires(I inst, typename I::X x, typename I::Y y) {
    { inst.evaluate(x, y) } -> std::convertible_to<Outcome>;
    { inst.dual_witness_check(y) } -> std::convertible_to<DualCheckResult<typename I::X>>;
    { inst.primal_witness_check(x) } -> std::convertible_to<PrimalCheckResult<typename I::Y>>;
    { inst.initial_x() } -> std::convertible_to<typename I::X>;
    { inst.initial_y() } -> std::convertible_to<typename I::Y>;
    { inst.describe_x(x) } -> std::convertible_to<std::string>;
    { inst.describe_y(y) } -> std::convertible_to<std::string>;
};

template <typename I>
concept HasJoinX = requires(I inst, typename I::X a, typename I::X b) {
    { inst.join_x(a, b) } -> std::convertible_to<typename I::X>;
};
template <typename I>
concept HasJoinY = requires(I inst, typename I::Y a, typename I::Y b) {
    { inst.join_y(a, b) } -> std::convertible_to<typename I::Y>;
};
template <typename I>
concept HasStratumY = requires(I inst, typename I::Y y) {
    { inst.stratum_y(y) } -> std::convertible_to<int>;
};
template <typename I>
concept HasEnumerators = requires(I inst) {
    { inst.enumerate_x() } -> std::convertible_to<std::vector<typename I::X>>;
    { inst.enumerate_y() } -> std::convertible_to<std::vector<typename I::Y>>;
};
template <typename I>
concept HasEnumerationFlag = requires(I inst) {
    { inst.can_enumerate() } -> std::convertible_to<bool>;
};
template <typename I>
concept HasJoinXFlag = requires(I inst) {
    { inst.has_join_x() } -> std::convertible_to<bool>;
};
template <typename I>
concept HasJoinYFlag = requires(I inst) {
    { inst.has_join_y() } -> std::convertible_to<bool>;
};
template <typename I>
concept HasStratumFlag = requires(I inst) {
    { inst.has_stratum_y() } -> std::convertible_to<bool>;
};

template <LagrangianInstance I> bool instance_has_join_x(I const & inst) {
    if constexpr (HasJoinXFlag<I>) {
        return inst.has_join_x();
    } else {
        return HasJoinX<I>;
    }
}
template <LagrangianInstance I> bool instance_has_join_y(I const & inst) {
    if constexpr (HasJoinYFlag<I>) {
        return inst.has_join_y();
    } else {
        return HasJoinY<I>;
    }
}
template <LagrangianInstance I> bool instance_has_stratum_y(I const & inst) {
    if constexpr (HasStratumFlag<I>) {
        return inst.has_stratum_y();
    } else {
        return HasStratumY<I>;
    }
}

// One loop turn: both candidates plus the counters and check outcomes seen.
template <typename X, typename Y> struct IterationRecord {
    int iter = 0;
    std::optional<X> alpha;
    std::optional<Y> beta;
    std::optional<X> delta;
    std::optional<Y> gamma;
    std::string dual_outcome;   // "pass" | "counter" | "" (not run)
    std::string primal_outcome; // likewise
};

template <typename X, typename Y> using IterationTrace = std::vector<IterationRecord<X, Y>>;

template <typename I> struct Verdict {
    enum class Kind { DualWitness, PrimalWitness, Budget };
    Kind kind = Kind::Budget;
    std::optional<typename I::X> alpha;
    std::optional<typename I::Y> beta;
    IterationTrace<typename I::X, typename I::Y> trace;

    bool is_dual() const { return kind == Kind::DualWitness; }
    bool is_primal() const { return kind == Kind::PrimalWitness; }
    bool is_budget() const { return kind == Kind::Budget; }
};

namespace detail {

template <LagrangianInstance I>
void check_counter_primal(I & inst, typename I::X const & delta, typename I::Y const & beta) {
    Outcome o = inst.evaluate(delta, beta);
    o.validate();
    if (o.value >= 0) { throw OracleError("dual check returned a non-counter delta"); }
}

template <LagrangianInstance I>
void check_counter_dual(I & inst, typename I::X const & alpha, typename I::Y const & gamma,
                        bool smallest_stratum) {
    Outcome o = inst.evaluate(alpha, gamma);
    o.validate();
    if (o.value <= 0) { throw OracleError("primal check returned a non-counter gamma"); }
    if constexpr (HasStratumY<I> && HasEnumerators<I>) {
        if (smallest_stratum) {
            bool scan = true;
            if constexpr (HasEnumerationFlag<I>) { scan = inst.can_enumerate(); }
            if (scan) {
                int got = inst.stratum_y(gamma);
                for (auto const & y : inst.enumerate_y()) {
                    if (inst.stratum_y(y) < got && inst.evaluate(alpha, y).value > 0) {
                        throw OracleError("gamma not from the smallest stratum");
                    }
                }
            }
        }
    }
}

} // namespace detail

// The basic primal-dual procedure. Candidate selection inside the witness
// checks is the instance's business; the engine only validates the counters,
// applies the configured accumulation and keeps the trace.
template <LagrangianInstance I> Verdict<I> run_primal_dual(I & inst, EngineConfig const & cfg) {
    if (cfg.max_iterations < 1) { throw ConfigError("max_iterations must be at least 1"); }
    if (cfg.accumulate_x && !instance_has_join_x(inst)) {
        throw ConfigError("accumulate_x requested but X has no join");
    }
    if (cfg.accumulate_y && !instance_has_join_y(inst)) {
        throw ConfigError("accumulate_y requested but Y has no join");
    }
    if (cfg.smallest_stratum && !instance_has_stratum_y(inst)) {
        throw ConfigError("smallest_stratum requested but Y has no strata");
    }

    using X = typename I::X;
    using Y = typename I::Y;
    Verdict<I> out;
    X alpha = inst.initial_x();
    Y beta = inst.initial_y();

    auto step_dual = [&](IterationRecord<X, Y> & rec) -> bool {
        rec.beta = beta;
        auto r = inst.dual_witness_check(beta);
        if (std::holds_alternative<DualOk>(r)) {
            rec.dual_outcome = "pass";
            out.kind = Verdict<I>::Kind::DualWitness;
            out.beta = beta;
            return true;
        }
        rec.dual_outcome = "counter";
        X delta = std::get<CounterPrimal<X>>(r).delta;
        detail::check_counter_primal(inst, delta, beta);
        rec.delta = delta;
        if constexpr (HasJoinX<I>) {
            alpha = cfg.accumulate_x ? inst.join_x(alpha, delta) : delta;
        } else {
            alpha = delta;
        }
        if (!rec.alpha) { rec.alpha = alpha; }
        return false;
    };

    auto step_primal = [&](IterationRecord<X, Y> & rec) -> bool {
        if (!rec.alpha) { rec.alpha = alpha; }
        auto r = inst.primal_witness_check(alpha);
        if (std::holds_alternative<PrimalOk>(r)) {
            rec.primal_outcome = "pass";
            out.kind = Verdict<I>::Kind::PrimalWitness;
            out.alpha = alpha;
            return true;
        }
        rec.primal_outcome = "counter";
        Y gamma = std::get<CounterDual<Y>>(r).gamma;
        detail::check_counter_dual(inst, alpha, gamma, cfg.smallest_stratum);
        rec.gamma = gamma;
        if constexpr (HasJoinY<I>) {
            beta = cfg.accumulate_y ? inst.join_y(beta, gamma) : gamma;
        } else {
            beta = gamma;
        }
        return false;
    };

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        IterationRecord<X, Y> rec;
        rec.iter = iter;
        bool done = cfg.start_side == Side::Dual
                        ? (step_dual(rec) || step_primal(rec))
                        : (step_primal(rec) || step_dual(rec));
        out.trace.push_back(std::move(rec));
        if (done) { return out; }
    }
    out.kind = Verdict<I>::Kind::Budget;
    out.alpha = alpha;
    out.beta = beta;
    return out;
}

// inf_x sup_y and sup_y inf_x by full enumeration; weak duality is asserted.
template <LagrangianInstance I>
    requires HasEnumerators<I>
std::pair<Outcome, Outcome> brute_force_optima(I & inst) {
    if constexpr (HasEnumerationFlag<I>) {
        if (!inst.can_enumerate()) { throw NotEnumerable(); }
    }
    auto xs = inst.enumerate_x();
    auto ys = inst.enumerate_y();
    if (xs.empty() || ys.empty()) { throw NotEnumerable(); }
    std::optional<int> primal; // inf over x of sup over y
    std::optional<int> dual;   // sup over y of inf over x
    std::vector<int> range;
    for (auto const & x : xs) {
        std::optional<int> row_sup;
        for (auto const & y : ys) {
            Outcome o = inst.evaluate(x, y);
            o.validate();
            range = o.range;
            if (!row_sup || o.value > *row_sup) { row_sup = o.value; }
        }
        if (!primal || *row_sup < *primal) { primal = *row_sup; }
    }
    for (auto const & y : ys) {
        std::optional<int> col_inf;
        for (auto const & x : xs) {
            int v = inst.evaluate(x, y).value;
            if (!col_inf || v < *col_inf) { col_inf = v; }
        }
        if (!dual || *col_inf > *dual) { dual = *col_inf; }
    }
    if (*dual > *primal) { throw OracleError("weak duality violated"); }
    return {Outcome{*primal, range}, Outcome{*dual, range}};
}

} // namespace pdv
