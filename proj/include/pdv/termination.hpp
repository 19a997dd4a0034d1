#pragma once

#include "pdv/engine.hpp"
#include "pdv/tracelog.hpp"
#include "pdv/ts.hpp"

namespace pdv::termination {

// Affine template clamped into the naturals: r(s) = max(floor(a.s + b), 0).
struct RankingTemplate {
    std::vector<long long> coef;
    long long offset = 0;

    long long eval(ts::State const & s) const;
    int stratum() const; // max coefficient magnitude
    std::string to_string() const;

    bool operator==(RankingTemplate const &) const = default;
    auto operator<=>(RankingTemplate const &) const = default;
};

using DwfSet = std::set<RankingTemplate>;

// s >_R s' iff some member decreases strictly.
bool dwf_succ(DwfSet const & rel, ts::State const & a, ts::State const & b);
std::string dwf_to_string(DwfSet const & rel);

// All templates with max coefficient magnitude <= max_coef and |offset| <=
// max_offset, in (stratum, coefficients, offset) order with small-magnitude
// values first.
std::vector<RankingTemplate> template_pool(int dims, int max_coef, int max_offset);

// 1 iff the ranking decreases on every transition reachable within the
// sample from its initial states; the sample's bad component is ignored.
Outcome l_t_ice(ts::Sample const & sample, ts::RankingEval const & r);
Outcome l_t_ice(ts::Sample const & sample, RankingTemplate const & r);

// 1 iff every ordered pair of the trace decreases, adjacent or not.
Outcome l_t_cegar(ts::Trace const & tau, DwfSet const & rel);

struct Witness {
    enum class Kind { Single, Dwf };
    Kind kind = Kind::Single;
    RankingTemplate single;
    DwfSet dwf;
};

struct DualCheck {
    bool pass = false;
    std::optional<ts::Sample> counter_sample; // single mode
    std::optional<ts::Trace> counter_trace;   // dwf mode
    std::optional<std::pair<ts::State, ts::State>> violating_pair;
};

// Builds the ranking product lazily and searches it for a bad pair.
DualCheck dual_check(ts::ExplicitTS const & sys, Witness const & w);

// Smallest-stratum template consistent with the constraint: for a sample,
// one with l_t_ice = 1; for a trace, one ranking every ordered pair that
// `current` leaves unranked.
std::optional<RankingTemplate> synthesize_ranking(ts::Sample const & sample,
                                                  std::vector<RankingTemplate> const & pool);
std::optional<RankingTemplate> synthesize_ranking(ts::Trace const & tau,
                                                  std::vector<RankingTemplate> const & pool,
                                                  DwfSet const & current = {});

enum class Method { Ice, Cegar };

struct Config {
    int max_iterations = 64;
    int max_coef = 1;
    int max_offset = 4;
    std::uint64_t seed = 0;
};

struct Result {
    enum class Kind { Terminating, Unknown, Budget };
    Kind kind = Kind::Budget;
    std::optional<Witness> witness;     // Terminating
    std::optional<ts::Sample> sample;   // Unknown, ice
    std::optional<ts::Trace> trace;     // Unknown, cegar
    int iterations = 0;
    TraceLog log;
};

Result run_termination(ts::ExplicitTS const & sys, Method method, Config const & cfg);

} // namespace pdv::termination
