#pragma once

#include "pdv/engine.hpp"
#include "pdv/tracelog.hpp"
#include "pdv/ts.hpp"

namespace pdv::ice {

struct Config {
    int max_iterations = 128;
    bool batch_teacher = false; // all counterexample facts at once
    std::uint64_t seed = 0;
};

// 1 iff the hypothesis is a safe inductive invariant of the sampled
// subsystem: holds on I', closed under T', false on B'.
Outcome l_ice(ts::ExplicitTS const & sys, ts::Sample const & sample, ts::Predicate const & p);

// Rational-model sample for symbolic systems.
struct SampleS {
    std::set<lra::Assignment> init;
    std::set<std::pair<lra::Assignment, lra::Assignment>> trans;
    std::set<lra::Assignment> bad;

    bool operator==(SampleS const &) const = default;
    auto operator<=>(SampleS const &) const = default;
};
SampleS sample_join(SampleS const & a, SampleS const & b);
Outcome l_ice(SampleS const & sample, ts::Predicate const & p);

// The dual witness check: nothing on Pass, otherwise a counterexample sample
// (one fact per round unless batching is on).
std::optional<ts::Sample> teacher(ts::ExplicitTS const & sys, ts::Predicate const & p,
                                  bool batch = false);
std::optional<SampleS> teacher(ts::SymbolicTS const & sys, ts::Predicate const & p);

// The primal witness check: a pool hypothesis consistent with the sample,
// smallest stratum first; nothing when the pool is exhausted.
std::optional<ts::Predicate> learner(ts::ExplicitTS const & sys, ts::Sample const & sample,
                                     std::vector<ts::Predicate> const & pool);
std::optional<ts::Predicate> learner(SampleS const & sample,
                                     std::vector<ts::Predicate> const & pool);

struct Result {
    enum class Kind { Safe, Unknown, Budget };
    Kind kind = Kind::Budget;
    std::optional<ts::Predicate> invariant; // Safe
    ts::Sample sample;                      // Unknown, explicit
    SampleS sample_s;                       // Unknown, symbolic
    int iterations = 0;
    TraceLog log;
};

Result run_ice(ts::ExplicitTS const & sys, std::vector<ts::Predicate> const & pool,
               Config const & cfg);
Result run_ice(ts::SymbolicTS const & sys, std::vector<ts::Predicate> const & pool,
               Config const & cfg);

} // namespace pdv::ice
