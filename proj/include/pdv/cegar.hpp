#pragma once

#include "pdv/engine.hpp"
#include "pdv/tracelog.hpp"
#include "pdv/ts.hpp"

namespace pdv::cegar {

struct Config {
    int max_iterations = 64;
    int unroll_depth = 16;    // spuriousness check bound over the rationals
    int max_refine_size = 2;  // predicates per refinement step
    int max_stratum = 1 << 20;
    std::uint64_t seed = 0;
};

// An abstract error path: the predicate valuation of each class plus one
// concrete representative per class, so the Lagrangian can take concrete
// state sequences as the paper's X = S* demands.
struct AbstractTraceE {
    std::vector<ts::Predicate> preds; // the abstraction the trace was found in
    std::vector<std::vector<bool>> classes;
    std::vector<ts::State> reps;
};
struct AbstractTraceS {
    std::vector<ts::Predicate> preds;
    std::vector<std::vector<bool>> classes;
    std::vector<lra::Assignment> reps;
};

std::vector<bool> valuation(ts::ExplicitTS const & sys, std::vector<ts::Predicate> const & A,
                            ts::State const & s);
std::vector<bool> valuation(std::vector<ts::Predicate> const & A, lra::Assignment const & m);

// cube(v) over a predicate set, for the symbolic abstraction
lra::QFFormula cube_formula(std::vector<ts::Predicate> const & A, std::vector<bool> const & v);

// -1 iff the classes of tau form an abstract error path under A.
Outcome l_cegar(ts::ExplicitTS const & sys, std::vector<ts::State> const & tau,
                std::vector<ts::Predicate> const & A);
Outcome l_cegar(ts::SymbolicTS const & sys, std::vector<lra::Assignment> const & tau,
                std::vector<ts::Predicate> const & A);

// BFS over abstract states; nothing when the abstraction is safe.
std::optional<AbstractTraceE> abstract_error_search(ts::ExplicitTS const & sys,
                                                    std::vector<ts::Predicate> const & A);
std::optional<AbstractTraceS> abstract_error_search(ts::SymbolicTS const & sys,
                                                    std::vector<ts::Predicate> const & A);

// Smallest-stratum predicate set refuting tau, searched in (stratum, size,
// lexicographic) order; nothing when the pool is exhausted.
std::optional<std::vector<ts::Predicate>> refine(ts::ExplicitTS const & sys,
                                                 std::vector<ts::State> const & tau,
                                                 std::vector<ts::Predicate> const & pool,
                                                 Config const & cfg);
std::optional<std::vector<ts::Predicate>> refine(ts::SymbolicTS const & sys,
                                                 std::vector<lra::Assignment> const & tau,
                                                 std::vector<ts::Predicate> const & pool,
                                                 Config const & cfg);

// Explicit mode walks the classes; symbolic mode unrolls path formulas of
// every length up to the depth bound.
std::optional<ts::Trace> concretize(ts::ExplicitTS const & sys, AbstractTraceE const & tau);
std::optional<std::vector<lra::Assignment>> concretize(ts::SymbolicTS const & sys,
                                                       AbstractTraceS const & tau, int depth);

struct Result {
    enum class Kind { Safe, Unsafe, Unknown, Budget };
    Kind kind = Kind::Budget;
    std::vector<ts::Predicate> invariant_preds;         // Safe
    std::optional<ts::Trace> counterexample;            // Unsafe, explicit
    std::vector<lra::Assignment> counterexample_models; // Unsafe, symbolic
    std::vector<std::vector<bool>> stuck_classes;       // Unknown
    int iterations = 0;
    TraceLog log;
};

Result run_cegar(ts::ExplicitTS const & sys, std::vector<ts::Predicate> const & pool,
                 Config const & cfg);
Result run_cegar(ts::SymbolicTS const & sys, std::vector<ts::Predicate> const & pool,
                 Config const & cfg);

} // namespace pdv::cegar
