#pragma once

#include "pdv/engine.hpp"
#include "pdv/tracelog.hpp"
#include "pdv/ts.hpp"

namespace pdv::houdini {

class IllFormed : public std::runtime_error {
public:
    explicit IllFormed(std::string const & m)
        : std::runtime_error("ill-formed Lagrangian value: " + m) {}
};

using PredSet = std::set<int>; // indices into the base predicate universe

// A transition system T together with a system T^I over finite predicate
// sets and the satisfaction relation connecting them. Conditions ID1-ID4 are
// checked by validate_pair, not assumed by construction.
struct InductionDualPair {
    ts::ExplicitTS sys;                  // T
    std::vector<std::string> base_preds; // predicate universe, by id
    std::vector<PredSet> ti_states;      // states of T^I
    std::set<int> ti_init;
    std::set<int> ti_bad;
    std::set<std::pair<int, int>> ti_trans;
    std::set<std::pair<ts::State, int>> sat; // s |= p

    bool sat1(ts::State const & s, int p) const { return sat.count({s, p}) > 0; }
    bool sat_all(ts::State const & s, PredSet const & ps) const {
        for (int p : ps) {
            if (!sat1(s, p)) { return false; }
        }
        return true;
    }
};

struct IdViolation {
    int which = 0; // 1..4
    std::string witness;
};

// Exhaustive check of ID1-ID4 over the finite pair.
std::optional<IdViolation> validate_pair(InductionDualPair const & pair);

struct HoudiniResult {
    std::vector<ts::Predicate> max_invariant; // greatest inductive subset
    bool safe = false;
    std::set<ts::State> counter_states;
};

// Iterated removal of violated predicates; the classic fixpoint. The counter
// states collect every eliminating witness, the bad states satisfying the
// final conjunction, and an error path through the invariant region when one
// exists, so that no subset of y is a safe inductive invariant of the
// restriction to them whenever the result is unsafe.
HoudiniResult houdini_fixpoint(ts::ExplicitTS const & sys, std::vector<ts::Predicate> const & y);

// -1 iff no subset of y proves restrict(sys, x) safe.
Outcome l_ccegar(ts::ExplicitTS const & sys, std::set<ts::State> const & x,
                 std::vector<ts::Predicate> const & y);

// T^I materialized as a plain transition system over opaque labels q<i>.
ts::ExplicitTS ti_system(InductionDualPair const & pair);
ts::State ti_label(int index);

// Base predicates drawn from y, as predicates over T's states.
std::vector<ts::Predicate> base_predicates(InductionDualPair const & pair, PredSet const & y);
// States drawn from x, as predicates over T^I's states (flipped satisfaction).
std::vector<ts::Predicate> state_predicates(InductionDualPair const & pair,
                                            std::set<ts::State> const & x);
// The T^I restriction to powerset(y).
std::set<ts::State> ti_states_within(InductionDualPair const & pair, PredSet const & y);

// Eq.-(2) value; raises IllFormed when both defining conditions hold, which
// signals an induction-duality violation upstream.
Outcome l_pdh(InductionDualPair const & pair, std::set<ts::State> const & x, PredSet const & y);

// Roles of T and T^I exchanged; states of T become singleton predicate sets.
InductionDualPair swap_pair(InductionDualPair const & pair);

struct Config {
    int max_iterations = 64;
    std::uint64_t seed = 0;
};

struct Result {
    enum class Kind { Safe, Unknown, Budget };
    Kind kind = Kind::Budget;
    PredSet good_preds;             // P_G
    std::set<ts::State> good_states; // S_G
    int iterations = 0;
    TraceLog log;
};

Result run_pd_houdini(InductionDualPair const & pair, Config const & cfg);

InductionDualPair parse_pair(SExpr const & e);
InductionDualPair parse_pair_file(std::string const & path);
SExpr pair_to_sexpr(InductionDualPair const & pair);

} // namespace pdv::houdini
