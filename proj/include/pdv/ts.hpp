#pragma once

#include "pdv/lra.hpp"
#include "pdv/lra_solve.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pdv::ts {

class UndecidableCombination : public std::runtime_error {
public:
    explicit UndecidableCombination(std::string const & m)
        : std::runtime_error("undecidable combination: " + m) {}
};

// Either a vector of integers (named by the system's vars) or an opaque label.
struct State {
    std::vector<long long> vec;
    std::string label;

    bool is_numeric() const { return label.empty(); }
    bool operator==(State const &) const = default;
    auto operator<=>(State const &) const = default;
};

State state_of(long long v);
State state_of(std::initializer_list<long long> vs);
std::string state_to_string(State const & s);

struct ExplicitTS {
    std::vector<std::string> vars; // names for vector components (may be empty)
    std::vector<State> states;     // insertion order is the BFS tie-break
    std::set<State> init;
    std::set<State> bad;
    std::set<std::pair<State, State>> trans;

    bool contains(State const & s) const;
    void validate() const; // init, bad within states; trans within states^2
};

struct SymbolicTS {
    std::vector<std::string> vars;
    lra::QFFormula init;
    lra::QFFormula trans; // over vars and primed vars
    lra::QFFormula bad;

    std::string primed(std::string const & v) const { return v + "'"; }
    void validate() const;
};

struct Predicate {
    std::string id;
    int stratum = 0;
    std::optional<std::set<State>> extension; // explicit predicate
    std::optional<lra::QFFormula> formula;    // symbolic predicate

    bool is_symbolic() const { return formula.has_value(); }
    bool operator==(Predicate const & o) const { return id == o.id; }
    bool operator<(Predicate const & o) const { return id < o.id; }
};

// Truth of a predicate on a state; symbolic predicates are decided pointwise.
bool pred_holds(Predicate const & p, State const & s, std::vector<std::string> const & vars);

struct Trace {
    std::vector<State> states; // nonempty

    bool operator==(Trace const &) const = default;
};

std::string trace_to_string(Trace const & t);

// Checks s0 in init, steps in trans, sn in bad.
bool is_error_trace(ExplicitTS const & ts, Trace const & t);

struct Sample {
    std::set<State> init;
    std::set<std::pair<State, State>> trans;
    std::set<State> bad;

    bool operator==(Sample const &) const = default;
    auto operator<=>(Sample const &) const = default;
    bool empty() const { return init.empty() && trans.empty() && bad.empty(); }
};

Sample sample_join(Sample const & a, Sample const & b);
bool sample_within(Sample const & s, ExplicitTS const & ts);
std::string sample_to_string(Sample const & s);

// Shortest error trace by BFS, or nothing when safe. Deterministic: ties
// break by state insertion order.
std::optional<Trace> explicit_error_search(ExplicitTS const & ts);

struct Violation {
    enum class Kind { Initiation, Consecution, Safety };
    Kind kind = Kind::Initiation;
    std::optional<State> state;           // explicit witness
    std::optional<State> state2;          // consecution successor
    std::optional<lra::Assignment> model; // symbolic witness
};

char const * violation_kind_name(Violation::Kind k);

// Def-3.3 conditions for the conjunction of `conj`, nullopt when inductive
// and safe. Explicit systems check by enumeration, symbolic ones by qf_sat.
std::optional<Violation> invariant_check(ExplicitTS const & ts,
                                         std::vector<Predicate> const & conj);
std::optional<Violation> invariant_check(SymbolicTS const & ts,
                                         std::vector<Predicate> const & conj);

ExplicitTS restrict_states(ExplicitTS const & ts, std::set<State> const & keep);

// Safety of the product encodes the ranking condition.
using RankingEval = std::function<long long(State const &)>;
// s >_R s' for a finite template set R.
using DwfRelation = std::function<bool(State const &, State const &)>;

// T^(r): pairs remember the previous state; bad iff r fails to decrease.
ExplicitTS ranking_product_single(ExplicitTS const & ts, RankingEval const & r);
// T^(R): the first component is some past state, not necessarily the
// previous one; bad iff the past state fails to dominate under >_R.
ExplicitTS ranking_product_dwf(ExplicitTS const & ts, DwfRelation const & succ);

// Decodes a product state made by the constructors above.
std::pair<State, State> product_state_decode(State const & s);

} // namespace pdv::ts
