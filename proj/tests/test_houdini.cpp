#include "pdv/houdini.hpp"

#include "pair_gen.hpp"

#include <doctest.h>

using namespace pdv;
using namespace pdv::houdini;
using namespace pdv::ts;

namespace {

Predicate ext_pred(std::string id, std::set<State> states) {
    Predicate p;
    p.id = std::move(id);
    p.extension = std::move(states);
    return p;
}

ExplicitTS three_state() {
    ExplicitTS sys;
    sys.states = {state_of(0), state_of(1), state_of(2)};
    sys.init = {state_of(0)};
    sys.trans = {{state_of(0), state_of(1)}};
    sys.bad = {state_of(2)};
    return sys;
}

// exhaustive oracle: greatest subset of y passing initiation+consecution
std::vector<Predicate> greatest_inductive(ExplicitTS const & sys,
                                          std::vector<Predicate> const & y) {
    size_t n = y.size();
    std::vector<Predicate> best;
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        std::vector<Predicate> cand;
        for (size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) { cand.push_back(y[i]); }
        }
        auto v = invariant_check(sys, cand);
        bool inductive = !v.has_value() || v->kind == Violation::Kind::Safety;
        if (inductive && cand.size() > best.size()) { best = cand; }
    }
    return best;
}

bool subset_safe_exists(ExplicitTS const & sys, std::vector<Predicate> const & y) {
    size_t n = y.size();
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        std::vector<Predicate> cand;
        for (size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1) { cand.push_back(y[i]); }
        }
        if (!invariant_check(sys, cand).has_value()) { return true; }
    }
    return false;
}

InductionDualPair safe_pair() {
    InductionDualPair pair;
    pair.sys = three_state();
    pair.base_preds = {"p1", "p2"};
    for (auto s : {0, 1}) { pair.sat.emplace(state_of(s), 0); } // p1 = {0,1}
    pair.sat.emplace(state_of(0), 1);                            // p2 = {0}
    pair.ti_states = {{}, {0}};
    pair.ti_init = {0};
    pair.ti_trans = {{0, 1}};
    pair.ti_bad = {1};
    return pair;
}

InductionDualPair unsafe_pair() {
    InductionDualPair pair;
    pair.sys.states = {state_of(0), state_of(1), state_of(2)};
    pair.sys.init = {state_of(0)};
    pair.sys.trans = {{state_of(0), state_of(1)}, {state_of(1), state_of(2)}};
    pair.sys.bad = {state_of(2)};
    pair.base_preds = {"p1"};
    pair.sat.emplace(state_of(0), 0);
    pair.sat.emplace(state_of(1), 0);
    pair.ti_states = {{}, {0}};
    pair.ti_init = {0};
    pair.ti_bad = {1};
    return pair;
}

// needs one refinement round: the first dual predicate set is inadequate
InductionDualPair two_round_pair() {
    InductionDualPair pair;
    pair.sys.states = {state_of(0), state_of(1), state_of(2)};
    pair.sys.init = {state_of(0)};
    pair.sys.trans = {{state_of(0), state_of(1)}, {state_of(2), state_of(1)}};
    pair.sys.bad = {state_of(2)};
    pair.base_preds = {"pbad", "pgood"};
    pair.sat.emplace(state_of(0), 0); // pbad = {0}
    pair.sat.emplace(state_of(0), 1); // pgood = {0,1}
    pair.sat.emplace(state_of(1), 1);
    pair.ti_states = {{}, {0}, {1}}; // q0 = {}, q1 = {pbad}, q2 = {pgood}
    pair.ti_init = {0};
    pair.ti_trans = {{0, 2}};
    pair.ti_bad = {1, 2};
    return pair;
}

} // namespace

TEST_CASE("validate_pair") {
    CHECK_FALSE(validate_pair(safe_pair()).has_value());
    CHECK_FALSE(validate_pair(unsafe_pair()).has_value());
    CHECK_FALSE(validate_pair(two_round_pair()).has_value());

    // trivial pair: no dual transitions, no dual bad, all-true predicates
    InductionDualPair triv;
    triv.sys = three_state();
    triv.base_preds = {"p"};
    for (auto const & s : triv.sys.states) { triv.sat.emplace(s, 0); }
    triv.ti_states = {{0}};
    triv.ti_init = {0};
    CHECK_FALSE(validate_pair(triv).has_value());

    // ID1: an initial state falsifying a predicate that appears in a dual state
    InductionDualPair bad1 = triv;
    bad1.sat.clear();
    auto v = validate_pair(bad1);
    REQUIRE(v.has_value());
    CHECK(v->which == 1);

    // ID3: a bad state satisfying a bad predicate set
    InductionDualPair bad3 = triv;
    bad3.ti_bad = {0};
    v = validate_pair(bad3);
    REQUIRE(v.has_value());
    CHECK(v->which == 3);

    // generator output is always valid
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        auto pair = pairgen::random_valid_pair(rng);
        CHECK_FALSE(validate_pair(pair).has_value());
    }
}

TEST_CASE("houdini_fixpoint") {
    auto sys = three_state();
    std::vector<Predicate> y{ext_pred("p1", {state_of(0), state_of(1)}),
                             ext_pred("p2", {state_of(0)})};
    auto r = houdini_fixpoint(sys, y);
    REQUIRE(r.max_invariant.size() == 1);
    CHECK(r.max_invariant[0].id == "p1");
    CHECK(r.safe);
    CHECK(r.counter_states.count(state_of(0)) == 1);
    CHECK(r.counter_states.count(state_of(1)) == 1);

    // empty conjunction: safe exactly when there are no bad states
    auto r0 = houdini_fixpoint(sys, {});
    CHECK(r0.max_invariant.empty());
    CHECK_FALSE(r0.safe);
    auto nobad = sys;
    nobad.bad.clear();
    CHECK(houdini_fixpoint(nobad, {}).safe);
}

TEST_CASE("houdini_fixpoint equals the exhaustive subset oracle") {
    std::mt19937_64 rng(43);
    for (int round = 0; round < 150; ++round) {
        auto sys = tshelp::random_explicit(rng, 5);
        std::vector<Predicate> y;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            std::set<State> ext;
            for (auto const & s : sys.states) {
                if (rng() % 2) { ext.insert(s); }
            }
            y.push_back(ext_pred("p" + std::to_string(i), ext));
        }
        auto r = houdini_fixpoint(sys, y);
        auto oracle = greatest_inductive(sys, y);
        std::set<std::string> got, want;
        for (auto const & p : r.max_invariant) { got.insert(p.id); }
        for (auto const & p : oracle) { want.insert(p.id); }
        CHECK(got == want);
        CHECK(r.safe == subset_safe_exists(sys, y));
        if (!r.safe) {
            // the counter states refute every subset on the restriction
            auto sub = restrict_states(sys, r.counter_states);
            CHECK_FALSE(subset_safe_exists(sub, y));
        }
        // no subset larger than theta is inductive on the witness restriction
        auto sub = restrict_states(sys, r.counter_states);
        for (size_t mask = 0; mask < (size_t{1} << y.size()); ++mask) {
            std::vector<Predicate> cand;
            for (size_t i = 0; i < y.size(); ++i) {
                if ((mask >> i) & 1) { cand.push_back(y[i]); }
            }
            if (cand.size() <= r.max_invariant.size()) { continue; }
            auto v = invariant_check(sub, cand);
            bool inductive = !v.has_value() || v->kind == Violation::Kind::Safety;
            CHECK_FALSE(inductive);
        }
    }
}

TEST_CASE("l_ccegar") {
    auto sys = three_state();
    std::vector<Predicate> y{ext_pred("p1", {state_of(0), state_of(1)}),
                             ext_pred("p2", {state_of(0)})};
    CHECK(l_ccegar(sys, {}, y).value == 1); // empty restriction is trivially safe
    std::set<State> all{state_of(0), state_of(1), state_of(2)};
    CHECK(l_ccegar(sys, all, y).value == 1); // theta = {p1} proves it

    // states of a real error path admit no refutation
    ExplicitTS unsafe = unsafe_pair().sys;
    std::set<State> path{state_of(0), state_of(1), state_of(2)};
    CHECK(l_ccegar(unsafe, path, y).value == -1);
}

TEST_CASE("l_pdh edge values and well-definedness sweep") {
    auto pair = safe_pair();
    // empty restrictions on both sides: both have the empty invariant
    CHECK(l_pdh(pair, {}, {}).value == 0);
    // an error path in x forces -1
    auto up = unsafe_pair();
    CHECK(l_pdh(up, {state_of(0), state_of(1), state_of(2)}, {0}).value == -1);

    std::mt19937_64 rng(47);
    int pairs_done = 0;
    while (pairs_done < 200) {
        auto p = pairgen::random_valid_pair(rng, 4, 3);
        pairs_done++;
        int n = static_cast<int>(p.sys.states.size());
        int np = static_cast<int>(p.base_preds.size());
        for (int xm = 0; xm < (1 << n); ++xm) {
            std::set<State> x;
            for (int i = 0; i < n; ++i) {
                if ((xm >> i) & 1) { x.insert(p.sys.states[i]); }
            }
            for (int ym = 0; ym < (1 << np); ++ym) {
                PredSet y;
                for (int i = 0; i < np; ++i) {
                    if ((ym >> i) & 1) { y.insert(i); }
                }
                CHECK_NOTHROW(l_pdh(p, x, y)); // never IllFormed on valid pairs
            }
        }
        // Thm 4.2 on the full pair: one side always has a safe invariant
        PredSet ally;
        for (int i = 0; i < np; ++i) { ally.insert(i); }
        std::set<State> allx(p.sys.states.begin(), p.sys.states.end());
        bool t_side = houdini_fixpoint(p.sys, base_predicates(p, ally)).safe;
        bool ti_side = houdini_fixpoint(ti_system(p), state_predicates(p, allx)).safe;
        CHECK((t_side || ti_side));
    }
}

TEST_CASE("l_pdh monotonicity") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 40; ++round) {
        auto p = pairgen::random_valid_pair(rng, 4, 3);
        int n = static_cast<int>(p.sys.states.size());
        int np = static_cast<int>(p.base_preds.size());
        auto xs = [&](int m) {
            std::set<State> x;
            for (int i = 0; i < n; ++i) {
                if ((m >> i) & 1) { x.insert(p.sys.states[i]); }
            }
            return x;
        };
        auto ys = [&](int m) {
            PredSet y;
            for (int i = 0; i < np; ++i) {
                if ((m >> i) & 1) { y.insert(i); }
            }
            return y;
        };
        for (int xm = 0; xm < (1 << n); ++xm) {
            for (int xm2 = xm;; xm2 = (xm2 + 1) | xm) {
                if (xm2 < (1 << n)) {
                    // anti-monotone in x
                    for (int ym = 0; ym < (1 << np); ++ym) {
                        CHECK(l_pdh(p, xs(xm2), ys(ym)).value <=
                              l_pdh(p, xs(xm), ys(ym)).value);
                    }
                }
                if (xm2 >= (1 << n) - 1) { break; }
            }
        }
        for (int ym = 0; ym < (1 << np); ++ym) {
            for (int ym2 = ym;; ym2 = (ym2 + 1) | ym) {
                if (ym2 < (1 << np)) {
                    // monotone in y
                    for (int xm = 0; xm < (1 << n); ++xm) {
                        CHECK(l_pdh(p, xs(xm), ys(ym)).value <=
                              l_pdh(p, xs(xm), ys(ym2)).value);
                    }
                }
                if (ym2 >= (1 << np) - 1) { break; }
            }
        }
    }
}

TEST_CASE("l_pdh symmetry on powerset dual systems") {
    std::mt19937_64 rng(59);
    for (int round = 0; round < 60; ++round) {
        auto p = pairgen::random_valid_pair(rng, 4, 3, true);
        auto sp = swap_pair(p);
        CHECK_FALSE(validate_pair(sp).has_value());
        int n = static_cast<int>(p.sys.states.size());
        int np = static_cast<int>(p.base_preds.size());
        for (int xm = 0; xm < (1 << n); ++xm) {
            std::set<State> x;
            PredSet x_as_preds; // states as the swapped pair's predicates
            for (int i = 0; i < n; ++i) {
                if ((xm >> i) & 1) {
                    x.insert(p.sys.states[i]);
                    x_as_preds.insert(i);
                }
            }
            for (int ym = 0; ym < (1 << np); ++ym) {
                PredSet y;
                for (int i = 0; i < np; ++i) {
                    if ((ym >> i) & 1) { y.insert(i); }
                }
                // y as a state set of the swapped system
                std::set<State> y_as_states = ti_states_within(p, y);
                int lhs = l_pdh(p, x, y).value;
                int rhs = l_pdh(sp, y_as_states, x_as_preds).value;
                CHECK(lhs == -rhs);
            }
        }
    }
}

TEST_CASE("the dual-path lemma: prefixes induce invariants") {
    std::mt19937_64 rng(61);
    for (int round = 0; round < 80; ++round) {
        auto p = pairgen::random_valid_pair(rng, 4, 3);
        auto ti = ti_system(p);
        // enumerate TI paths from initial states, length <= 4
        std::vector<std::vector<int>> paths;
        std::function<void(std::vector<int>)> walk = [&](std::vector<int> cur) {
            paths.push_back(cur);
            if (cur.size() >= 4) { return; }
            for (auto const & [a, b] : p.ti_trans) {
                if (a == cur.back()) {
                    auto next = cur;
                    next.push_back(b);
                    walk(next);
                }
            }
        };
        for (int q : p.ti_init) { walk({q}); }
        for (auto const & path : paths) {
            PredSet joined;
            for (int q : path) {
                joined.insert(p.ti_states[q].begin(), p.ti_states[q].end());
            }
            auto v = invariant_check(p.sys, base_predicates(p, joined));
            bool inductive = !v.has_value() || v->kind == Violation::Kind::Safety;
            CHECK(inductive);
        }
    }
}

TEST_CASE("run_pd_houdini") {
    Config cfg;
    auto safe = run_pd_houdini(safe_pair(), cfg);
    REQUIRE(safe.kind == Result::Kind::Safe);
    {
        auto p = safe_pair();
        auto cert = houdini_fixpoint(p.sys, base_predicates(p, safe.good_preds));
        CHECK(cert.safe);
        CHECK_FALSE(invariant_check(p.sys, cert.max_invariant).has_value());
    }

    auto unsafe = run_pd_houdini(unsafe_pair(), cfg);
    REQUIRE(unsafe.kind == Result::Kind::Unknown);
    {
        auto p = unsafe_pair();
        auto sub = restrict_states(p.sys, unsafe.good_states);
        CHECK(explicit_error_search(sub).has_value()); // S_G covers an error path
    }

    Config one;
    one.max_iterations = 1;
    auto b = run_pd_houdini(two_round_pair(), one);
    CHECK(b.kind == Result::Kind::Budget);
    CHECK(b.iterations == 1);
    auto full = run_pd_houdini(two_round_pair(), cfg);
    CHECK(full.kind == Result::Kind::Safe);

    // pair validation gate
    auto bad = safe_pair();
    bad.sat.clear();
    CHECK_THROWS_AS(run_pd_houdini(bad, cfg), ConfigError);
}
