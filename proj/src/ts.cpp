#include "pdv/ts.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace pdv::ts {

State state_of(long long v) {
    State s;
    s.vec = {v};
    return s;
}

State state_of(std::initializer_list<long long> vs) {
    State s;
    s.vec = vs;
    return s;
}

std::string state_to_string(State const & s) {
    if (!s.is_numeric()) { return s.label; }
    if (s.vec.size() == 1) { return std::to_string(s.vec[0]); }
    std::string out = "(";
    for (size_t i = 0; i < s.vec.size(); ++i) {
        if (i) { out += ' '; }
        out += std::to_string(s.vec[i]);
    }
    return out + ")";
}

bool ExplicitTS::contains(State const & s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
}

void ExplicitTS::validate() const {
    for (auto const & s : init) {
        if (!contains(s)) { throw std::invalid_argument("init state outside the state set"); }
    }
    for (auto const & s : bad) {
        if (!contains(s)) { throw std::invalid_argument("bad state outside the state set"); }
    }
    for (auto const & [a, b] : trans) {
        if (!contains(a) || !contains(b)) {
            throw std::invalid_argument("transition endpoint outside the state set");
        }
    }
}

void SymbolicTS::validate() const {
    std::set<std::string> allowed(vars.begin(), vars.end());
    for (auto const & v : lra::free_vars(init)) {
        if (!allowed.count(v)) { throw std::invalid_argument("init mentions unknown " + v); }
    }
    for (auto const & v : lra::free_vars(bad)) {
        if (!allowed.count(v)) { throw std::invalid_argument("bad mentions unknown " + v); }
    }
    std::set<std::string> allowed2 = allowed;
    for (auto const & v : vars) { allowed2.insert(primed(v)); }
    for (auto const & v : lra::free_vars(trans)) {
        if (!allowed2.count(v)) { throw std::invalid_argument("trans mentions unknown " + v); }
    }
}

bool pred_holds(Predicate const & p, State const & s, std::vector<std::string> const & vars) {
    if (p.extension) { return p.extension->count(s) > 0; }
    if (!p.formula) { throw std::invalid_argument("predicate " + p.id + " has no definition"); }
    if (!s.is_numeric()) {
        throw UndecidableCombination("symbolic predicate on an opaque state");
    }
    if (vars.size() != s.vec.size()) {
        throw std::invalid_argument("state arity differs from the declared vars");
    }
    lra::Assignment a;
    for (size_t i = 0; i < vars.size(); ++i) { a[vars[i]] = s.vec[i]; }
    return lra::eval_ground(*p.formula, a);
}

std::string trace_to_string(Trace const & t) {
    std::string out;
    for (size_t i = 0; i < t.states.size(); ++i) {
        if (i) { out += " -> "; }
        out += state_to_string(t.states[i]);
    }
    return out;
}

bool is_error_trace(ExplicitTS const & ts, Trace const & t) {
    if (t.states.empty()) { return false; }
    if (!ts.init.count(t.states.front())) { return false; }
    if (!ts.bad.count(t.states.back())) { return false; }
    for (size_t i = 0; i + 1 < t.states.size(); ++i) {
        if (!ts.trans.count({t.states[i], t.states[i + 1]})) { return false; }
    }
    return true;
}

Sample sample_join(Sample const & a, Sample const & b) {
    Sample r = a;
    r.init.insert(b.init.begin(), b.init.end());
    r.trans.insert(b.trans.begin(), b.trans.end());
    r.bad.insert(b.bad.begin(), b.bad.end());
    return r;
}

bool sample_within(Sample const & s, ExplicitTS const & ts) {
    for (auto const & x : s.init) {
        if (!ts.init.count(x)) { return false; }
    }
    for (auto const & x : s.bad) {
        if (!ts.bad.count(x)) { return false; }
    }
    for (auto const & t : s.trans) {
        if (!ts.trans.count(t)) { return false; }
    }
    return true;
}

std::string sample_to_string(Sample const & s) {
    std::string out = "(I' {";
    bool first = true;
    for (auto const & x : s.init) {
        if (!first) { out += ' '; }
        out += state_to_string(x);
        first = false;
    }
    out += "} T' {";
    first = true;
    for (auto const & [a, b] : s.trans) {
        if (!first) { out += ' '; }
        out += "(" + state_to_string(a) + " " + state_to_string(b) + ")";
        first = false;
    }
    out += "} B' {";
    first = true;
    for (auto const & x : s.bad) {
        if (!first) { out += ' '; }
        out += state_to_string(x);
        first = false;
    }
    return out + "})";
}

std::optional<Trace> explicit_error_search(ExplicitTS const & ts) {
    std::map<State, int> order;
    for (size_t i = 0; i < ts.states.size(); ++i) {
        order.emplace(ts.states[i], static_cast<int>(i));
    }
    std::map<State, std::vector<State>> adj;
    for (auto const & [a, b] : ts.trans) { adj[a].push_back(b); }
    for (auto & [a, succs] : adj) {
        std::sort(succs.begin(), succs.end(),
                  [&](State const & x, State const & y) { return order[x] < order[y]; });
    }
    std::map<State, State> parent;
    std::deque<State> queue;
    std::set<State> seen;
    for (auto const & s : ts.states) {
        if (ts.init.count(s) && seen.insert(s).second) { queue.push_back(s); }
    }
    auto unwind = [&](State s) {
        std::vector<State> rev{s};
        while (parent.count(s)) {
            s = parent.at(s);
            rev.push_back(s);
        }
        std::reverse(rev.begin(), rev.end());
        return Trace{std::move(rev)};
    };
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        if (ts.bad.count(s)) { return unwind(s); }
        auto it = adj.find(s);
        if (it == adj.end()) { continue; }
        for (auto const & n : it->second) {
            if (seen.insert(n).second) {
                parent.emplace(n, s);
                queue.push_back(n);
            }
        }
    }
    return std::nullopt;
}

char const * violation_kind_name(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::Initiation: return "initiation";
        case Violation::Kind::Consecution: return "consecution";
        case Violation::Kind::Safety: return "safety";
    }
    return "?";
}

std::optional<Violation> invariant_check(ExplicitTS const & ts,
                                         std::vector<Predicate> const & conj) {
    auto holds_all = [&](State const & s) {
        for (auto const & p : conj) {
            if (!pred_holds(p, s, ts.vars)) { return false; }
        }
        return true;
    };
    for (auto const & s : ts.states) {
        if (ts.init.count(s) && !holds_all(s)) {
            return Violation{Violation::Kind::Initiation, s, {}, {}};
        }
    }
    for (auto const & [a, b] : ts.trans) {
        if (holds_all(a) && !holds_all(b)) {
            return Violation{Violation::Kind::Consecution, a, b, {}};
        }
    }
    for (auto const & s : ts.states) {
        if (ts.bad.count(s) && holds_all(s)) {
            return Violation{Violation::Kind::Safety, s, {}, {}};
        }
    }
    return std::nullopt;
}

std::optional<Violation> invariant_check(SymbolicTS const & ts,
                                         std::vector<Predicate> const & conj) {
    std::set<std::string> allowed(ts.vars.begin(), ts.vars.end());
    auto has_mod = [](auto const & self, lra::QFFormula const & g) -> bool {
        if (g.kind == lra::QFFormula::Kind::Lit && g.atom.t.mod) { return true; }
        for (auto const & k : g.kids) {
            if (self(self, k)) { return true; }
        }
        return false;
    };
    std::vector<lra::QFFormula> cube;
    for (auto const & p : conj) {
        if (!p.is_symbolic()) {
            throw UndecidableCombination("explicit predicate " + p.id + " on a symbolic system");
        }
        // mod atoms cannot go through the rational decision procedure
        if (has_mod(has_mod, *p.formula)) {
            throw UndecidableCombination("mod predicate on a symbolic system");
        }
        for (auto const & v : lra::free_vars(*p.formula)) {
            if (!allowed.count(v)) {
                throw std::invalid_argument("predicate " + p.id + " mentions unknown " + v);
            }
        }
        cube.push_back(*p.formula);
    }
    lra::QFFormula inv = lra::QFFormula::make_and(cube);
    lra::QFFormula neg_inv = lra::QFFormula::negate(inv);

    auto r = lra::qf_sat(lra::QFFormula::make_and({ts.init, neg_inv}));
    if (r.sat) {
        return Violation{Violation::Kind::Initiation, {}, {}, std::move(r.model)};
    }
    lra::QFFormula inv_primed = inv;
    for (auto const & v : ts.vars) {
        inv_primed = lra::qf_subst(inv_primed, v, lra::LinTerm::variable(ts.primed(v)));
    }
    r = lra::qf_sat(
        lra::QFFormula::make_and({inv, ts.trans, lra::QFFormula::negate(inv_primed)}));
    if (r.sat) {
        return Violation{Violation::Kind::Consecution, {}, {}, std::move(r.model)};
    }
    r = lra::qf_sat(lra::QFFormula::make_and({inv, ts.bad}));
    if (r.sat) { return Violation{Violation::Kind::Safety, {}, {}, std::move(r.model)}; }
    return std::nullopt;
}

ExplicitTS restrict_states(ExplicitTS const & ts, std::set<State> const & keep) {
    ExplicitTS r;
    r.vars = ts.vars;
    for (auto const & s : ts.states) {
        if (keep.count(s)) { r.states.push_back(s); }
    }
    for (auto const & s : ts.init) {
        if (keep.count(s)) { r.init.insert(s); }
    }
    for (auto const & s : ts.bad) {
        if (keep.count(s)) { r.bad.insert(s); }
    }
    for (auto const & [a, b] : ts.trans) {
        if (keep.count(a) && keep.count(b)) { r.trans.emplace(a, b); }
    }
    return r;
}

namespace {

State pair_state(State const & a, State const & b) {
    State p;
    if (a.is_numeric() && b.is_numeric()) {
        p.vec = a.vec;
        p.vec.insert(p.vec.end(), b.vec.begin(), b.vec.end());
    } else {
        p.label = state_to_string(a) + "|" + state_to_string(b);
    }
    return p;
}

ExplicitTS build_product(ExplicitTS const & ts,
                         std::function<bool(State const &, State const &)> is_bad,
                         bool dwf_carry) {
    ExplicitTS prod;
    std::map<std::pair<State, State>, State> made;
    auto mk = [&](State const & a, State const & b) {
        auto it = made.find({a, b});
        if (it != made.end()) { return it->second; }
        State p = pair_state(a, b);
        made.emplace(std::make_pair(a, b), p);
        prod.states.push_back(p);
        if (is_bad(a, b)) { prod.bad.insert(p); }
        return p;
    };
    for (auto const & s : ts.states) {
        for (auto const & t : ts.states) { mk(s, t); }
    }
    for (auto const & [s, t] : ts.trans) {
        if (ts.init.count(s)) { prod.init.insert(made.at({s, t})); }
    }
    for (auto const & [p1, st1] : made) {
        auto const & [s1, s1p] = p1;
        for (auto const & [a, b] : ts.trans) {
            if (a != s1p) { continue; }
            if (dwf_carry) {
                prod.trans.emplace(st1, made.at({s1, b}));
                prod.trans.emplace(st1, made.at({s1p, b}));
            } else {
                prod.trans.emplace(st1, made.at({s1p, b}));
            }
        }
    }
    return prod;
}

} // namespace

ExplicitTS ranking_product_single(ExplicitTS const & ts, RankingEval const & r) {
    return build_product(
        ts, [&](State const & a, State const & b) { return r(a) <= r(b); }, false);
}

ExplicitTS ranking_product_dwf(ExplicitTS const & ts, DwfRelation const & succ) {
    return build_product(
        ts, [&](State const & a, State const & b) { return !succ(a, b); }, true);
}

std::pair<State, State> product_state_decode(State const & s) {
    State a, b;
    if (s.is_numeric()) {
        assert(s.vec.size() % 2 == 0);
        size_t half = s.vec.size() / 2;
        a.vec.assign(s.vec.begin(), s.vec.begin() + half);
        b.vec.assign(s.vec.begin() + half, s.vec.end());
    } else {
        auto bar = s.label.find('|');
        assert(bar != std::string::npos);
        a.label = s.label.substr(0, bar);
        b.label = s.label.substr(bar + 1);
    }
    return {a, b};
}

} // namespace pdv::ts
