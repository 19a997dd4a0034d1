#include "pdv/houdini.hpp"

#include "pdv/ts_parse.hpp"

#include <algorithm>

namespace pdv::houdini {

using ts::ExplicitTS;
using ts::Predicate;
using ts::State;

std::optional<IdViolation> validate_pair(InductionDualPair const & pair) {
    // ID1: initial states satisfy every predicate appearing in some TI state
    std::set<int> used;
    for (auto const & ps : pair.ti_states) { used.insert(ps.begin(), ps.end()); }
    for (auto const & s0 : pair.sys.init) {
        for (int p : used) {
            if (!pair.sat1(s0, p)) {
                return IdViolation{1, ts::state_to_string(s0) + " falsifies " +
                                          pair.base_preds.at(p)};
            }
        }
    }
    // ID2: initial predicate sets are satisfied by all states
    for (int q : pair.ti_init) {
        for (auto const & s : pair.sys.states) {
            if (!pair.sat_all(s, pair.ti_states.at(q))) {
                return IdViolation{2, ts::state_to_string(s) + " falsifies initial q" +
                                          std::to_string(q)};
            }
        }
    }
    // ID3: every bad state is excluded by every bad predicate set
    for (auto const & b : pair.sys.bad) {
        for (int q : pair.ti_bad) {
            if (pair.sat_all(b, pair.ti_states.at(q))) {
                return IdViolation{3, ts::state_to_string(b) + " satisfies bad q" +
                                          std::to_string(q)};
            }
        }
    }
    // ID4: transitions restrict each other
    for (auto const & [s, s2] : pair.sys.trans) {
        for (auto const & [q, q2] : pair.ti_trans) {
            if (pair.sat_all(s, pair.ti_states.at(q)) &&
                pair.sat_all(s, pair.ti_states.at(q2)) &&
                pair.sat_all(s2, pair.ti_states.at(q)) &&
                !pair.sat_all(s2, pair.ti_states.at(q2))) {
                return IdViolation{4, "(" + ts::state_to_string(s) + "," +
                                          ts::state_to_string(s2) + ") with q" +
                                          std::to_string(q) + "->q" + std::to_string(q2)};
            }
        }
    }
    return std::nullopt;
}

HoudiniResult houdini_fixpoint(ExplicitTS const & sys, std::vector<Predicate> const & y) {
    HoudiniResult out;
    std::vector<Predicate> alive = y;
    auto holds_all = [&](State const & s) {
        for (auto const & p : alive) {
            if (!ts::pred_holds(p, s, sys.vars)) { return false; }
        }
        return true;
    };
    for (bool removed = true; removed;) {
        removed = false;
        for (size_t i = 0; i < alive.size() && !removed; ++i) {
            for (auto const & s : sys.states) {
                if (sys.init.count(s) && !ts::pred_holds(alive[i], s, sys.vars)) {
                    out.counter_states.insert(s);
                    alive.erase(alive.begin() + i);
                    removed = true;
                    break;
                }
            }
        }
        if (removed) { continue; }
        for (auto const & [s, s2] : sys.trans) {
            if (!holds_all(s)) { continue; }
            for (size_t i = 0; i < alive.size(); ++i) {
                if (!ts::pred_holds(alive[i], s2, sys.vars)) {
                    out.counter_states.insert(s);
                    out.counter_states.insert(s2);
                    alive.erase(alive.begin() + i);
                    removed = true;
                    break;
                }
            }
            if (removed) { break; }
        }
    }
    out.max_invariant = alive;
    out.safe = true;
    for (auto const & b : sys.bad) {
        if (holds_all(b)) {
            out.safe = false;
            out.counter_states.insert(b);
        }
    }
    if (!out.safe) {
        // error-path evidence inside the invariant region; any real error
        // path lives there since the region contains all reachable states
        std::set<State> region;
        for (auto const & s : sys.states) {
            if (holds_all(s)) { region.insert(s); }
        }
        if (auto tr = ts::explicit_error_search(ts::restrict_states(sys, region))) {
            out.counter_states.insert(tr->states.begin(), tr->states.end());
        }
    }
    return out;
}

Outcome l_ccegar(ExplicitTS const & sys, std::set<State> const & x,
                 std::vector<Predicate> const & y) {
    auto sub = ts::restrict_states(sys, x);
    return outcome_pm(houdini_fixpoint(sub, y).safe ? 1 : -1);
}

ts::State ti_label(int index) {
    State s;
    s.label = "q" + std::to_string(index);
    return s;
}

ts::ExplicitTS ti_system(InductionDualPair const & pair) {
    ExplicitTS ti;
    for (size_t i = 0; i < pair.ti_states.size(); ++i) {
        ti.states.push_back(ti_label(static_cast<int>(i)));
    }
    for (int q : pair.ti_init) { ti.init.insert(ti_label(q)); }
    for (int q : pair.ti_bad) { ti.bad.insert(ti_label(q)); }
    for (auto const & [a, b] : pair.ti_trans) { ti.trans.emplace(ti_label(a), ti_label(b)); }
    return ti;
}

std::vector<Predicate> base_predicates(InductionDualPair const & pair, PredSet const & y) {
    std::vector<Predicate> out;
    for (int p : y) {
        Predicate pr;
        pr.id = pair.base_preds.at(p);
        std::set<State> ext;
        for (auto const & s : pair.sys.states) {
            if (pair.sat1(s, p)) { ext.insert(s); }
        }
        pr.extension = std::move(ext);
        out.push_back(std::move(pr));
    }
    return out;
}

std::vector<Predicate> state_predicates(InductionDualPair const & pair,
                                        std::set<State> const & x) {
    std::vector<Predicate> out;
    for (auto const & s : x) {
        Predicate pr;
        pr.id = ts::state_to_string(s);
        std::set<State> ext;
        for (size_t q = 0; q < pair.ti_states.size(); ++q) {
            if (pair.sat_all(s, pair.ti_states[q])) { ext.insert(ti_label(static_cast<int>(q))); }
        }
        pr.extension = std::move(ext);
        out.push_back(std::move(pr));
    }
    return out;
}

std::set<State> ti_states_within(InductionDualPair const & pair, PredSet const & y) {
    std::set<State> keep;
    for (size_t q = 0; q < pair.ti_states.size(); ++q) {
        if (std::includes(y.begin(), y.end(), pair.ti_states[q].begin(),
                          pair.ti_states[q].end())) {
            keep.insert(ti_label(static_cast<int>(q)));
        }
    }
    return keep;
}

Outcome l_pdh(InductionDualPair const & pair, std::set<State> const & x, PredSet const & y) {
    auto t_side = houdini_fixpoint(ts::restrict_states(pair.sys, x), base_predicates(pair, y));
    auto ti = ti_system(pair);
    auto ti_side = houdini_fixpoint(ts::restrict_states(ti, ti_states_within(pair, y)),
                                    state_predicates(pair, x));
    if (!t_side.safe && !ti_side.safe) {
        throw IllFormed("both defining conditions hold; the pair violates induction duality");
    }
    if (!t_side.safe) { return Outcome{-1, {-1, 0, 1}}; }
    if (!ti_side.safe) { return Outcome{1, {-1, 0, 1}}; }
    return Outcome{0, {-1, 0, 1}};
}

InductionDualPair swap_pair(InductionDualPair const & pair) {
    InductionDualPair out;
    out.sys = ti_system(pair);
    // base predicates of the swapped pair are T's states
    std::map<State, int> index_of;
    for (auto const & s : pair.sys.states) {
        index_of[s] = static_cast<int>(out.base_preds.size());
        out.base_preds.push_back(ts::state_to_string(s));
    }
    // T's states become singleton predicate sets
    int qi = 0;
    std::map<State, int> ti_index;
    for (auto const & s : pair.sys.states) {
        out.ti_states.push_back({index_of[s]});
        ti_index[s] = qi++;
    }
    for (auto const & s : pair.sys.init) { out.ti_init.insert(ti_index[s]); }
    for (auto const & s : pair.sys.bad) { out.ti_bad.insert(ti_index[s]); }
    for (auto const & [a, b] : pair.sys.trans) {
        out.ti_trans.emplace(ti_index[a], ti_index[b]);
    }
    // flipped satisfaction: q |= s iff s |= set_q
    for (size_t q = 0; q < pair.ti_states.size(); ++q) {
        for (auto const & s : pair.sys.states) {
            if (pair.sat_all(s, pair.ti_states[q])) {
                out.sat.emplace(ti_label(static_cast<int>(q)), index_of[s]);
            }
        }
    }
    return out;
}

namespace {

std::string predset_to_string(InductionDualPair const & pair, PredSet const & y) {
    std::string out = "{";
    bool first = true;
    for (int p : y) {
        if (!first) { out += ' '; }
        out += pair.base_preds.at(p);
        first = false;
    }
    return out + "}";
}

std::string stateset_to_string(std::set<State> const & x) {
    std::string out = "{";
    bool first = true;
    for (auto const & s : x) {
        if (!first) { out += ' '; }
        out += ts::state_to_string(s);
        first = false;
    }
    return out + "}";
}

struct PdhInstance {
    using X = std::set<State>;
    using Y = PredSet;

    InductionDualPair const & pair;
    ts::ExplicitTS ti;

    explicit PdhInstance(InductionDualPair const & p) : pair(p), ti(ti_system(p)) {}

    Outcome evaluate(X const & x, Y const & y) { return l_pdh(pair, x, y); }

    DualCheckResult<X> dual_witness_check(Y const & y) {
        auto r = houdini_fixpoint(pair.sys, base_predicates(pair, y));
        if (r.safe) { return DualOk{}; }
        return CounterPrimal<X>{r.counter_states};
    }

    PrimalCheckResult<Y> primal_witness_check(X const & x) {
        auto r = houdini_fixpoint(ti, state_predicates(pair, x));
        if (r.safe) { return PrimalOk{}; }
        PredSet gamma;
        for (auto const & q : r.counter_states) {
            int qi = std::stoi(q.label.substr(1));
            auto const & ps = pair.ti_states.at(qi);
            gamma.insert(ps.begin(), ps.end());
        }
        return CounterDual<Y>{gamma};
    }

    X initial_x() const { return {}; }
    Y initial_y() const {
        if (pair.ti_bad.empty()) {
            throw ConfigError("primal-dual houdini needs a bad state in the dual system");
        }
        return pair.ti_states.at(*pair.ti_bad.begin()); // first by input order
    }
    X join_x(X const & a, X const & b) const {
        X r = a;
        r.insert(b.begin(), b.end());
        return r;
    }
    Y join_y(Y const & a, Y const & b) const {
        Y r = a;
        r.insert(b.begin(), b.end());
        return r;
    }
    std::string describe_x(X const & x) const { return stateset_to_string(x); }
    std::string describe_y(Y const & y) const { return predset_to_string(pair, y); }
};

} // namespace

Result run_pd_houdini(InductionDualPair const & pair, Config const & cfg) {
    if (auto bad = validate_pair(pair)) {
        throw ConfigError("induction duality ID" + std::to_string(bad->which) +
                          " violated: " + bad->witness);
    }
    PdhInstance inst(pair);
    EngineConfig ecfg;
    ecfg.accumulate_x = true;
    ecfg.accumulate_y = true;
    ecfg.max_iterations = cfg.max_iterations;
    ecfg.start_side = Side::Dual;
    ecfg.random_seed = cfg.seed;
    auto v = run_primal_dual(inst, ecfg);
    Result out;
    out.iterations = static_cast<int>(v.trace.size());
    out.log = to_trace_log(inst, v, Side::Dual);
    switch (v.kind) {
        case Verdict<PdhInstance>::Kind::DualWitness:
            out.kind = Result::Kind::Safe;
            out.good_preds = *v.beta;
            break;
        case Verdict<PdhInstance>::Kind::PrimalWitness:
            out.kind = Result::Kind::Unknown;
            out.good_states = *v.alpha;
            break;
        case Verdict<PdhInstance>::Kind::Budget:
            out.kind = Result::Kind::Budget;
            if (v.alpha) { out.good_states = *v.alpha; }
            if (v.beta) { out.good_preds = *v.beta; }
            break;
    }
    return out;
}

// --- pair file --------------------------------------------------------------

InductionDualPair parse_pair(SExpr const & e) {
    if (!e.is_list() || e.size() == 0 || !e[0].is_atom("pair")) { e.fail("expected (pair ...)"); }
    InductionDualPair pair;
    std::map<std::string, SExpr const *> kw;
    for (size_t i = 1; i + 1 < e.size(); i += 2) {
        if (!e[i].is_atom() || e[i].atom.empty() || e[i].atom[0] != ':') {
            e[i].fail("expected a :keyword");
        }
        kw[e[i].atom] = &e[i + 1];
    }
    auto need = [&](char const * k) -> SExpr const & {
        auto it = kw.find(k);
        if (it == kw.end()) { e.fail(std::string("missing ") + k); }
        return *it->second;
    };
    auto any = ts::parse_system(need(":system"));
    auto * ex = std::get_if<ExplicitTS>(&any);
    if (!ex) { need(":system").fail("pair systems must be explicit"); }
    pair.sys = *ex;
    std::map<std::string, int> pred_index;
    for (auto const & pe : need(":preds").items) {
        std::string const & id = pe.atom_or_fail("predicate id");
        pred_index[id] = static_cast<int>(pair.base_preds.size());
        pair.base_preds.push_back(id);
    }
    std::map<std::string, int> q_index;
    for (auto const & qe : need(":ti-states").items) {
        if (!qe.is_list() || qe.size() != 2) { qe.fail("expected (name (preds...))"); }
        std::string const & name = qe[0].atom_or_fail("state name");
        PredSet ps;
        for (auto const & pe : qe[1].items) {
            auto it = pred_index.find(pe.atom_or_fail("predicate id"));
            if (it == pred_index.end()) { pe.fail("unknown predicate " + pe.atom); }
            ps.insert(it->second);
        }
        q_index[name] = static_cast<int>(pair.ti_states.size());
        pair.ti_states.push_back(std::move(ps));
    }
    auto q_of = [&](SExpr const & qe) {
        auto it = q_index.find(qe.atom_or_fail("dual state name"));
        if (it == q_index.end()) { qe.fail("unknown dual state " + qe.atom); }
        return it->second;
    };
    for (auto const & qe : need(":ti-init").items) { pair.ti_init.insert(q_of(qe)); }
    for (auto const & qe : need(":ti-bad").items) { pair.ti_bad.insert(q_of(qe)); }
    for (auto const & te : need(":ti-trans").items) {
        if (!te.is_list() || te.size() != 2) { te.fail("expected (from to)"); }
        pair.ti_trans.emplace(q_of(te[0]), q_of(te[1]));
    }
    for (auto const & se : need(":sat").items) {
        if (!se.is_list() || se.size() != 2) { se.fail("expected (state (preds...))"); }
        State s = ts::parse_state(se[0]);
        if (!pair.sys.contains(s)) { se[0].fail("sat row for an unknown state"); }
        for (auto const & pe : se[1].items) {
            auto it = pred_index.find(pe.atom_or_fail("predicate id"));
            if (it == pred_index.end()) { pe.fail("unknown predicate " + pe.atom); }
            pair.sat.emplace(s, it->second);
        }
    }
    return pair;
}

InductionDualPair parse_pair_file(std::string const & path) {
    return parse_pair(sexpr_parse(ts::read_file(path)));
}

SExpr pair_to_sexpr(InductionDualPair const & pair) {
    std::vector<SExpr> preds;
    for (auto const & p : pair.base_preds) { preds.push_back(sx_atom(p)); }
    std::vector<SExpr> qs;
    for (size_t i = 0; i < pair.ti_states.size(); ++i) {
        std::vector<SExpr> ps;
        for (int p : pair.ti_states[i]) { ps.push_back(sx_atom(pair.base_preds.at(p))); }
        qs.push_back(sx_list({sx_atom("q" + std::to_string(i)), sx_list(std::move(ps))}));
    }
    auto qlist = [&](std::set<int> const & s) {
        std::vector<SExpr> out;
        for (int q : s) { out.push_back(sx_atom("q" + std::to_string(q))); }
        return sx_list(std::move(out));
    };
    std::vector<SExpr> tt;
    for (auto const & [a, b] : pair.ti_trans) {
        tt.push_back(sx_list(
            {sx_atom("q" + std::to_string(a)), sx_atom("q" + std::to_string(b))}));
    }
    std::map<State, std::vector<int>> rows;
    for (auto const & [s, p] : pair.sat) { rows[s].push_back(p); }
    std::vector<SExpr> sat;
    for (auto const & [s, ps] : rows) {
        std::vector<SExpr> pl;
        for (int p : ps) { pl.push_back(sx_atom(pair.base_preds.at(p))); }
        sat.push_back(sx_list({ts::state_to_sexpr(s), sx_list(std::move(pl))}));
    }
    return sx_list({sx_atom("pair"), sx_atom(":system"), ts::system_to_sexpr(pair.sys),
                    sx_atom(":preds"), sx_list(std::move(preds)), sx_atom(":ti-states"),
                    sx_list(std::move(qs)), sx_atom(":ti-init"), qlist(pair.ti_init),
                    sx_atom(":ti-trans"), sx_list(std::move(tt)), sx_atom(":ti-bad"),
                    qlist(pair.ti_bad), sx_atom(":sat"), sx_list(std::move(sat))});
}

} // namespace pdv::houdini
