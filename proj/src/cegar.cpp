#include "pdv/cegar.hpp"

#include <algorithm>
#include <deque>

namespace pdv::cegar {

using ts::ExplicitTS;
using ts::Predicate;
using ts::State;
using ts::SymbolicTS;

std::vector<bool> valuation(ExplicitTS const & sys, std::vector<Predicate> const & A,
                            State const & s) {
    std::vector<bool> v(A.size());
    for (size_t i = 0; i < A.size(); ++i) { v[i] = ts::pred_holds(A[i], s, sys.vars); }
    return v;
}

std::vector<bool> valuation(std::vector<Predicate> const & A, lra::Assignment const & m) {
    std::vector<bool> v(A.size());
    for (size_t i = 0; i < A.size(); ++i) {
        if (!A[i].formula) {
            throw ts::UndecidableCombination("explicit predicate in a symbolic abstraction");
        }
        v[i] = lra::eval_ground(*A[i].formula, m);
    }
    return v;
}

lra::QFFormula cube_formula(std::vector<Predicate> const & A, std::vector<bool> const & v) {
    std::vector<lra::QFFormula> kids;
    for (size_t i = 0; i < A.size(); ++i) {
        kids.push_back(v[i] ? *A[i].formula : lra::QFFormula::negate(*A[i].formula));
    }
    return lra::QFFormula::make_and(std::move(kids));
}

// --- explicit abstraction --------------------------------------------------

namespace {

struct ExplicitAbstraction {
    ExplicitTS const & sys;
    std::vector<Predicate> const & A;

    bool class_has_init(std::vector<bool> const & v) const {
        for (auto const & s : sys.init) {
            if (valuation(sys, A, s) == v) { return true; }
        }
        return false;
    }
    bool class_has_bad(std::vector<bool> const & v) const {
        for (auto const & s : sys.bad) {
            if (valuation(sys, A, s) == v) { return true; }
        }
        return false;
    }
    bool step(std::vector<bool> const & a, std::vector<bool> const & b) const {
        for (auto const & [s, t] : sys.trans) {
            if (valuation(sys, A, s) == a && valuation(sys, A, t) == b) { return true; }
        }
        return false;
    }
};

} // namespace

Outcome l_cegar(ExplicitTS const & sys, std::vector<State> const & tau,
                std::vector<Predicate> const & A) {
    if (tau.empty()) { return outcome_pm(1); }
    ExplicitAbstraction abs{sys, A};
    std::vector<std::vector<bool>> vs;
    for (auto const & s : tau) { vs.push_back(valuation(sys, A, s)); }
    if (!abs.class_has_init(vs.front())) { return outcome_pm(1); }
    if (!abs.class_has_bad(vs.back())) { return outcome_pm(1); }
    for (size_t i = 0; i + 1 < vs.size(); ++i) {
        if (!abs.step(vs[i], vs[i + 1])) { return outcome_pm(1); }
    }
    return outcome_pm(-1);
}

std::optional<AbstractTraceE> abstract_error_search(ExplicitTS const & sys,
                                                    std::vector<Predicate> const & A) {
    // group concrete states by valuation, in insertion order
    std::vector<std::vector<bool>> classes;
    std::vector<std::vector<State>> members;
    auto class_of = [&](State const & s) {
        auto v = valuation(sys, A, s);
        for (size_t i = 0; i < classes.size(); ++i) {
            if (classes[i] == v) { return i; }
        }
        classes.push_back(v);
        members.emplace_back();
        return classes.size() - 1;
    };
    std::vector<size_t> idx_of_state;
    for (auto const & s : sys.states) {
        size_t c = class_of(s);
        members[c].push_back(s);
        idx_of_state.push_back(c);
    }
    size_t n = classes.size();
    std::vector<bool> is_init(n, false), is_bad(n, false);
    for (auto const & s : sys.init) { is_init[class_of(s)] = true; }
    for (auto const & s : sys.bad) { is_bad[class_of(s)] = true; }
    std::vector<std::vector<size_t>> adj(n);
    for (auto const & [s, t] : sys.trans) {
        size_t a = class_of(s), b = class_of(t);
        if (std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end()) { adj[a].push_back(b); }
    }
    for (auto & succs : adj) { std::sort(succs.begin(), succs.end()); }
    std::vector<int> parent(n, -1);
    std::vector<bool> seen(n, false);
    std::deque<size_t> queue;
    for (size_t c = 0; c < n; ++c) {
        if (is_init[c]) {
            seen[c] = true;
            queue.push_back(c);
        }
    }
    while (!queue.empty()) {
        size_t c = queue.front();
        queue.pop_front();
        if (is_bad[c]) {
            std::vector<size_t> rev{c};
            for (int p = parent[c]; p >= 0; p = parent[p]) { rev.push_back(p); }
            std::reverse(rev.begin(), rev.end());
            AbstractTraceE out;
            out.preds = A;
            for (size_t k : rev) {
                out.classes.push_back(classes[k]);
                out.reps.push_back(members[k].front());
            }
            return out;
        }
        for (size_t b : adj[c]) {
            if (!seen[b]) {
                seen[b] = true;
                parent[b] = static_cast<int>(c);
                queue.push_back(b);
            }
        }
    }
    return std::nullopt;
}

// --- symbolic abstraction --------------------------------------------------

namespace {

struct SymbolicAbstraction {
    SymbolicTS const & sys;
    std::vector<Predicate> const & A;

    lra::QFFormula primed_cube(std::vector<bool> const & v) const {
        lra::QFFormula c = cube_formula(A, v);
        for (auto const & var : sys.vars) {
            c = lra::qf_subst(c, var, lra::LinTerm::variable(sys.primed(var)));
        }
        return c;
    }
    lra::SatResult init_in(std::vector<bool> const & v) const {
        return lra::qf_sat(lra::QFFormula::make_and({sys.init, cube_formula(A, v)}));
    }
    lra::SatResult bad_in(std::vector<bool> const & v) const {
        return lra::qf_sat(lra::QFFormula::make_and({sys.bad, cube_formula(A, v)}));
    }
    lra::SatResult step(std::vector<bool> const & a, std::vector<bool> const & b) const {
        return lra::qf_sat(
            lra::QFFormula::make_and({cube_formula(A, a), sys.trans, primed_cube(b)}));
    }
    lra::Assignment unprime(lra::Assignment const & m) const {
        lra::Assignment out;
        for (auto const & var : sys.vars) {
            auto it = m.find(sys.primed(var));
            out[var] = it == m.end() ? Rat(0) : it->second;
        }
        return out;
    }
    lra::Assignment project(lra::Assignment const & m) const {
        lra::Assignment out;
        for (auto const & var : sys.vars) {
            auto it = m.find(var);
            out[var] = it == m.end() ? Rat(0) : it->second;
        }
        return out;
    }
};

} // namespace

Outcome l_cegar(SymbolicTS const & sys, std::vector<lra::Assignment> const & tau,
                std::vector<Predicate> const & A) {
    if (tau.empty()) { return outcome_pm(1); }
    SymbolicAbstraction abs{sys, A};
    std::vector<std::vector<bool>> vs;
    for (auto const & m : tau) { vs.push_back(valuation(A, m)); }
    if (!abs.init_in(vs.front()).sat) { return outcome_pm(1); }
    if (!abs.bad_in(vs.back()).sat) { return outcome_pm(1); }
    for (size_t i = 0; i + 1 < vs.size(); ++i) {
        if (!abs.step(vs[i], vs[i + 1]).sat) { return outcome_pm(1); }
    }
    return outcome_pm(-1);
}

std::optional<AbstractTraceS> abstract_error_search(SymbolicTS const & sys,
                                                    std::vector<Predicate> const & A) {
    if (A.size() > 16) { throw ConfigError("abstraction over more than 16 predicates"); }
    SymbolicAbstraction abs{sys, A};
    size_t n = size_t{1} << A.size();
    auto bits = [&](size_t mask) {
        std::vector<bool> v(A.size());
        for (size_t i = 0; i < A.size(); ++i) { v[i] = (mask >> i) & 1; }
        return v;
    };
    std::vector<int> parent(n, -1);
    std::vector<char> seen(n, 0);
    std::vector<lra::Assignment> rep(n);
    std::deque<size_t> queue;
    for (size_t c = 0; c < n; ++c) {
        auto r = abs.init_in(bits(c));
        if (r.sat) {
            seen[c] = 1;
            rep[c] = abs.project(r.model);
            queue.push_back(c);
        }
    }
    while (!queue.empty()) {
        size_t c = queue.front();
        queue.pop_front();
        if (abs.bad_in(bits(c)).sat) {
            std::vector<size_t> rev{c};
            for (int p = parent[c]; p >= 0; p = parent[p]) { rev.push_back(p); }
            std::reverse(rev.begin(), rev.end());
            AbstractTraceS out;
            out.preds = A;
            for (size_t k : rev) {
                out.classes.push_back(bits(k));
                out.reps.push_back(rep[k]);
            }
            return out;
        }
        for (size_t b = 0; b < n; ++b) {
            if (seen[b]) { continue; }
            auto r = abs.step(bits(c), bits(b));
            if (r.sat) {
                seen[b] = 1;
                parent[b] = static_cast<int>(c);
                rep[b] = abs.unprime(r.model);
                queue.push_back(b);
            }
        }
    }
    return std::nullopt;
}

// --- refinement -------------------------------------------------------------

namespace {

// (stratum, size, lexicographic) subset scan shared by both modes
template <typename TryFn>
std::optional<std::vector<Predicate>> refine_scan(std::vector<Predicate> const & pool,
                                                  Config const & cfg, TryFn try_set) {
    int top = 0;
    for (auto const & p : pool) { top = std::max(top, p.stratum); }
    top = std::min(top, cfg.max_stratum);
    for (int stratum = 0; stratum <= top; ++stratum) {
        std::vector<size_t> avail;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (pool[i].stratum <= stratum) { avail.push_back(i); }
        }
        int maxk = std::min<int>(cfg.max_refine_size, static_cast<int>(avail.size()));
        for (int k = 1; k <= maxk; ++k) {
            std::vector<size_t> comb(k);
            std::function<std::optional<std::vector<Predicate>>(int, size_t)> rec =
                [&](int depth, size_t from) -> std::optional<std::vector<Predicate>> {
                if (depth == k) {
                    std::vector<Predicate> cand;
                    int set_stratum = 0;
                    for (int j = 0; j < k; ++j) {
                        cand.push_back(pool[avail[comb[j]]]);
                        set_stratum = std::max(set_stratum, cand.back().stratum);
                    }
                    if (set_stratum != stratum) { return std::nullopt; } // tried earlier
                    if (try_set(cand)) { return cand; }
                    return std::nullopt;
                }
                for (size_t i = from; i < avail.size(); ++i) {
                    comb[depth] = i;
                    if (auto r = rec(depth + 1, i + 1)) { return r; }
                }
                return std::nullopt;
            };
            if (auto r = rec(0, 0)) { return r; }
        }
    }
    return std::nullopt;
}

} // namespace

std::optional<std::vector<Predicate>> refine(ExplicitTS const & sys,
                                             std::vector<State> const & tau,
                                             std::vector<Predicate> const & pool,
                                             Config const & cfg) {
    return refine_scan(pool, cfg, [&](std::vector<Predicate> const & cand) {
        return l_cegar(sys, tau, cand).value > 0;
    });
}

std::optional<std::vector<Predicate>> refine(SymbolicTS const & sys,
                                             std::vector<lra::Assignment> const & tau,
                                             std::vector<Predicate> const & pool,
                                             Config const & cfg) {
    return refine_scan(pool, cfg, [&](std::vector<Predicate> const & cand) {
        return l_cegar(sys, tau, cand).value > 0;
    });
}

// --- concretization ---------------------------------------------------------

std::optional<ts::Trace> concretize(ExplicitTS const & sys, AbstractTraceE const & tau) {
    if (tau.classes.empty()) { return std::nullopt; }
    // path search within the classes: restrict to states whose valuation
    // appears somewhere on the abstract trace, then look for a real error path
    std::set<State> keep;
    for (auto const & s : sys.states) {
        auto v = valuation(sys, tau.preds, s);
        for (auto const & cls : tau.classes) {
            if (v == cls) {
                keep.insert(s);
                break;
            }
        }
    }
    auto restricted = ts::restrict_states(sys, keep);
    return ts::explicit_error_search(restricted);
}

std::optional<std::vector<lra::Assignment>> concretize(SymbolicTS const & sys,
                                                       AbstractTraceS const & tau, int depth) {
    (void)tau; // feasibility over the rationals ignores the class path and
               // sweeps plain unrollings up to the depth bound
    auto at = [&](std::string const & v, int i) { return v + "#" + std::to_string(i); };
    auto rename = [&](lra::QFFormula f, int i, bool primed_to_next) {
        for (auto const & v : sys.vars) {
            f = lra::qf_subst(f, v, lra::LinTerm::variable(at(v, i)));
            if (primed_to_next) {
                f = lra::qf_subst(f, sys.primed(v), lra::LinTerm::variable(at(v, i + 1)));
            }
        }
        return f;
    };
    for (int len = 0; len <= depth; ++len) {
        std::vector<lra::QFFormula> parts;
        parts.push_back(rename(sys.init, 0, false));
        for (int i = 0; i < len; ++i) { parts.push_back(rename(sys.trans, i, true)); }
        parts.push_back(rename(sys.bad, len, false));
        auto r = lra::qf_sat(lra::QFFormula::make_and(parts));
        if (!r.sat) { continue; }
        std::vector<lra::Assignment> out;
        for (int i = 0; i <= len; ++i) {
            lra::Assignment m;
            for (auto const & v : sys.vars) {
                auto it = r.model.find(at(v, i));
                m[v] = it == r.model.end() ? Rat(0) : it->second;
            }
            out.push_back(std::move(m));
        }
        return out;
    }
    return std::nullopt;
}

// --- the primal-dual run ----------------------------------------------------

namespace {

std::string preds_to_string(std::vector<Predicate> const & ps) {
    std::string out = "{";
    for (size_t i = 0; i < ps.size(); ++i) {
        if (i) { out += ' '; }
        out += ps[i].id;
    }
    return out + "}";
}

std::vector<Predicate> union_preds(std::vector<Predicate> const & a,
                                   std::vector<Predicate> const & b) {
    std::vector<Predicate> out = a;
    for (auto const & p : b) {
        if (std::find(out.begin(), out.end(), p) == out.end()) { out.push_back(p); }
    }
    return out;
}

// Engine instance shared by the explicit and symbolic modes.
template <typename SysT, typename TraceT> struct CegarInstance {
    using X = TraceT;
    using Y = std::vector<Predicate>;
    using Feasible = std::conditional_t<std::is_same_v<SysT, ExplicitTS>, ts::Trace,
                                        std::vector<lra::Assignment>>;

    SysT const & sys;
    std::vector<Predicate> const & pool;
    Config const & cfg;

    // set when a primal check finds the abstract trace feasible
    std::optional<Feasible> feasible;

    Outcome evaluate(X const & tau, Y const & A) { return l_cegar(sys, tau.reps, A); }

    DualCheckResult<X> dual_witness_check(Y const & A) {
        if (auto t = abstract_error_search(sys, A)) { return CounterPrimal<X>{std::move(*t)}; }
        return DualOk{};
    }

    PrimalCheckResult<Y> primal_witness_check(X const & tau) {
        // a feasible abstract trace has no refutation at all
        if (auto c = do_concretize(tau)) {
            feasible = std::move(c);
            return PrimalOk{};
        }
        if (auto gamma = refine(sys, tau.reps, pool, cfg)) {
            return CounterDual<Y>{std::move(*gamma)};
        }
        return PrimalOk{};
    }

    X initial_x() const { return {}; }
    Y initial_y() const { return {}; }
    X join_x(X const &, X const & b) const { return b; } // X side never accumulates
    Y join_y(Y const & a, Y const & b) const { return union_preds(a, b); }

    std::string describe_x(X const & tau) const {
        std::string out = "classes[";
        for (size_t i = 0; i < tau.classes.size(); ++i) {
            if (i) { out += ' '; }
            for (bool b : tau.classes[i]) { out += b ? '1' : '0'; }
        }
        return out + "]";
    }
    std::string describe_y(Y const & A) const { return preds_to_string(A); }

private:
    std::optional<Feasible> do_concretize(X const & tau) {
        if constexpr (std::is_same_v<SysT, ExplicitTS>) {
            return concretize(sys, tau);
        } else {
            return concretize(sys, tau, cfg.unroll_depth);
        }
    }
};

template <typename SysT, typename TraceT>
Result run_cegar_impl(SysT const & sys, std::vector<Predicate> const & pool, Config const & cfg) {
    CegarInstance<SysT, TraceT> inst{sys, pool, cfg, {}};
    EngineConfig ecfg;
    ecfg.accumulate_y = true;
    ecfg.max_iterations = cfg.max_iterations;
    ecfg.start_side = Side::Dual;
    ecfg.random_seed = cfg.seed;
    auto v = run_primal_dual(inst, ecfg);
    Result out;
    out.iterations = static_cast<int>(v.trace.size());
    out.log = to_trace_log(inst, v, Side::Dual);
    switch (v.kind) {
        case Verdict<decltype(inst)>::Kind::DualWitness:
            out.kind = Result::Kind::Safe;
            out.invariant_preds = *v.beta;
            break;
        case Verdict<decltype(inst)>::Kind::PrimalWitness:
            if (inst.feasible) {
                out.kind = Result::Kind::Unsafe;
                if constexpr (std::is_same_v<SysT, ExplicitTS>) {
                    out.counterexample = *inst.feasible;
                } else {
                    out.counterexample_models = *inst.feasible;
                }
            } else {
                out.kind = Result::Kind::Unknown;
                out.stuck_classes = v.alpha->classes;
            }
            break;
        case Verdict<decltype(inst)>::Kind::Budget: out.kind = Result::Kind::Budget; break;
    }
    return out;
}

} // namespace

Result run_cegar(ExplicitTS const & sys, std::vector<Predicate> const & pool,
                 Config const & cfg) {
    return run_cegar_impl<ExplicitTS, AbstractTraceE>(sys, pool, cfg);
}

Result run_cegar(SymbolicTS const & sys, std::vector<Predicate> const & pool,
                 Config const & cfg) {
    return run_cegar_impl<SymbolicTS, AbstractTraceS>(sys, pool, cfg);
}

} // namespace pdv::cegar
