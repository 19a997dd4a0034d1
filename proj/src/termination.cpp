#include "pdv/termination.hpp"

#include <algorithm>
#include <deque>

namespace pdv::termination {

using ts::ExplicitTS;
using ts::Sample;
using ts::State;
using ts::Trace;

long long RankingTemplate::eval(State const & s) const {
    if (!s.is_numeric()) {
        throw std::invalid_argument("ranking template on an opaque state");
    }
    long long acc = offset;
    for (size_t i = 0; i < s.vec.size() && i < coef.size(); ++i) { acc += coef[i] * s.vec[i]; }
    return acc < 0 ? 0 : acc;
}

int RankingTemplate::stratum() const {
    long long m = 0;
    for (auto c : coef) { m = std::max(m, c < 0 ? -c : c); }
    return static_cast<int>(m);
}

std::string RankingTemplate::to_string() const {
    std::string out = "(";
    for (size_t i = 0; i < coef.size(); ++i) {
        if (i) { out += ' '; }
        out += std::to_string(coef[i]);
    }
    return out + " | " + std::to_string(offset) + ")";
}

bool dwf_succ(DwfSet const & rel, State const & a, State const & b) {
    for (auto const & r : rel) {
        if (r.eval(a) > r.eval(b)) { return true; }
    }
    return false;
}

std::string dwf_to_string(DwfSet const & rel) {
    std::string out = "{";
    bool first = true;
    for (auto const & r : rel) {
        if (!first) { out += ' '; }
        out += r.to_string();
        first = false;
    }
    return out + "}";
}

std::vector<RankingTemplate> template_pool(int dims, int max_coef, int max_offset) {
    // magnitude-first value order: 0, 1, -1, 2, -2, ...
    auto values = [](int bound) {
        std::vector<long long> vs{0};
        for (int v = 1; v <= bound; ++v) {
            vs.push_back(v);
            vs.push_back(-v);
        }
        return vs;
    };
    std::vector<RankingTemplate> pool;
    auto coef_values = values(max_coef);
    auto offset_values = values(max_offset);
    for (int stratum = 0; stratum <= max_coef; ++stratum) {
        std::vector<std::vector<long long>> vecs{{}};
        for (int d = 0; d < dims; ++d) {
            std::vector<std::vector<long long>> next;
            for (auto const & v : vecs) {
                for (long long c : coef_values) {
                    if (std::abs(c) > stratum) { continue; }
                    auto w = v;
                    w.push_back(c);
                    next.push_back(std::move(w));
                }
            }
            vecs = std::move(next);
        }
        for (auto const & v : vecs) {
            long long m = 0;
            for (auto c : v) { m = std::max(m, c < 0 ? -c : c); }
            if (m != stratum) { continue; }
            for (long long b : offset_values) { pool.push_back(RankingTemplate{v, b}); }
        }
    }
    return pool;
}

Outcome l_t_ice(Sample const & sample, ts::RankingEval const & r) {
    // states reachable within the sample from its initial states
    std::set<State> reach = sample.init;
    for (bool grew = true; grew;) {
        grew = false;
        for (auto const & [a, b] : sample.trans) {
            if (reach.count(a) && reach.insert(b).second) { grew = true; }
        }
    }
    for (auto const & [a, b] : sample.trans) {
        if (reach.count(a) && r(a) <= r(b)) { return outcome_pm(-1); }
    }
    return outcome_pm(1);
}

Outcome l_t_ice(Sample const & sample, RankingTemplate const & r) {
    return l_t_ice(sample, [&](State const & s) { return r.eval(s); });
}

Outcome l_t_cegar(Trace const & tau, DwfSet const & rel) {
    for (size_t i = 0; i < tau.states.size(); ++i) {
        for (size_t j = i + 1; j < tau.states.size(); ++j) {
            if (!dwf_succ(rel, tau.states[i], tau.states[j])) { return outcome_pm(-1); }
        }
    }
    return outcome_pm(1);
}

namespace {

// On-the-fly product search; avoids materializing S x S.
std::optional<std::vector<std::pair<State, State>>>
lazy_product_search(ExplicitTS const & sys,
                    std::function<bool(State const &, State const &)> is_bad, bool dwf_carry) {
    std::map<State, int> order;
    for (size_t i = 0; i < sys.states.size(); ++i) {
        order.emplace(sys.states[i], static_cast<int>(i));
    }
    std::map<State, std::vector<State>> adj;
    for (auto const & [a, b] : sys.trans) { adj[a].push_back(b); }
    for (auto & [a, succs] : adj) {
        std::sort(succs.begin(), succs.end(),
                  [&](State const & x, State const & y) { return order[x] < order[y]; });
    }
    using Pair = std::pair<State, State>;
    std::map<Pair, Pair> parent;
    std::set<Pair> seen;
    std::deque<Pair> queue;
    for (auto const & s : sys.states) {
        if (!sys.init.count(s)) { continue; }
        auto it = adj.find(s);
        if (it == adj.end()) { continue; }
        for (auto const & t : it->second) {
            if (seen.insert({s, t}).second) { queue.push_back({s, t}); }
        }
    }
    auto unwind = [&](Pair p) {
        std::vector<Pair> rev{p};
        while (parent.count(p)) {
            p = parent.at(p);
            rev.push_back(p);
        }
        std::reverse(rev.begin(), rev.end());
        return rev;
    };
    while (!queue.empty()) {
        Pair p = queue.front();
        queue.pop_front();
        if (is_bad(p.first, p.second)) { return unwind(p); }
        auto it = adj.find(p.second);
        if (it == adj.end()) { continue; }
        for (auto const & t : it->second) {
            std::vector<Pair> nexts;
            if (dwf_carry) {
                nexts.push_back({p.second, t}); // remember the previous state
                nexts.push_back({p.first, t});  // or keep carrying the old one
            } else {
                nexts.push_back({p.second, t});
            }
            for (auto const & n : nexts) {
                if (seen.insert(n).second) {
                    parent.emplace(n, p);
                    queue.push_back(n);
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace

DualCheck dual_check(ExplicitTS const & sys, Witness const & w) {
    DualCheck out;
    if (w.kind == Witness::Kind::Single) {
        auto tr = lazy_product_search(
            sys,
            [&](State const & a, State const & b) { return w.single.eval(a) <= w.single.eval(b); },
            false);
        if (!tr) {
            out.pass = true;
            return out;
        }
        Sample s;
        s.init.insert(tr->front().first);
        for (auto const & [a, b] : *tr) { s.trans.emplace(a, b); }
        out.counter_sample = std::move(s);
        out.violating_pair = tr->back();
        return out;
    }
    auto tr = lazy_product_search(
        sys, [&](State const & a, State const & b) { return !dwf_succ(w.dwf, a, b); }, true);
    if (!tr) {
        out.pass = true;
        return out;
    }
    Trace t;
    t.states.push_back(tr->front().first);
    for (auto const & [a, b] : *tr) { t.states.push_back(b); }
    out.counter_trace = std::move(t);
    out.violating_pair = tr->back();
    return out;
}

std::optional<RankingTemplate> synthesize_ranking(Sample const & sample,
                                                  std::vector<RankingTemplate> const & pool) {
    for (auto const & r : pool) {
        if (l_t_ice(sample, r).value > 0) { return r; }
    }
    return std::nullopt;
}

std::optional<RankingTemplate> synthesize_ranking(Trace const & tau,
                                                  std::vector<RankingTemplate> const & pool,
                                                  DwfSet const & current) {
    std::vector<std::pair<State, State>> unranked;
    for (size_t i = 0; i < tau.states.size(); ++i) {
        for (size_t j = i + 1; j < tau.states.size(); ++j) {
            if (!dwf_succ(current, tau.states[i], tau.states[j])) {
                unranked.emplace_back(tau.states[i], tau.states[j]);
            }
        }
    }
    for (auto const & r : pool) {
        bool all = true;
        for (auto const & [a, b] : unranked) {
            if (r.eval(a) <= r.eval(b)) {
                all = false;
                break;
            }
        }
        if (all) { return r; }
    }
    return std::nullopt;
}

namespace {

struct IceTermInstance {
    using X = Sample;
    using Y = RankingTemplate;

    ExplicitTS const & sys;
    std::vector<RankingTemplate> pool;

    Outcome evaluate(X const & s, Y const & r) { return l_t_ice(s, r); }
    DualCheckResult<X> dual_witness_check(Y const & r) {
        auto d = dual_check(sys, Witness{Witness::Kind::Single, r, {}});
        if (d.pass) { return DualOk{}; }
        return CounterPrimal<X>{*d.counter_sample};
    }
    PrimalCheckResult<Y> primal_witness_check(X const & s) {
        if (auto r = synthesize_ranking(s, pool)) { return CounterDual<Y>{*r}; }
        return PrimalOk{};
    }
    X initial_x() const { return {}; }
    Y initial_y() const { return RankingTemplate{{}, 0}; }
    X join_x(X const & a, X const & b) const { return ts::sample_join(a, b); }
    std::string describe_x(X const & s) const { return ts::sample_to_string(s); }
    std::string describe_y(Y const & r) const { return r.to_string(); }
};

struct CegarTermInstance {
    using X = Trace;
    using Y = DwfSet;

    ExplicitTS const & sys;
    std::vector<RankingTemplate> pool;

    Outcome evaluate(X const & t, Y const & rel) { return l_t_cegar(t, rel); }
    DualCheckResult<X> dual_witness_check(Y const & rel) {
        auto d = dual_check(sys, Witness{Witness::Kind::Dwf, {}, rel});
        if (d.pass) { return DualOk{}; }
        return CounterPrimal<X>{*d.counter_trace};
    }
    PrimalCheckResult<Y> primal_witness_check(X const & t) {
        // one template per unranked pair; each covers at least its own pair
        DwfSet gamma;
        if (auto r = synthesize_ranking(t, pool)) {
            gamma.insert(*r);
            return CounterDual<Y>{gamma};
        }
        for (size_t i = 0; i < t.states.size(); ++i) {
            for (size_t j = i + 1; j < t.states.size(); ++j) {
                if (dwf_succ(gamma, t.states[i], t.states[j])) { continue; }
                Trace pairwise{{t.states[i], t.states[j]}};
                auto r = synthesize_ranking(pairwise, pool);
                if (!r) { return PrimalOk{}; }
                gamma.insert(*r);
            }
        }
        return CounterDual<Y>{gamma};
    }
    X initial_x() const { return Trace{}; }
    Y initial_y() const { return {}; }
    Y join_y(Y const & a, Y const & b) const {
        Y r = a;
        r.insert(b.begin(), b.end());
        return r;
    }
    std::string describe_x(X const & t) const { return ts::trace_to_string(t); }
    std::string describe_y(Y const & rel) const { return dwf_to_string(rel); }
};

} // namespace

Result run_termination(ExplicitTS const & sys, Method method, Config const & cfg) {
    if (!sys.bad.empty()) {
        throw std::invalid_argument("termination systems carry no bad states");
    }
    int dims = 1;
    for (auto const & s : sys.states) {
        if (s.is_numeric()) { dims = static_cast<int>(s.vec.size()); }
    }
    auto pool = template_pool(dims, cfg.max_coef, cfg.max_offset);
    Result out;
    if (method == Method::Ice) {
        IceTermInstance inst{sys, pool};
        EngineConfig ecfg;
        ecfg.accumulate_x = true;
        ecfg.max_iterations = cfg.max_iterations;
        ecfg.start_side = Side::Primal;
        ecfg.random_seed = cfg.seed;
        auto v = run_primal_dual(inst, ecfg);
        out.iterations = static_cast<int>(v.trace.size());
        out.log = to_trace_log(inst, v, Side::Primal);
        switch (v.kind) {
            case Verdict<IceTermInstance>::Kind::DualWitness:
                out.kind = Result::Kind::Terminating;
                out.witness = Witness{Witness::Kind::Single, *v.beta, {}};
                break;
            case Verdict<IceTermInstance>::Kind::PrimalWitness:
                out.kind = Result::Kind::Unknown;
                out.sample = *v.alpha;
                break;
            case Verdict<IceTermInstance>::Kind::Budget: out.kind = Result::Kind::Budget; break;
        }
    } else {
        CegarTermInstance inst{sys, pool};
        EngineConfig ecfg;
        ecfg.accumulate_y = true;
        ecfg.max_iterations = cfg.max_iterations;
        ecfg.start_side = Side::Dual;
        ecfg.random_seed = cfg.seed;
        auto v = run_primal_dual(inst, ecfg);
        out.iterations = static_cast<int>(v.trace.size());
        out.log = to_trace_log(inst, v, Side::Dual);
        switch (v.kind) {
            case Verdict<CegarTermInstance>::Kind::DualWitness:
                out.kind = Result::Kind::Terminating;
                out.witness = Witness{Witness::Kind::Dwf, {}, *v.beta};
                break;
            case Verdict<CegarTermInstance>::Kind::PrimalWitness:
                out.kind = Result::Kind::Unknown;
                out.trace = *v.alpha;
                break;
            case Verdict<CegarTermInstance>::Kind::Budget: out.kind = Result::Kind::Budget; break;
        }
    }
    // independent certificate check from scratch
    if (out.kind == Result::Kind::Terminating) {
        if (!dual_check(sys, *out.witness).pass) {
            throw OracleError("termination certificate failed re-validation");
        }
    }
    return out;
}

} // namespace pdv::termination
