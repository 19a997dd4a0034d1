#include "pdv/ice.hpp"

#include <algorithm>

namespace pdv::ice {

using ts::ExplicitTS;
using ts::Predicate;
using ts::Sample;
using ts::State;
using ts::SymbolicTS;

Outcome l_ice(ExplicitTS const & sys, Sample const & sample, Predicate const & p) {
    for (auto const & s : sample.init) {
        if (!ts::pred_holds(p, s, sys.vars)) { return outcome_pm(-1); }
    }
    for (auto const & [a, b] : sample.trans) {
        if (ts::pred_holds(p, a, sys.vars) && !ts::pred_holds(p, b, sys.vars)) {
            return outcome_pm(-1);
        }
    }
    for (auto const & s : sample.bad) {
        if (ts::pred_holds(p, s, sys.vars)) { return outcome_pm(-1); }
    }
    return outcome_pm(1);
}

SampleS sample_join(SampleS const & a, SampleS const & b) {
    SampleS r = a;
    r.init.insert(b.init.begin(), b.init.end());
    r.trans.insert(b.trans.begin(), b.trans.end());
    r.bad.insert(b.bad.begin(), b.bad.end());
    return r;
}

Outcome l_ice(SampleS const & sample, Predicate const & p) {
    if (!p.formula) {
        throw ts::UndecidableCombination("explicit predicate on a rational sample");
    }
    for (auto const & m : sample.init) {
        if (!lra::eval_ground(*p.formula, m)) { return outcome_pm(-1); }
    }
    for (auto const & [a, b] : sample.trans) {
        if (lra::eval_ground(*p.formula, a) && !lra::eval_ground(*p.formula, b)) {
            return outcome_pm(-1);
        }
    }
    for (auto const & m : sample.bad) {
        if (lra::eval_ground(*p.formula, m)) { return outcome_pm(-1); }
    }
    return outcome_pm(1);
}

std::optional<Sample> teacher(ExplicitTS const & sys, Predicate const & p, bool batch) {
    Sample out;
    auto holds = [&](State const & s) { return ts::pred_holds(p, s, sys.vars); };
    for (auto const & s : sys.states) {
        if (sys.init.count(s) && !holds(s)) {
            out.init.insert(s);
            if (!batch) { return out; }
        }
    }
    for (auto const & [a, b] : sys.trans) {
        if (holds(a) && !holds(b)) {
            out.trans.emplace(a, b);
            if (!batch) { return out; }
        }
    }
    for (auto const & s : sys.states) {
        if (sys.bad.count(s) && holds(s)) {
            out.bad.insert(s);
            if (!batch) { return out; }
        }
    }
    if (out.empty()) { return std::nullopt; }
    return out;
}

std::optional<SampleS> teacher(SymbolicTS const & sys, Predicate const & p) {
    auto v = ts::invariant_check(sys, {p});
    if (!v) { return std::nullopt; }
    SampleS out;
    auto project = [&](lra::Assignment const & m, bool primed) {
        lra::Assignment r;
        for (auto const & var : sys.vars) {
            std::string key = primed ? sys.primed(var) : var;
            auto it = m.find(key);
            r[var] = it == m.end() ? Rat(0) : it->second;
        }
        return r;
    };
    switch (v->kind) {
        case ts::Violation::Kind::Initiation: out.init.insert(project(*v->model, false)); break;
        case ts::Violation::Kind::Consecution:
            out.trans.emplace(project(*v->model, false), project(*v->model, true));
            break;
        case ts::Violation::Kind::Safety: out.bad.insert(project(*v->model, false)); break;
    }
    return out;
}

namespace {

template <typename TryFn>
std::optional<Predicate> learner_scan(std::vector<Predicate> const & pool, TryFn consistent) {
    std::optional<size_t> best;
    for (size_t i = 0; i < pool.size(); ++i) {
        if ((!best || pool[i].stratum < pool[*best].stratum) && consistent(pool[i])) {
            best = i;
        }
    }
    if (!best) { return std::nullopt; }
    return pool[*best];
}

} // namespace

std::optional<Predicate> learner(ExplicitTS const & sys, Sample const & sample,
                                 std::vector<Predicate> const & pool) {
    return learner_scan(pool,
                        [&](Predicate const & p) { return l_ice(sys, sample, p).value > 0; });
}

std::optional<Predicate> learner(SampleS const & sample, std::vector<Predicate> const & pool) {
    return learner_scan(pool, [&](Predicate const & p) { return l_ice(sample, p).value > 0; });
}

namespace {

struct ExplicitIceInstance {
    using X = Sample;
    using Y = Predicate;

    ExplicitTS const & sys;
    std::vector<Predicate> const & pool;
    Config const & cfg;

    Outcome evaluate(X const & s, Y const & p) { return l_ice(sys, s, p); }
    DualCheckResult<X> dual_witness_check(Y const & p) {
        if (auto s = teacher(sys, p, cfg.batch_teacher)) { return CounterPrimal<X>{*s}; }
        return DualOk{};
    }
    PrimalCheckResult<Y> primal_witness_check(X const & s) {
        if (auto p = learner(sys, s, pool)) { return CounterDual<Y>{*p}; }
        return PrimalOk{};
    }
    X initial_x() const { return {}; }
    Y initial_y() const {
        Predicate top;
        top.id = "true";
        top.formula = lra::QFFormula::tt();
        return top;
    }
    X join_x(X const & a, X const & b) const { return ts::sample_join(a, b); }
    std::string describe_x(X const & s) const { return ts::sample_to_string(s); }
    std::string describe_y(Y const & p) const { return p.id; }
};

struct SymbolicIceInstance {
    using X = SampleS;
    using Y = Predicate;

    SymbolicTS const & sys;
    std::vector<Predicate> const & pool;

    Outcome evaluate(X const & s, Y const & p) { return l_ice(s, p); }
    DualCheckResult<X> dual_witness_check(Y const & p) {
        if (auto s = teacher(sys, p)) { return CounterPrimal<X>{*s}; }
        return DualOk{};
    }
    PrimalCheckResult<Y> primal_witness_check(X const & s) {
        if (auto p = learner(s, pool)) { return CounterDual<Y>{*p}; }
        return PrimalOk{};
    }
    X initial_x() const { return {}; }
    Y initial_y() const {
        Predicate top;
        top.id = "true";
        top.formula = lra::QFFormula::tt();
        return top;
    }
    X join_x(X const & a, X const & b) const { return sample_join(a, b); }
    std::string describe_x(X const & s) const {
        return "(|I'|=" + std::to_string(s.init.size()) +
               " |T'|=" + std::to_string(s.trans.size()) +
               " |B'|=" + std::to_string(s.bad.size()) + ")";
    }
    std::string describe_y(Y const & p) const { return p.id; }
};

template <typename Inst, typename SampleT>
Result run_ice_impl(Inst & inst, Config const & cfg, SampleT Result::*sample_field) {
    EngineConfig ecfg;
    ecfg.accumulate_x = true;
    ecfg.max_iterations = cfg.max_iterations;
    ecfg.start_side = Side::Primal;
    ecfg.random_seed = cfg.seed;
    auto v = run_primal_dual(inst, ecfg);
    Result out;
    out.iterations = static_cast<int>(v.trace.size());
    out.log = to_trace_log(inst, v, Side::Primal);
    switch (v.kind) {
        case Verdict<Inst>::Kind::DualWitness:
            out.kind = Result::Kind::Safe;
            out.invariant = *v.beta;
            break;
        case Verdict<Inst>::Kind::PrimalWitness:
            out.kind = Result::Kind::Unknown;
            out.*sample_field = *v.alpha;
            break;
        case Verdict<Inst>::Kind::Budget: out.kind = Result::Kind::Budget; break;
    }
    return out;
}

} // namespace

Result run_ice(ExplicitTS const & sys, std::vector<Predicate> const & pool, Config const & cfg) {
    ExplicitIceInstance inst{sys, pool, cfg};
    return run_ice_impl(inst, cfg, &Result::sample);
}

Result run_ice(SymbolicTS const & sys, std::vector<Predicate> const & pool, Config const & cfg) {
    SymbolicIceInstance inst{sys, pool};
    return run_ice_impl(inst, cfg, &Result::sample_s);
}

} // namespace pdv::ice
