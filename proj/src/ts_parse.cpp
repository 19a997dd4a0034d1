#include "pdv/ts_parse.hpp"

#include <fstream>
#include <sstream>

namespace pdv::ts {

std::string read_file(std::string const & path) {
    std::ifstream in(path);
    if (!in) { throw std::runtime_error("cannot open " + path); }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

State parse_state(SExpr const & e) {
    State s;
    if (e.is_atom()) {
        if (auto q = rat_parse(e.atom); q && rat_is_int(*q)) {
            s.vec = {static_cast<long long>(rat_num(*q))};
        } else {
            if (e.atom.find('|') != std::string::npos) { e.fail("state label contains '|'"); }
            s.label = e.atom;
        }
        return s;
    }
    for (auto const & item : e.items) {
        auto q = rat_parse(item.atom_or_fail("state component"));
        if (!q || !rat_is_int(*q)) { item.fail("expected integer state component"); }
        s.vec.push_back(static_cast<long long>(rat_num(*q)));
    }
    if (s.vec.empty()) { e.fail("empty state"); }
    return s;
}

SExpr state_to_sexpr(State const & s) {
    if (!s.is_numeric()) { return sx_atom(s.label); }
    if (s.vec.size() == 1) { return sx_atom(std::to_string(s.vec[0])); }
    std::vector<SExpr> items;
    for (auto v : s.vec) { items.push_back(sx_atom(std::to_string(v))); }
    return sx_list(std::move(items));
}

namespace {

std::map<std::string, SExpr const *> keyword_args(SExpr const & e, size_t from) {
    std::map<std::string, SExpr const *> out;
    for (size_t i = from; i + 1 < e.size(); i += 2) {
        if (!e[i].is_atom() || e[i].atom.empty() || e[i].atom[0] != ':') {
            e[i].fail("expected a :keyword");
        }
        out[e[i].atom] = &e[i + 1];
    }
    if ((e.size() - from) % 2 != 0) { e[e.size() - 1].fail("dangling keyword argument"); }
    return out;
}

} // namespace

AnyTS parse_system(SExpr const & e) {
    if (!e.is_list() || e.size() == 0 || !e[0].is_atom("system")) {
        e.fail("expected (system ...)");
    }
    auto kw = keyword_args(e, 1);
    auto need = [&](char const * k) -> SExpr const & {
        auto it = kw.find(k);
        if (it == kw.end()) { e.fail(std::string("missing ") + k); }
        return *it->second;
    };
    if (kw.count(":states")) {
        ExplicitTS ts;
        if (kw.count(":vars")) {
            for (auto const & v : need(":vars").items) {
                ts.vars.push_back(v.atom_or_fail("variable"));
            }
        }
        for (auto const & se : need(":states").items) { ts.states.push_back(parse_state(se)); }
        for (auto const & se : need(":init").items) { ts.init.insert(parse_state(se)); }
        for (auto const & se : need(":bad").items) { ts.bad.insert(parse_state(se)); }
        for (auto const & te : need(":trans").items) {
            if (!te.is_list() || te.size() != 2) { te.fail("expected (from to)"); }
            ts.trans.emplace(parse_state(te[0]), parse_state(te[1]));
        }
        try {
            ts.validate();
        } catch (std::invalid_argument const & ex) { e.fail(ex.what()); }
        return ts;
    }
    SymbolicTS ts;
    for (auto const & v : need(":vars").items) { ts.vars.push_back(v.atom_or_fail("variable")); }
    lra::ParseEnv env;
    env.default_sort = lra::Sort::Rational;
    ts.init = lra::parse_qf(need(":init"), env);
    ts.bad = lra::parse_qf(need(":bad"), env);
    ts.trans = lra::parse_qf(need(":trans"), env);
    try {
        ts.validate();
    } catch (std::invalid_argument const & ex) { e.fail(ex.what()); }
    return ts;
}

AnyTS parse_system_file(std::string const & path) {
    return parse_system(sexpr_parse(read_file(path)));
}

std::vector<Predicate> parse_pool(SExpr const & e, std::vector<std::string> const & vars,
                                  bool integer_sorted) {
    if (!e.is_list() || e.size() == 0 || !e[0].is_atom("pool")) { e.fail("expected (pool ...)"); }
    std::vector<Predicate> out;
    std::set<std::string> ids;
    lra::ParseEnv env;
    env.default_sort = integer_sorted ? lra::Sort::Integer : lra::Sort::Rational;
    for (size_t i = 1; i < e.size(); ++i) {
        SExpr const & pe = e[i];
        if (!pe.is_list() || pe.size() < 2 || !pe[0].is_atom("pred")) {
            pe.fail("expected (pred name ...)");
        }
        Predicate p;
        p.id = pe[1].atom_or_fail("predicate name");
        if (!ids.insert(p.id).second) { pe.fail("duplicate predicate id " + p.id); }
        size_t j = 2;
        while (j < pe.size()) {
            if (pe[j].is_atom(":stratum")) {
                if (j + 1 >= pe.size()) { pe[j].fail("missing stratum value"); }
                auto q = rat_parse(pe[j + 1].atom_or_fail("stratum"));
                if (!q || !rat_is_int(*q) || *q < 0) { pe[j + 1].fail("bad stratum"); }
                p.stratum = static_cast<int>(rat_num(*q));
                j += 2;
            } else if (pe[j].is_atom(":states")) {
                if (j + 1 >= pe.size()) { pe[j].fail("missing state list"); }
                std::set<State> ext;
                for (auto const & se : pe[j + 1].items) { ext.insert(parse_state(se)); }
                p.extension = std::move(ext);
                j += 2;
            } else {
                p.formula = lra::parse_qf(pe[j], env);
                for (auto const & v : lra::free_vars(*p.formula)) {
                    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
                        pe[j].fail("predicate mentions unknown variable " + v);
                    }
                }
                j += 1;
            }
        }
        if (!p.extension && !p.formula) { pe.fail("predicate " + p.id + " has no definition"); }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Predicate> parse_pool_file(std::string const & path,
                                       std::vector<std::string> const & vars,
                                       bool integer_sorted) {
    return parse_pool(sexpr_parse(read_file(path)), vars, integer_sorted);
}

SExpr system_to_sexpr(ExplicitTS const & ts) {
    std::vector<SExpr> items{sx_atom("system")};
    if (!ts.vars.empty()) {
        std::vector<SExpr> vs;
        for (auto const & v : ts.vars) { vs.push_back(sx_atom(v)); }
        items.push_back(sx_atom(":vars"));
        items.push_back(sx_list(std::move(vs)));
    }
    std::vector<SExpr> st, in, ba, tr;
    for (auto const & s : ts.states) { st.push_back(state_to_sexpr(s)); }
    for (auto const & s : ts.init) { in.push_back(state_to_sexpr(s)); }
    for (auto const & s : ts.bad) { ba.push_back(state_to_sexpr(s)); }
    for (auto const & [a, b] : ts.trans) {
        tr.push_back(sx_list({state_to_sexpr(a), state_to_sexpr(b)}));
    }
    items.push_back(sx_atom(":states"));
    items.push_back(sx_list(std::move(st)));
    items.push_back(sx_atom(":init"));
    items.push_back(sx_list(std::move(in)));
    items.push_back(sx_atom(":trans"));
    items.push_back(sx_list(std::move(tr)));
    items.push_back(sx_atom(":bad"));
    items.push_back(sx_list(std::move(ba)));
    return sx_list(std::move(items));
}

SExpr system_to_sexpr(SymbolicTS const & ts) {
    std::vector<SExpr> vs;
    for (auto const & v : ts.vars) { vs.push_back(sx_atom(v)); }
    return sx_list({sx_atom("system"), sx_atom(":vars"), sx_list(std::move(vs)),
                    sx_atom(":init"), lra::qf_to_sexpr(ts.init), sx_atom(":trans"),
                    lra::qf_to_sexpr(ts.trans), sx_atom(":bad"), lra::qf_to_sexpr(ts.bad)});
}

SExpr pool_to_sexpr(std::vector<Predicate> const & pool) {
    std::vector<SExpr> items{sx_atom("pool")};
    for (auto const & p : pool) {
        std::vector<SExpr> pe{sx_atom("pred"), sx_atom(p.id), sx_atom(":stratum"),
                              sx_atom(std::to_string(p.stratum))};
        if (p.extension) {
            std::vector<SExpr> st;
            for (auto const & s : *p.extension) { st.push_back(state_to_sexpr(s)); }
            pe.push_back(sx_atom(":states"));
            pe.push_back(sx_list(std::move(st)));
        } else if (p.formula) {
            pe.push_back(lra::qf_to_sexpr(*p.formula));
        }
        items.push_back(sx_list(std::move(pe)));
    }
    return sx_list(std::move(items));
}

} // namespace pdv::ts
