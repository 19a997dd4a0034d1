#include "pdv/lra.hpp"

#include <algorithm>
#include <cassert>

namespace pdv::lra {

LinTerm LinTerm::variable(std::string const & name, Sort s) {
    LinTerm t;
    t.coeffs[name] = 1;
    t.sort = s;
    return t;
}

LinTerm LinTerm::constant_term(Rat const & c, Sort s) {
    LinTerm t;
    t.constant = c;
    t.sort = s;
    return t;
}

static void drop_zeros(LinTerm & t) {
    for (auto it = t.coeffs.begin(); it != t.coeffs.end();) {
        if (it->second == 0) {
            it = t.coeffs.erase(it);
        } else {
            ++it;
        }
    }
}

LinTerm term_add(LinTerm const & a, LinTerm const & b) {
    if (a.sort != b.sort) { throw SortMismatch("adding terms of different sorts"); }
    if (a.mod || b.mod) { throw SortMismatch("mod-wrapped term used inside arithmetic"); }
    LinTerm r = a;
    for (auto const & [v, c] : b.coeffs) { r.coeffs[v] += c; }
    r.constant += b.constant;
    drop_zeros(r);
    return r;
}

LinTerm term_scale(Rat const & c, LinTerm const & a) {
    if (a.mod) { throw SortMismatch("mod-wrapped term used inside arithmetic"); }
    if (a.sort == Sort::Integer && !rat_is_int(c)) {
        throw SortMismatch("non-integer coefficient on integer term");
    }
    LinTerm r = a;
    if (c == 0) { return LinTerm::constant_term(0, a.sort); }
    for (auto & [v, k] : r.coeffs) { k *= c; }
    r.constant *= c;
    return r;
}

LinTerm term_sub(LinTerm const & a, LinTerm const & b) { return term_add(a, term_scale(-1, b)); }

LinTerm term_mod(LinTerm const & a, BigInt const & n) {
    if (a.sort != Sort::Integer) { throw SortMismatch("mod on a rational term"); }
    if (a.mod) { throw SortMismatch("nested mod"); }
    if (n <= 0) { throw SortMismatch("mod by non-positive constant"); }
    LinTerm r = a;
    r.mod = n;
    return r;
}

LinTerm term_subst(LinTerm const & a, std::string const & v, LinTerm const & t) {
    if (a.sort != t.sort) { throw SortMismatch("substituting " + v); }
    auto it = a.coeffs.find(v);
    if (it == a.coeffs.end()) { return a; }
    Rat c = it->second;
    LinTerm rest = a;
    rest.coeffs.erase(v);
    auto m = rest.mod;
    rest.mod.reset();
    LinTerm r = term_add(rest, term_scale(c, t));
    r.mod = m;
    return r;
}

Atom make_atom(LinTerm const & lhs, Rel rel, LinTerm const & rhs) {
    if (lhs.sort != rhs.sort) { throw SortMismatch("atom sides differ in sort"); }
    Atom a;
    a.rel = rel;
    if (lhs.mod || rhs.mod) {
        // "(t mod n) rel c" with a constant comparison side; ground eval only.
        if (lhs.mod && rhs.mod) { throw SortMismatch("mod on both atom sides"); }
        if (rhs.mod && rel != Rel::Eq) {
            throw SortMismatch("mod term must be on the left of < or <=");
        }
        LinTerm const & plain = rhs.mod ? lhs : rhs;
        if (!plain.is_constant()) { throw SortMismatch("mod atom must compare to a constant"); }
        a.t = rhs.mod ? rhs : lhs;
        a.mod_rhs = plain.constant;
        return a;
    }
    a.t = term_sub(lhs, rhs);
    // canonical scaling
    if (a.t.sort == Sort::Rational && !a.t.coeffs.empty()) {
        Rat lead = a.t.coeffs.begin()->second;
        Rat scale = 1 / abs(lead);
        if (rel == Rel::Eq && lead < 0) { scale = -scale; }
        a.t = term_scale(scale, a.t);
    } else if (a.t.sort == Sort::Integer && !a.t.coeffs.empty() && rel == Rel::Eq) {
        if (a.t.coeffs.begin()->second < 0) { a.t = term_scale(-1, a.t); }
    }
    return a;
}

std::optional<bool> atom_const_value(Atom const & a) {
    if (!a.t.is_constant()) { return std::nullopt; }
    Rat v = a.t.constant;
    if (a.t.mod) {
        if (!rat_is_int(v)) { return std::nullopt; }
        v = Rat(mod_nonneg(rat_num(v), *a.t.mod)) - a.mod_rhs;
    }
    switch (a.rel) {
        case Rel::Lt: return v < 0;
        case Rel::Le: return v <= 0;
        case Rel::Eq: return v == 0;
    }
    return std::nullopt;
}

Rat eval_term(LinTerm const & t, Assignment const & a) {
    Rat v = t.constant;
    for (auto const & [var, c] : t.coeffs) {
        auto it = a.find(var);
        if (it == a.end()) { throw UnboundVariable(var); }
        v += c * it->second;
    }
    if (t.mod) {
        if (!rat_is_int(v)) { throw SortMismatch("mod of non-integer value"); }
        v = Rat(mod_nonneg(rat_num(v), *t.mod));
    }
    return v;
}

bool eval_atom(Atom const & at, Assignment const & a) {
    Rat v = eval_term(at.t, a);
    if (at.t.mod) { v -= at.mod_rhs; }
    switch (at.rel) {
        case Rel::Lt: return v < 0;
        case Rel::Le: return v <= 0;
        case Rel::Eq: return v == 0;
    }
    return false;
}

QFFormula QFFormula::lit(Atom a, bool neg) {
    if (auto c = atom_const_value(a)) { return (*c != neg) ? tt() : ff(); }
    if (neg && a.t.sort == Sort::Rational) {
        // normalize rational negation away
        switch (a.rel) {
            case Rel::Lt: { // not(t < 0) ~~> -t <= 0
                Atom b = make_atom(LinTerm::constant_term(0), Rel::Le, a.t);
                return lit(b, false);
            }
            case Rel::Le: { // not(t <= 0) ~~> -t < 0
                Atom b = make_atom(LinTerm::constant_term(0), Rel::Lt, a.t);
                return lit(b, false);
            }
            case Rel::Eq: { // not(t = 0) ~~> t < 0 or -t < 0
                Atom lo = make_atom(a.t, Rel::Lt, LinTerm::constant_term(0));
                Atom hi = make_atom(LinTerm::constant_term(0), Rel::Lt, a.t);
                return make_or({lit(lo, false), lit(hi, false)});
            }
        }
    }
    QFFormula f;
    f.kind = Kind::Lit;
    f.atom = std::move(a);
    f.negated = neg;
    return f;
}

QFFormula QFFormula::make_and(std::vector<QFFormula> kids) {
    std::vector<QFFormula> flat;
    for (auto & k : kids) {
        if (k.kind == Kind::False) { return ff(); }
        if (k.kind == Kind::True) { continue; }
        if (k.kind == Kind::And) {
            for (auto & g : k.kids) { flat.push_back(std::move(g)); }
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) { return tt(); }
    if (flat.size() == 1) { return flat[0]; }
    QFFormula f;
    f.kind = Kind::And;
    f.kids = std::move(flat);
    return f;
}

QFFormula QFFormula::make_or(std::vector<QFFormula> kids) {
    std::vector<QFFormula> flat;
    for (auto & k : kids) {
        if (k.kind == Kind::True) { return tt(); }
        if (k.kind == Kind::False) { continue; }
        if (k.kind == Kind::Or) {
            for (auto & g : k.kids) { flat.push_back(std::move(g)); }
        } else {
            flat.push_back(std::move(k));
        }
    }
    if (flat.empty()) { return ff(); }
    if (flat.size() == 1) { return flat[0]; }
    QFFormula f;
    f.kind = Kind::Or;
    f.kids = std::move(flat);
    return f;
}

QFFormula QFFormula::negate(QFFormula const & f) {
    switch (f.kind) {
        case Kind::True: return ff();
        case Kind::False: return tt();
        case Kind::Lit: return lit(f.atom, !f.negated);
        case Kind::And: {
            std::vector<QFFormula> kids;
            for (auto const & k : f.kids) { kids.push_back(negate(k)); }
            return make_or(std::move(kids));
        }
        case Kind::Or: {
            std::vector<QFFormula> kids;
            for (auto const & k : f.kids) { kids.push_back(negate(k)); }
            return make_and(std::move(kids));
        }
    }
    return tt();
}

bool eval_ground(QFFormula const & f, Assignment const & a) {
    switch (f.kind) {
        case QFFormula::Kind::True: return true;
        case QFFormula::Kind::False: return false;
        case QFFormula::Kind::Lit: return eval_atom(f.atom, a) != f.negated;
        case QFFormula::Kind::And:
            for (auto const & k : f.kids) {
                if (!eval_ground(k, a)) { return false; }
            }
            return true;
        case QFFormula::Kind::Or:
            for (auto const & k : f.kids) {
                if (eval_ground(k, a)) { return true; }
            }
            return false;
    }
    return false;
}

QFFormula qf_subst(QFFormula const & f, std::string const & v, LinTerm const & t) {
    switch (f.kind) {
        case QFFormula::Kind::True:
        case QFFormula::Kind::False: return f;
        case QFFormula::Kind::Lit: {
            Atom a = f.atom;
            if (a.t.coeffs.count(v) == 0) { return f; }
            if (a.t.mod) {
                LinTerm nt = term_subst(a.t, v, t);
                Atom b = a;
                b.t = nt;
                if (auto c = atom_const_value(b)) {
                    return (*c != f.negated) ? QFFormula::tt() : QFFormula::ff();
                }
                QFFormula g = f;
                g.atom = b;
                return g;
            }
            LinTerm nt = term_subst(a.t, v, t);
            Atom b = make_atom(nt, a.rel, LinTerm::constant_term(0, nt.sort));
            return QFFormula::lit(b, f.negated);
        }
        case QFFormula::Kind::And: {
            std::vector<QFFormula> kids;
            for (auto const & k : f.kids) { kids.push_back(qf_subst(k, v, t)); }
            return QFFormula::make_and(std::move(kids));
        }
        case QFFormula::Kind::Or: {
            std::vector<QFFormula> kids;
            for (auto const & k : f.kids) { kids.push_back(qf_subst(k, v, t)); }
            return QFFormula::make_or(std::move(kids));
        }
    }
    return f;
}

void collect_vars(QFFormula const & f, std::set<std::string> & out) {
    if (f.kind == QFFormula::Kind::Lit) {
        for (auto const & [v, c] : f.atom.t.coeffs) { out.insert(v); }
    }
    for (auto const & k : f.kids) { collect_vars(k, out); }
}

std::set<std::string> free_vars(QFFormula const & f) {
    std::set<std::string> s;
    collect_vars(f, s);
    return s;
}

PrenexFormula prenex_subst(PrenexFormula const & f, std::string const & v, LinTerm const & t) {
    for (auto const & [q, var] : f.prefix) {
        if (var.name == v) { throw SortMismatch("substitution for a bound variable " + v); }
        assert(t.coeffs.count(var.name) == 0 && "capturing substitution");
    }
    PrenexFormula r = f;
    r.matrix = qf_subst(f.matrix, v, t);
    return r;
}

PrenexFormula prenex_negate(PrenexFormula const & f) {
    PrenexFormula r;
    for (auto const & [q, var] : f.prefix) {
        r.prefix.emplace_back(q == Quant::Forall ? Quant::Exists : Quant::Forall, var);
    }
    r.matrix = QFFormula::negate(f.matrix);
    return r;
}

// --- parsing / printing ---------------------------------------------------

static Sort var_sort(std::string const & name, ParseEnv const & env) {
    auto it = env.sorts.find(name);
    return it == env.sorts.end() ? env.default_sort : it->second;
}

LinTerm parse_term(SExpr const & e, ParseEnv const & env) {
    if (e.is_atom()) {
        if (auto q = rat_parse(e.atom)) {
            return LinTerm::constant_term(*q, env.default_sort);
        }
        return LinTerm::variable(e.atom, var_sort(e.atom, env));
    }
    if (e.size() == 0) { e.fail("empty term"); }
    std::string const & op = e[0].atom_or_fail("term operator");
    auto unify = [&](LinTerm a, LinTerm b, auto fn) {
        // constants adopt the other side's sort
        if (a.sort != b.sort) {
            if (a.is_constant() && rat_is_int(a.constant)) { a.sort = b.sort; }
            else if (b.is_constant() && rat_is_int(b.constant)) { b.sort = a.sort; }
        }
        return fn(a, b);
    };
    if (op == "+") {
        if (e.size() < 2) { e.fail("+ needs arguments"); }
        LinTerm acc = parse_term(e[1], env);
        for (size_t i = 2; i < e.size(); ++i) {
            acc = unify(acc, parse_term(e[i], env),
                        [](auto const & a, auto const & b) { return term_add(a, b); });
        }
        return acc;
    }
    if (op == "-") {
        if (e.size() == 2) { return term_scale(-1, parse_term(e[1], env)); }
        if (e.size() == 3) {
            return unify(parse_term(e[1], env), parse_term(e[2], env),
                         [](auto const & a, auto const & b) { return term_sub(a, b); });
        }
        e.fail("- needs one or two arguments");
    }
    if (op == "*") {
        if (e.size() != 3) { e.fail("* needs two arguments"); }
        LinTerm a = parse_term(e[1], env);
        LinTerm b = parse_term(e[2], env);
        if (a.is_constant()) { return term_scale(a.constant, b); }
        if (b.is_constant()) { return term_scale(b.constant, a); }
        e.fail("nonlinear product");
    }
    if (op == "/") {
        if (e.size() != 3) { e.fail("/ needs two arguments"); }
        LinTerm a = parse_term(e[1], env);
        LinTerm b = parse_term(e[2], env);
        if (!b.is_constant() || b.constant == 0) { e.fail("division by non-constant or zero"); }
        return term_scale(1 / b.constant, a);
    }
    if (op == "mod") {
        if (e.size() != 3) { e.fail("mod needs two arguments"); }
        LinTerm a = parse_term(e[1], env);
        LinTerm n = parse_term(e[2], env);
        if (!n.is_constant() || !rat_is_int(n.constant)) { e.fail("mod by non-constant"); }
        if (a.sort != Sort::Integer) {
            if (a.is_constant() && rat_is_int(a.constant)) { a.sort = Sort::Integer; }
            else { e.fail("mod on a rational term"); }
        }
        return term_mod(a, rat_num(n.constant));
    }
    e.fail("unknown term operator '" + op + "'");
}

QFFormula parse_qf(SExpr const & e, ParseEnv const & env) {
    if (e.is_atom("true")) { return QFFormula::tt(); }
    if (e.is_atom("false")) { return QFFormula::ff(); }
    if (!e.is_list() || e.size() == 0) { e.fail("expected formula"); }
    std::string const & op = e[0].atom_or_fail("formula operator");
    if (op == "and" || op == "or") {
        std::vector<QFFormula> kids;
        for (size_t i = 1; i < e.size(); ++i) { kids.push_back(parse_qf(e[i], env)); }
        return op == "and" ? QFFormula::make_and(std::move(kids))
                           : QFFormula::make_or(std::move(kids));
    }
    if (op == "not") {
        if (e.size() != 2) { e.fail("not needs one argument"); }
        return QFFormula::negate(parse_qf(e[1], env));
    }
    if (op == "<" || op == "<=" || op == "=" || op == ">" || op == ">=") {
        if (e.size() != 3) { e.fail("relation needs two arguments"); }
        LinTerm a = parse_term(e[1], env);
        LinTerm b = parse_term(e[2], env);
        if (a.sort != b.sort) {
            if (a.is_constant() && rat_is_int(a.constant)) { a.sort = b.sort; }
            else if (b.is_constant() && rat_is_int(b.constant)) { b.sort = a.sort; }
            else { e.fail("atom sides differ in sort"); }
        }
        try {
            if (op == "<") { return QFFormula::lit(make_atom(a, Rel::Lt, b)); }
            if (op == "<=") { return QFFormula::lit(make_atom(a, Rel::Le, b)); }
            if (op == "=") { return QFFormula::lit(make_atom(a, Rel::Eq, b)); }
            if (op == ">") { return QFFormula::lit(make_atom(b, Rel::Lt, a)); }
            return QFFormula::lit(make_atom(b, Rel::Le, a));
        } catch (SortMismatch const & ex) { e.fail(ex.what()); }
    }
    e.fail("unknown formula operator '" + op + "'");
}

PrenexFormula parse_prenex(SExpr const & e, ParseEnv const & env) {
    if (e.is_list() && e.size() == 3 &&
        (e[0].is_atom("forall") || e[0].is_atom("exists"))) {
        Quant q = e[0].is_atom("forall") ? Quant::Forall : Quant::Exists;
        if (!e[1].is_list()) { e[1].fail("expected variable list"); }
        ParseEnv inner = env;
        std::vector<std::pair<Quant, Var>> vars;
        for (auto const & ve : e[1].items) {
            std::string const & name = ve.atom_or_fail("variable");
            vars.emplace_back(q, Var{name, var_sort(name, env)});
            inner.sorts[name] = var_sort(name, env);
        }
        PrenexFormula body = parse_prenex(e[2], inner);
        PrenexFormula r;
        r.prefix = std::move(vars);
        for (auto & p : body.prefix) { r.prefix.push_back(std::move(p)); }
        for (size_t i = 0; i < r.prefix.size(); ++i) {
            for (size_t j = i + 1; j < r.prefix.size(); ++j) {
                if (r.prefix[i].second.name == r.prefix[j].second.name) {
                    e.fail("duplicate bound variable " + r.prefix[i].second.name);
                }
            }
        }
        r.matrix = std::move(body.matrix);
        return r;
    }
    PrenexFormula r;
    r.matrix = parse_qf(e, env);
    return r;
}

SExpr term_to_sexpr(LinTerm const & t) {
    std::vector<SExpr> parts;
    for (auto const & [v, c] : t.coeffs) {
        if (c == 1) {
            parts.push_back(sx_atom(v));
        } else {
            parts.push_back(sx_list({sx_atom("*"), sx_atom(rat_to_string(c)), sx_atom(v)}));
        }
    }
    if (t.constant != 0 || parts.empty()) { parts.push_back(sx_atom(rat_to_string(t.constant))); }
    SExpr body = parts.size() == 1 ? parts[0] : [&] {
        std::vector<SExpr> items;
        items.push_back(sx_atom("+"));
        for (auto & p : parts) { items.push_back(std::move(p)); }
        return sx_list(std::move(items));
    }();
    if (t.mod) { return sx_list({sx_atom("mod"), body, sx_atom(t.mod->str())}); }
    return body;
}

SExpr qf_to_sexpr(QFFormula const & f) {
    switch (f.kind) {
        case QFFormula::Kind::True: return sx_atom("true");
        case QFFormula::Kind::False: return sx_atom("false");
        case QFFormula::Kind::Lit: {
            char const * rel = f.atom.rel == Rel::Lt ? "<" : f.atom.rel == Rel::Le ? "<=" : "=";
            SExpr lhs = term_to_sexpr(f.atom.t);
            SExpr rhs = sx_atom(f.atom.t.mod ? rat_to_string(f.atom.mod_rhs) : "0");
            SExpr a = sx_list({sx_atom(rel), std::move(lhs), std::move(rhs)});
            if (f.negated) { return sx_list({sx_atom("not"), std::move(a)}); }
            return a;
        }
        case QFFormula::Kind::And:
        case QFFormula::Kind::Or: {
            std::vector<SExpr> items;
            items.push_back(sx_atom(f.kind == QFFormula::Kind::And ? "and" : "or"));
            for (auto const & k : f.kids) { items.push_back(qf_to_sexpr(k)); }
            return sx_list(std::move(items));
        }
    }
    return sx_atom("true");
}

SExpr prenex_to_sexpr(PrenexFormula const & f) {
    SExpr body = qf_to_sexpr(f.matrix);
    for (auto it = f.prefix.rbegin(); it != f.prefix.rend(); ++it) {
        body = sx_list({sx_atom(it->first == Quant::Forall ? "forall" : "exists"),
                        sx_list({sx_atom(it->second.name)}), std::move(body)});
    }
    return body;
}

std::string term_to_string(LinTerm const & t) { return sexpr_to_string(term_to_sexpr(t)); }
std::string qf_to_string(QFFormula const & f) { return sexpr_to_string(qf_to_sexpr(f)); }
std::string prenex_to_string(PrenexFormula const & f) {
    return sexpr_to_string(prenex_to_sexpr(f));
}

} // namespace pdv::lra
