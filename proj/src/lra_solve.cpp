#include "pdv/lra_solve.hpp"

#include <algorithm>
#include <cassert>

namespace pdv::lra {

namespace {

// One conjunct of the DNF: a list of canonical rational atoms.
using Conjunct = std::vector<Atom>;

void dnf_expand(QFFormula const & f, Conjunct cur, std::vector<Conjunct> & out) {
    switch (f.kind) {
        case QFFormula::Kind::True: out.push_back(std::move(cur)); return;
        case QFFormula::Kind::False: return;
        case QFFormula::Kind::Lit:
            if (f.negated || f.atom.t.mod) {
                throw SortMismatch("qf_sat requires rational-sorted literals");
            }
            cur.push_back(f.atom);
            out.push_back(std::move(cur));
            return;
        case QFFormula::Kind::And: {
            // cross product of kid expansions
            std::vector<Conjunct> acc{std::move(cur)};
            for (auto const & k : f.kids) {
                std::vector<Conjunct> next;
                for (auto const & c : acc) { dnf_expand(k, c, next); }
                acc = std::move(next);
                if (acc.empty()) { return; }
            }
            for (auto & c : acc) { out.push_back(std::move(c)); }
            return;
        }
        case QFFormula::Kind::Or:
            for (auto const & k : f.kids) { dnf_expand(k, cur, out); }
            return;
    }
}

struct EqBinding {
    std::string var;
    LinTerm rhs; // var := rhs
};

// Fourier-Motzkin feasibility for a conjunction of canonical atoms, with a
// model on success. Equalities are pivoted out first.
std::optional<Assignment> fm_feasible(Conjunct atoms) {
    std::vector<EqBinding> eqs;
    // pivot equalities
    for (bool changed = true; changed;) {
        changed = false;
        for (size_t i = 0; i < atoms.size(); ++i) {
            if (atoms[i].rel != Rel::Eq) { continue; }
            if (atoms[i].t.is_constant()) {
                if (atoms[i].t.constant != 0) { return std::nullopt; }
                atoms.erase(atoms.begin() + i);
                changed = true;
                break;
            }
            std::string v = atoms[i].t.coeffs.begin()->first;
            Rat c = atoms[i].t.coeffs.begin()->second;
            LinTerm rest = atoms[i].t;
            rest.coeffs.erase(v);
            LinTerm rhs = term_scale(Rat(-1) / c, rest);
            eqs.push_back({v, rhs});
            atoms.erase(atoms.begin() + i);
            for (auto & a : atoms) {
                if (a.t.coeffs.count(v)) {
                    a = make_atom(term_subst(a.t, v, rhs), a.rel,
                                  LinTerm::constant_term(0, a.t.sort));
                }
            }
            changed = true;
            break;
        }
    }
    // collect variables, eliminate one by one
    std::set<std::string> vars;
    for (auto const & a : atoms) {
        for (auto const & [v, c] : a.t.coeffs) { vars.insert(v); }
    }
    struct Step {
        std::string var;
        std::vector<Bound> bounds;
    };
    std::vector<Step> steps;
    while (!vars.empty()) {
        std::string x = *vars.rbegin(); // reverse lexicographic, deterministic
        vars.erase(std::prev(vars.end()));
        std::vector<Bound> bs = bounds_on(x, atoms);
        Conjunct rest;
        for (auto const & a : atoms) {
            if (a.t.coeffs.count(x) == 0) { rest.push_back(a); }
        }
        // combine lower x upper
        for (auto const & lo : bs) {
            if (!lo.is_lower) { continue; }
            for (auto const & hi : bs) {
                if (hi.is_lower) { continue; }
                Rel rel = (lo.strict || hi.strict) ? Rel::Lt : Rel::Le;
                Atom combined = make_atom(lo.term, rel, hi.term);
                if (auto cv = atom_const_value(combined)) {
                    if (!*cv) { return std::nullopt; }
                } else {
                    rest.push_back(combined);
                }
            }
        }
        steps.push_back({x, std::move(bs)});
        atoms = std::move(rest);
    }
    for (auto const & a : atoms) {
        auto cv = atom_const_value(a);
        assert(cv.has_value());
        if (!*cv) { return std::nullopt; }
    }
    // back-substitute a model
    Assignment m;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        std::optional<Rat> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (auto const & b : it->bounds) {
            Rat v = eval_term(b.term, m);
            if (b.is_lower) {
                if (!lo || v > *lo || (v == *lo && b.strict)) {
                    lo = v;
                    lo_strict = b.strict;
                }
            } else {
                if (!hi || v < *hi || (v == *hi && b.strict)) {
                    hi = v;
                    hi_strict = b.strict;
                }
            }
        }
        Rat val;
        if (lo && hi) {
            if (*lo == *hi) {
                assert(!lo_strict && !hi_strict);
                val = *lo;
            } else {
                val = (*lo + *hi) / 2;
            }
        } else if (lo) {
            val = lo_strict ? *lo + 1 : *lo;
        } else if (hi) {
            val = hi_strict ? *hi - 1 : *hi;
        } else {
            val = 0;
        }
        m[it->var] = val;
    }
    for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) {
        // rhs may mention variables with no remaining constraint
        for (auto const & [v, c] : it->rhs.coeffs) { m.emplace(v, 0); }
        m[it->var] = eval_term(it->rhs, m);
    }
    return m;
}

} // namespace

std::vector<Bound> bounds_on(std::string const & x, std::vector<Atom> const & atoms) {
    std::vector<Bound> out;
    for (auto const & a : atoms) {
        Rat c = a.t.coeff(x);
        if (c == 0) { continue; }
        LinTerm rest = a.t;
        rest.coeffs.erase(x);
        LinTerm bound = term_scale(Rat(-1) / c, rest);
        if (a.rel == Rel::Eq) {
            out.push_back({bound, false, true, true});
            out.push_back({bound, false, false, true});
        } else if (c > 0) { // c*x + r rel 0  ~~>  x rel bound
            out.push_back({bound, a.rel == Rel::Lt, false, false});
        } else { // bound rel x
            out.push_back({bound, a.rel == Rel::Lt, true, false});
        }
    }
    return out;
}

SatResult qf_sat(QFFormula const & f) {
    std::vector<Conjunct> dnf;
    dnf_expand(f, {}, dnf);
    for (auto & conj : dnf) {
        if (auto m = fm_feasible(conj)) {
            // every variable of f gets a value; don't-cares default to 0
            for (auto const & v : free_vars(f)) { m->emplace(v, 0); }
            if (!eval_ground(f, *m)) {
                std::string desc;
                for (auto const & [v, val] : *m) { desc += " " + v + "=" + rat_to_string(val); }
                throw std::logic_error("qf_sat produced a bad model:" + desc);
            }
            return {true, std::move(*m)};
        }
    }
    return {false, {}};
}

ValidityResult forall_validity(PrenexFormula const & f) {
    for (auto const & [q, v] : f.prefix) {
        if (q != Quant::Forall) { throw SortMismatch("forall_validity needs a universal prefix"); }
    }
    SatResult r = qf_sat(QFFormula::negate(f.matrix));
    if (!r.sat) { return {true, {}}; }
    for (auto const & [q, v] : f.prefix) { r.model.emplace(v.name, 0); }
    return {false, std::move(r.model)};
}

std::vector<Atom> implicant(QFFormula const & f, Assignment const & m) {
    std::vector<Atom> out;
    switch (f.kind) {
        case QFFormula::Kind::True: return out;
        case QFFormula::Kind::False: throw ModelMismatch("implicant of false");
        case QFFormula::Kind::Lit:
            if (!eval_atom(f.atom, m) || f.negated || f.atom.t.mod) {
                throw ModelMismatch("literal not satisfied by model");
            }
            out.push_back(f.atom);
            return out;
        case QFFormula::Kind::And:
            for (auto const & k : f.kids) {
                auto part = implicant(k, m);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        case QFFormula::Kind::Or:
            for (auto const & k : f.kids) {
                if (eval_ground(k, m)) { return implicant(k, m); }
            }
            throw ModelMismatch("no disjunct satisfied by model");
    }
    return out;
}

LinTerm mbp_term(std::string const & x, Assignment const & m, std::vector<Atom> const & atoms) {
    for (auto const & a : atoms) {
        if (!eval_atom(a, m)) { throw ModelMismatch("mbp_term: model falsifies an atom"); }
    }
    auto mx = m.find(x);
    if (mx == m.end()) { throw UnboundVariable(x); }
    std::vector<Bound> bs = bounds_on(x, atoms);
    // touched non-strict bound wins; prefer equalities, then lowers
    std::stable_sort(bs.begin(), bs.end(), [](Bound const & a, Bound const & b) {
        auto key = [](Bound const & c) { return c.from_eq ? 0 : c.is_lower ? 1 : 2; };
        return key(a) < key(b);
    });
    for (auto const & b : bs) {
        if (!b.strict && eval_term(b.term, m) == mx->second) { return b.term; }
    }
    std::optional<size_t> lo, hi;
    Rat lo_v, hi_v;
    for (size_t i = 0; i < bs.size(); ++i) {
        Rat v = eval_term(bs[i].term, m);
        if (bs[i].is_lower) {
            if (!lo || v > lo_v) {
                lo = i;
                lo_v = v;
            }
        } else {
            if (!hi || v < hi_v) {
                hi = i;
                hi_v = v;
            }
        }
    }
    if (lo && hi) { return term_scale(Rat(1) / 2, term_add(bs[*lo].term, bs[*hi].term)); }
    if (lo) { return term_add(bs[*lo].term, LinTerm::constant_term(1, bs[*lo].term.sort)); }
    if (hi) { return term_sub(bs[*hi].term, LinTerm::constant_term(1, bs[*hi].term.sort)); }
    return LinTerm::constant_term(mx->second);
}

} // namespace pdv::lra
