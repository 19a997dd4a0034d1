#include "pdv/lra.hpp"
#include "pdv/lra_solve.hpp"

#include <doctest.h>

#include <random>

using namespace pdv;
using namespace pdv::lra;

namespace {

QFFormula qf(std::string const & s, Sort def = Sort::Rational) {
    ParseEnv env;
    env.default_sort = def;
    return parse_qf(sexpr_parse(s), env);
}

PrenexFormula pn(std::string const & s, Sort def = Sort::Rational) {
    ParseEnv env;
    env.default_sort = def;
    return parse_prenex(sexpr_parse(s), env);
}

// theta(w,x,y,z) = (y < 1 or 2w < y) and (z < y or x < z)
QFFormula theta() { return qf("(and (or (< y 1) (< (* 2 w) y)) (or (< z y) (< x z)))"); }

} // namespace

TEST_CASE("ground evaluation") {
    Assignment a{{"x", 2}};
    CHECK(eval_ground(qf("(and (<= x 3) (<= 2 x))"), a));
    CHECK_FALSE(eval_ground(qf("(< x 2)"), a));

    // first conjunct of the first play branch: theta(0,-1,-1,-1) is false
    Assignment b{{"w", 0}, {"x", -1}, {"y", -1}, {"z", -1}};
    CHECK_FALSE(eval_ground(theta(), b));
    // and the midpoint branch theta(0,-1,-1,-1/2) is true
    Assignment c{{"w", 0}, {"x", -1}, {"y", -1}, {"z", Rat(-1) / 2}};
    CHECK(eval_ground(theta(), c));

    CHECK(eval_ground(qf("(= (mod 5 3) 2)", Sort::Integer), {}));
    CHECK_FALSE(eval_ground(qf("(= (mod 5 3) 1)", Sort::Integer), {}));
    CHECK(eval_ground(qf("(= (mod x 2) 0)", Sort::Integer), {{"x", -4}}));
    CHECK_FALSE(eval_ground(qf("(= (mod x 2) 0)", Sort::Integer), {{"x", -3}}));

    CHECK_THROWS_AS(eval_ground(qf("(< x y)"), a), UnboundVariable);
}

TEST_CASE("qf_sat basics") {
    CHECK_FALSE(qf_sat(qf("(and (< x y) (< y x))")).sat);
    auto r = qf_sat(qf("(and (<= x 3) (<= 2 x))"));
    REQUIRE(r.sat);
    CHECK(r.model.at("x") >= 2);
    CHECK(r.model.at("x") <= 3);

    CHECK(qf_sat(qf("(or (< x 0) (<= 0 x))")).sat);
    CHECK_FALSE(qf_sat(qf("(and (= x 1) (= x 2))")).sat);
    auto eq = qf_sat(qf("(and (= (+ x y) 4) (= (- x y) 0) (< 1 x))"));
    REQUIRE(eq.sat);
    CHECK(eq.model.at("x") == 2);
    CHECK(eq.model.at("y") == 2);
    // strict chain feasibility
    CHECK(qf_sat(qf("(and (< x y) (< y z) (< z 1) (< 0 x))")).sat);
    CHECK_FALSE(qf_sat(qf("(and (< x y) (< y z) (< z x))")).sat);
}

TEST_CASE("qf_sat agrees with grid sampling on random conjunctions") {
    std::mt19937_64 rng(20240917);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> natoms(1, 5);
    std::uniform_int_distribution<int> nrel(0, 2);
    char const * vars[3] = {"x", "y", "z"};
    for (int round = 0; round < 300; ++round) {
        std::vector<QFFormula> lits;
        for (int i = 0, n = natoms(rng); i < n; ++i) {
            LinTerm t;
            t.sort = Sort::Rational;
            for (auto v : vars) {
                int c = coef(rng);
                if (c != 0) { t.coeffs[v] = c; }
            }
            t.constant = coef(rng);
            Rel rel = nrel(rng) == 0 ? Rel::Lt : nrel(rng) == 1 ? Rel::Le : Rel::Eq;
            lits.push_back(QFFormula::lit(make_atom(t, rel, LinTerm::constant_term(0))));
        }
        QFFormula f = QFFormula::make_and(lits);
        auto r = qf_sat(f);
        bool grid_hit = false;
        for (int gx = -4; gx <= 4 && !grid_hit; ++gx) {
            for (int gy = -4; gy <= 4 && !grid_hit; ++gy) {
                for (int gz = -4; gz <= 4 && !grid_hit; ++gz) {
                    Assignment a{{"x", Rat(gx) / 2}, {"y", Rat(gy) / 2}, {"z", Rat(gz) / 2}};
                    grid_hit = eval_ground(f, a);
                }
            }
        }
        if (grid_hit) { CHECK(r.sat); }
        if (r.sat) { CHECK(eval_ground(f, r.model)); }
    }
}

TEST_CASE("fm equisatisfiability under variable elimination") {
    // any model of the x-eliminated system extends back to the original
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int round = 0; round < 200; ++round) {
        std::vector<Atom> atoms;
        std::vector<QFFormula> lits;
        for (int i = 0; i < 4; ++i) {
            LinTerm t;
            int cx = coef(rng), cy = coef(rng);
            if (cx != 0) { t.coeffs["x"] = cx; }
            if (cy != 0) { t.coeffs["y"] = cy; }
            t.constant = coef(rng);
            Atom a = make_atom(t, coef(rng) > 0 ? Rel::Lt : Rel::Le, LinTerm::constant_term(0));
            atoms.push_back(a);
            lits.push_back(QFFormula::lit(a));
        }
        QFFormula f = QFFormula::make_and(lits);
        auto full = qf_sat(f);
        // eliminate x by hand: lower/upper bound combinations
        auto bs = bounds_on("x", atoms);
        std::vector<QFFormula> rest;
        for (auto const & a : atoms) {
            if (a.t.coeff("x") == 0) { rest.push_back(QFFormula::lit(a)); }
        }
        for (auto const & lo : bs) {
            if (!lo.is_lower) { continue; }
            for (auto const & hi : bs) {
                if (hi.is_lower) { continue; }
                Rel rel = (lo.strict || hi.strict) ? Rel::Lt : Rel::Le;
                rest.push_back(QFFormula::lit(make_atom(lo.term, rel, hi.term)));
            }
        }
        auto reduced = qf_sat(QFFormula::make_and(rest));
        CHECK(full.sat == reduced.sat);
        if (reduced.sat) {
            // re-solve for x under the reduced model
            QFFormula g = f;
            for (auto const & [v, val] : reduced.model) {
                if (v != "x") { g = qf_subst(g, v, LinTerm::constant_term(val)); }
            }
            CHECK(qf_sat(g).sat);
        }
    }
}

TEST_CASE("substitution") {
    // (x < y)[y := x+1] folds to a tautology
    QFFormula f = qf("(< x y)");
    ParseEnv env;
    LinTerm t = parse_term(sexpr_parse("(+ x 1)"), env);
    CHECK(qf_subst(f, "y", t) == QFFormula::tt());

    // (2w < y)[w := (w+y)/2] normalizes to w < 0
    QFFormula g = qf("(< (* 2 w) y)");
    LinTerm half = parse_term(sexpr_parse("(/ (+ w y) 2)"), env);
    CHECK(qf_subst(g, "w", half) == qf("(< w 0)"));

    CHECK_THROWS_AS(
        term_subst(LinTerm::variable("x", Sort::Rational), "x",
                   LinTerm::variable("n", Sort::Integer)),
        SortMismatch);
}

TEST_CASE("forall_validity") {
    CHECK(forall_validity(pn("(forall (x) (<= x x))")).valid);
    // forall x z. theta(-2, x, x+1, z) is valid
    PrenexFormula f = pn("(forall (x z) (and (or (< (+ x 1) 1) (< -4 (+ x 1))) "
                         "(or (< z (+ x 1)) (< x z))))");
    CHECK(forall_validity(f).valid);

    auto r = forall_validity(pn("(forall (x) (< x 0))"));
    REQUIRE_FALSE(r.valid);
    CHECK(r.counter_model.count("x") == 1);
    CHECK(r.counter_model.at("x") >= 0);
}

TEST_CASE("mbp_term selection rule") {
    ParseEnv env;
    auto atom = [&](std::string const & s) {
        QFFormula f = qf(s);
        REQUIRE(f.kind == QFFormula::Kind::Lit);
        return f.atom;
    };
    // touched non-strict bound
    {
        std::vector<Atom> as{atom("(< 0 x)"), atom("(<= x y)")};
        Assignment m{{"x", 3}, {"y", 3}};
        CHECK(mbp_term("x", m, as) == LinTerm::variable("y"));
    }
    // midpoint of strict bounds: (0 + y)/2
    {
        std::vector<Atom> as{atom("(< 0 x)"), atom("(< x y)")};
        Assignment m{{"x", 1}, {"y", 3}};
        LinTerm expect = term_scale(Rat(1) / 2, LinTerm::variable("y"));
        CHECK(mbp_term("x", m, as) == expect);
    }
    // unconstrained: the model value
    {
        std::vector<Atom> as;
        Assignment m{{"x", 7}};
        CHECK(mbp_term("x", m, as) == LinTerm::constant_term(7));
    }
    // one-sided strict lower: bound + 1
    {
        std::vector<Atom> as{atom("(< y x)")};
        Assignment m{{"x", 5}, {"y", 1}};
        LinTerm expect = term_add(LinTerm::variable("y"), LinTerm::constant_term(1));
        CHECK(mbp_term("x", m, as) == expect);
    }
    // mismatching model raises
    {
        std::vector<Atom> as{atom("(< x 0)")};
        Assignment m{{"x", 3}};
        CHECK_THROWS_AS(mbp_term("x", m, as), ModelMismatch);
    }
}

TEST_CASE("mbp_term closure: results stay in the bound-derived pool") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coef(-2, 2);
    for (int round = 0; round < 200; ++round) {
        std::vector<Atom> atoms;
        std::vector<QFFormula> lits;
        for (int i = 0; i < 3; ++i) {
            LinTerm t;
            int cx = coef(rng), cy = coef(rng);
            if (cx != 0) { t.coeffs["x"] = cx; }
            if (cy != 0) { t.coeffs["y"] = cy; }
            t.constant = coef(rng);
            Atom a = make_atom(t, coef(rng) > 0 ? Rel::Lt : Rel::Le, LinTerm::constant_term(0));
            atoms.push_back(a);
            lits.push_back(QFFormula::lit(a));
        }
        auto r = qf_sat(QFFormula::make_and(lits));
        if (!r.sat) { continue; }
        r.model.emplace("x", 0);
        r.model.emplace("y", 0);
        if (!eval_ground(QFFormula::make_and(lits), r.model)) { continue; }
        LinTerm t = mbp_term("x", r.model, atoms);
        // substitution preserves satisfaction under the model
        bool ok = true;
        for (auto const & a : atoms) {
            Atom s = make_atom(term_subst(a.t, "x", t), a.rel, LinTerm::constant_term(0));
            if (auto cv = atom_const_value(s)) {
                ok = ok && *cv;
            } else {
                ok = ok && eval_atom(s, r.model);
            }
        }
        CHECK(ok);
        // and the term is drawn from the finite pool
        auto bs = bounds_on("x", atoms);
        bool in_pool = t.is_constant();
        for (auto const & b : bs) {
            if (t == b.term) { in_pool = true; }
            if (t == term_add(b.term, LinTerm::constant_term(1))) { in_pool = true; }
            if (t == term_sub(b.term, LinTerm::constant_term(1))) { in_pool = true; }
            for (auto const & b2 : bs) {
                if (t == term_scale(Rat(1) / 2, term_add(b.term, b2.term))) { in_pool = true; }
            }
        }
        CHECK(in_pool);
    }
}

TEST_CASE("parser round trips and errors") {
    CHECK(qf_to_string(qf("(or (< x y) (<= (+ x 1) z))")) ==
          "(or (< (+ x (* -1 y)) 0) (<= (+ x (* -1 z) 1) 0))");
    CHECK_THROWS_AS(qf("(< x"), ParseError);
    CHECK_THROWS_AS(qf("(* x y)"), ParseError);
    PrenexFormula p = pn("(forall (x) (exists (y) (< x y)))");
    CHECK(p.prefix.size() == 2);
    CHECK(p.prefix[0].first == Quant::Forall);
    CHECK(p.prefix[1].first == Quant::Exists);
    CHECK_THROWS_AS(pn("(forall (x) (forall (x) (< x 0)))"), ParseError);
}
