#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "bfoml/errors.hpp"
#include "bfoml/fo.hpp"
#include "bfoml/oracle.hpp"
#include "bfoml/parser.hpp"
#include "bfoml/transform.hpp"

using namespace bfoml;

namespace {

FOStructure structure(std::set<std::string> universe,
                      std::set<std::pair<std::string, std::string>> rel) {
  FOStructure s;
  s.universe = std::move(universe);
  s.rel = std::move(rel);
  return s;
}

}  // namespace

TEST_CASE("parse_fo reads a prenex sentence") {
  FOSentence a = parse_fo("A x. E y. R(x,y)");
  REQUIRE(a.prefix.size() == 2);
  CHECK(a.prefix[0].first == FoQuant::Forall);
  CHECK(a.prefix[0].second == Variable("x"));
  CHECK(a.prefix[1].first == FoQuant::Exists);
  CHECK(a.prefix[1].second == Variable("y"));
  CHECK(render(a.matrix) == "R(x,y)");

  FOSentence e = parse_fo("E x. R(x,x)");
  REQUIRE(e.prefix.size() == 1);
  CHECK(e.prefix[0].first == FoQuant::Exists);
  CHECK(e.prefix[0].second == Variable("x"));

  FOSentence c = parse_fo("A x. E y. (R(x,y) & ~R(y,x))");
  CHECK(render(c.matrix) == "(R(x,y) & !R(y,x))");
  CHECK(render(parse_fo("A x. (R(x,x) | !(R(x,x) & R(x,x)))").matrix) ==
        "(R(x,x) | !((R(x,x) & R(x,x))))");
}

TEST_CASE("parse_fo round-trips its own rendering") {
  for (const char* s : {"A x. E y. R(x,y)", "E x. R(x,x)",
                        "A x. E y. (R(x,y) & ~R(y,x))",
                        "A x. A y. (R(x,y) | (R(y,x) & ~R(x,x)))"}) {
    FOSentence a = parse_fo(s);
    FOSentence b = parse_fo(render_fo(a));
    CHECK(a.prefix == b.prefix);
    CHECK(equal(*a.matrix, *b.matrix));
  }
}

TEST_CASE("parse_fo rejects what the reduction cannot take") {
  try {
    parse_fo("A x. R(x,y)");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unbound variable 'y' in matrix") != std::string::npos);
  }
  try {
    parse_fo("A x. (R(x,x) & E y. R(x,y))");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("quantifier inside the matrix: input must be prenex") !=
          std::string::npos);
  }
  try {
    parse_fo("A x. E x. R(x,x)");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate quantified variable 'x'") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(parse_fo("A x. P(x,x)"), ParseError);
  CHECK_THROWS_AS(parse_fo("A x. R(x)"), ParseError);
  CHECK_THROWS_AS(parse_fo(""), ParseError);
  CHECK_THROWS_AS(parse_fo("A x. R(x,x) extra"), ParseError);
}

TEST_CASE("fo_eval evaluates over finite structures") {
  FOSentence ae = parse_fo("A x. E y. R(x,y)");
  CHECK(fo_eval(structure({"a"}, {{"a", "a"}}), ae));
  CHECK_FALSE(fo_eval(structure({"a"}, {}), ae));
  FOStructure cyc = structure({"a", "b"}, {{"a", "b"}, {"b", "a"}});
  CHECK(fo_eval(cyc, ae));
  CHECK_FALSE(fo_eval(cyc, parse_fo("E x. R(x,x)")));
  CHECK(fo_eval(cyc, parse_fo("A x. A y. (R(x,y) | ~R(x,y))")));
  CHECK(fo_eval(cyc, parse_fo("E x. E y. (R(x,y) & ~R(x,x))")));
  CHECK_FALSE(fo_eval(structure({"a", "b"}, {{"a", "b"}}), ae));
}

TEST_CASE("fo_structure_from_json") {
  FOStructure s = fo_structure_from_json(R"({"universe":["a","b"],"rel":[["a","b"]]})");
  CHECK(s.universe == std::set<std::string>{"a", "b"});
  CHECK(s.rel == std::set<std::pair<std::string, std::string>>{{"a", "b"}});

  CHECK_THROWS_AS(fo_structure_from_json("not json"), ModelError);
  CHECK_THROWS_AS(fo_structure_from_json(R"({"universe":[],"rel":[]})"), ModelError);
  CHECK_THROWS_AS(fo_structure_from_json(R"({"universe":["a"]})"), ModelError);
  CHECK_THROWS_AS(fo_structure_from_json(R"({"universe":["a"],"rel":[["a"]]})"), ModelError);
  CHECK_THROWS_AS(fo_structure_from_json(R"({"universe":["a"],"rel":[["a","z"]]})"),
                  ModelError);
}

TEST_CASE("tr_matrix translates atoms through a fresh middleman world") {
  FormulaPtr r = parse_fo("A x. E y. R(x,y)").matrix;
  CHECK(render(tr_matrix(r, ReductionTarget::ForallBox)) == "exists z dia (P(x) & Q(y))");
  CHECK(render(tr_matrix(parse_fo("A x. E y. ~R(x,y)").matrix, ReductionTarget::ForallBox)) ==
        "forall z box (~P(x) | ~Q(y))");
  CHECK(render(tr_matrix(r, ReductionTarget::BoxExists2)) ==
        "dia forall z z' (P(x) & Q(y))");
  // one fresh binder per atom, connectives pass through
  CHECK(render(tr_matrix(parse_fo("A x. E y. (R(x,y) & ~R(y,x))").matrix,
                         ReductionTarget::ForallBox)) ==
        "((exists z_1 dia (P(x) & Q(y))) & forall z box (~P(y) | ~Q(x)))");
  CHECK(render(tr_matrix(parse_fo("A x. E y. (R(x,y) | R(y,y))").matrix,
                         ReductionTarget::BoxExists2)) ==
        "((dia forall z_1 z_1' (P(x) & Q(y))) | dia forall z z' (P(y) & Q(y)))");
  for (ReductionTarget t : {ReductionTarget::ForallBox, ReductionTarget::BoxExists2}) {
    CHECK(is_pnf(*tr_matrix(parse_fo("A x. (R(x,x) | !(R(x,x) & R(x,x)))").matrix, t)));
  }
}

TEST_CASE("tr_matrix steps aside when the matrix already uses P or Q") {
  FormulaPtr clash = land(atom("P", {Variable("x"), Variable("y")}),
                          atom("R", {Variable("x"), Variable("y")}));
  CHECK(render(tr_matrix(clash, ReductionTarget::ForallBox)) ==
        "((exists z_1 dia (__P(x) & Q(y))) & exists z dia (__P(x) & Q(y)))");
}

TEST_CASE("build_psi wraps the prefix in bundles") {
  CHECK(render(build_psi(parse_fo("A x. E y. R(x,y)"), ReductionTarget::ForallBox)) ==
        "forall x box exists y dia exists z dia (P(x) & Q(y))");
  CHECK(render(build_psi(parse_fo("E x. R(x,x)"), ReductionTarget::ForallBox)) ==
        "exists x dia exists z dia (P(x) & Q(x))");
  CHECK(render(build_psi(parse_fo("A x. E y. R(x,y)"), ReductionTarget::BoxExists2)) ==
        "box forall x x' dia exists y y' dia forall z z' (P(x) & Q(y))");
}

TEST_CASE("build_lambda forces successor chains") {
  CHECK(render(build_lambda(0, ReductionTarget::ForallBox)) == "exists z0 dia top");
  CHECK(render(build_lambda(1, ReductionTarget::ForallBox)) ==
        "((exists z0 dia top) & forall z1 box exists z2 dia top)");
  CHECK(render(build_lambda(0, ReductionTarget::BoxExists2)) == "dia forall z0 z0' top");
  CHECK(render(build_lambda(1, ReductionTarget::BoxExists2)) ==
        "((dia forall z0 z0' top) & box exists z1 z1' dia forall z2 z2' top)");
  for (std::size_t n = 0; n <= 3; ++n) {
    for (ReductionTarget t : {ReductionTarget::ForallBox, ReductionTarget::BoxExists2}) {
      FormulaPtr l = build_lambda(n, t);
      CHECK(modal_depth(*l) == n + 1);
      CHECK(is_clean(*l));
      CHECK(is_pnf(*l));
      CHECK(free_vars(*l).empty());
    }
  }
}

TEST_CASE("build_gamma compares counting chains against box chains") {
  CHECK(render(build_gamma(0, ReductionTarget::ForallBox)) ==
        "forall z1 box forall z2 box ((forall z3 box (~P(z1) | ~Q(z2))) | "
        "exists z4 dia (P(z1) & Q(z2)))");
  CHECK(render(build_gamma(1, ReductionTarget::ForallBox)) ==
        "forall z1 box forall z2 box ((forall z3 box forall z4 box (~P(z1) | ~Q(z2))) | "
        "forall z5 box exists z6 dia (P(z1) & Q(z2)))");
  CHECK(render(build_gamma(0, ReductionTarget::BoxExists2)) ==
        "box forall z1 z2 ((box exists z3 (~P(z1) | ~Q(z2))) | "
        "dia forall z4 (P(z1) & Q(z2)))");
  CHECK(render(build_gamma(1, ReductionTarget::BoxExists2)) ==
        "box forall z1 z2 ((box exists z3 box exists z4 (~P(z1) | ~Q(z2))) | "
        "box exists z5 dia forall z6 (P(z1) & Q(z2)))");
  for (std::size_t n = 0; n <= 2; ++n) {
    FormulaPtr g = build_gamma(n, ReductionTarget::ForallBox);
    CHECK(modal_depth(*g) == n + 3);
    CHECK(is_clean(*g));
    CHECK(is_pnf(*g));
  }
}

TEST_CASE("translate assembles three clean conjuncts") {
  FOSentence ae = parse_fo("A x. E y. R(x,y)");

  FormulaPtr phi = translate(ae, ReductionTarget::ForallBox);
  CHECK(modal_depth(*phi) == 5);
  CHECK(classify(phi) == Fragment::ExistsBoxForallBox);
  CHECK(is_clean(*phi));
  CHECK(is_pnf(*phi));
  CHECK(free_vars(*phi).empty());
  const auto* outer = phi->get_if<AndNode>();
  REQUIRE(outer);
  CHECK(outer->lhs->get_if<AndNode>());

  FormulaPtr star = translate(ae, ReductionTarget::BoxExists2);
  CHECK(modal_depth(*star) == 4);
  CHECK(classify(star) == Fragment::BoxExists2);
  CHECK(is_clean(*star));
  CHECK(is_pnf(*star));
  CHECK(free_vars(*star).empty());
  REQUIRE(star->get_if<AndNode>());

  CHECK(modal_depth(*translate(parse_fo("E x. R(x,x)"), ReductionTarget::ForallBox)) == 4);
}

TEST_CASE("translate keeps the sentence's variables out of the binders") {
  for (const char* s : {"A x. E y. R(x,y)", "E x. R(x,x)",
                        "A z. E z1. (R(z,z1) & ~R(z1,z))",
                        "A z0. A z3. R(z0,z3)"}) {
    FOSentence a = parse_fo(s);
    std::set<Variable> avars;
    for (const auto& [q, v] : a.prefix) avars.insert(v);
    for (ReductionTarget t : {ReductionTarget::ForallBox, ReductionTarget::BoxExists2}) {
      FormulaPtr phi = translate(a, t);
      CAPTURE(s);
      CHECK(is_clean(*phi));
      CHECK(is_pnf(*phi));
      CHECK(free_vars(*phi).empty());
      for (const auto& b : bound_vars(*phi)) CHECK_FALSE(avars.count(b));
    }
  }
}

TEST_CASE("translate targets stay inside their grammar") {
  FOSentence a = parse_fo("A x. E y. (R(x,y) | ~R(y,x))");
  FormulaPtr star = translate(a, ReductionTarget::BoxExists2);
  // every bundle modality-first with at most two binders
  auto walk = [&](auto&& self, const FormulaPtr& f) -> void {
    if (const auto* b = f->get_if<BundleNode>()) {
      CHECK(modality_first(b->kind));
      CHECK(b->binders.size() <= 2);
      self(self, b->body);
    } else if (const auto* n = f->get_if<AndNode>()) {
      self(self, n->lhs);
      self(self, n->rhs);
    } else if (const auto* o = f->get_if<OrNode>()) {
      self(self, o->lhs);
      self(self, o->rhs);
    }
  };
  walk(walk, star);

  FormulaPtr phi = translate(a, ReductionTarget::ForallBox);
  auto walk2 = [&](auto&& self, const FormulaPtr& f) -> void {
    if (const auto* b = f->get_if<BundleNode>()) {
      CHECK_FALSE(modality_first(b->kind));
      CHECK(b->binders.size() == 1);
      self(self, b->body);
    } else if (const auto* n = f->get_if<AndNode>()) {
      self(self, n->lhs);
      self(self, n->rhs);
    } else if (const auto* o = f->get_if<OrNode>()) {
      self(self, o->lhs);
      self(self, o->rhs);
    }
  };
  walk2(walk2, phi);
}

TEST_CASE("translated formula is satisfiable when the sentence has a tiny model") {
  FOSentence ae = parse_fo("A x. E y. R(x,y)");
  REQUIRE(fo_eval(structure({"a"}, {{"a", "a"}}), ae));
  FormulaPtr phi = translate(ae, ReductionTarget::ForallBox);
  auto w = bounded_sat(phi, 3, 3, DomainPolicy::Constant);
  CHECK(w.has_value());
}

TEST_CASE("translated contradiction has no small constant-domain model") {
  FOSentence bad = parse_fo("A x. (R(x,x) & ~R(x,x))");
  FormulaPtr phi = translate(bad, ReductionTarget::ForallBox);
  CHECK_FALSE(bounded_sat(phi, 3, 3, DomainPolicy::Constant).has_value());
}
