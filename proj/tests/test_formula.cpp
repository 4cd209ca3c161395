#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "bfoml/corpus.hpp"
#include "bfoml/errors.hpp"
#include "bfoml/parser.hpp"
#include "bfoml/transform.hpp"

using namespace bfoml;

namespace {

FormulaPtr P1(const char* v) { return atom("P", {Variable(v)}); }

// order on classification results: operator-set inclusion, bundle-free bottom
bool fragment_leq(Fragment a, Fragment b) {
  if (a == b || b == Fragment::Mixed || a == Fragment::ExistsBox) return true;
  switch (a) {
    case Fragment::ForallBox: return b == Fragment::ExistsBoxForallBox;
    case Fragment::BoxExists:
    case Fragment::BoxForall:
      return b == Fragment::BoxExistsBoxForall || b == Fragment::BoxExists2;
    case Fragment::BoxExistsBoxForall: return b == Fragment::BoxExists2;
    case Fragment::ExistsBox: return true;
    default: return false;
  }
}

}  // namespace

TEST_CASE("parse builds the expected constructors") {
  FormulaPtr f = parse("P(x,y) & ~P(x,y)");
  FormulaPtr expect = land(atom("P", {Variable("x"), Variable("y")}),
                           neg_atom("P", {Variable("x"), Variable("y")}));
  CHECK(equal(*f, *expect));

  f = parse("exists x box P(x)");
  CHECK(equal(*f, *bundle(BundleKind::ExistsBox, {Variable("x")}, P1("x"))));

  f = parse("box exists x y P(x,y)");
  const auto* b = f->get_if<BundleNode>();
  REQUIRE(b);
  CHECK(b->kind == BundleKind::BoxExists);
  REQUIRE(b->binders.size() == 2);
  CHECK(b->binders[0].name == "x");
  CHECK(b->binders[1].name == "y");

  // implication is sugar
  CHECK(equal(*parse("P(x) -> Q(x)"),
              *lor(lnot(P1("x")), atom("Q", {Variable("x")}))));
  // right associative
  CHECK(equal(*parse("P(x) -> Q(x) -> S"),
              *lor(lnot(P1("x")), lor(lnot(atom("Q", {Variable("x")})), atom("S")))));
}

TEST_CASE("parse precedence and bundle scope") {
  CHECK(render(parse("P(x) & Q(x) | S")) == "((P(x) & Q(x)) | S)");
  // bundles extend maximally to the right
  CHECK(equal(*parse("box exists x P(x) & Q(x)"),
              *bundle(BundleKind::BoxExists, {Variable("x")},
                      land(P1("x"), atom("Q", {Variable("x")})))));
  CHECK(equal(*parse("(box exists x P(x)) & Q(y)"),
              *land(bundle(BundleKind::BoxExists, {Variable("x")}, P1("x")),
                    atom("Q", {Variable("y")}))));
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("P(x"), ParseError);
  CHECK_THROWS_AS(parse("P(x) &"), ParseError);
  CHECK_THROWS_AS(parse("box P(x)"), ParseError);
  CHECK_THROWS_AS(parse("exists box P(x)"), ParseError);
  // two binders only on modality-first bundles
  CHECK_THROWS_AS(parse("exists x y box P(x,y)"), ParseError);
  CHECK_THROWS_AS(parse("box exists x y z P(x,y)"), ParseError);
  CHECK_THROWS_AS(parse("box exists x x P(x,x)"), ParseError);
  // ~ applies to atoms only
  CHECK_THROWS_AS(parse("~(P(x) & Q(x))"), ParseError);
  CHECK_THROWS_AS(parse("~top"), ParseError);
  // arity must be stable within one parse
  CHECK_THROWS_AS(parse("P(x) & P(x,y)"), ParseError);
  try {
    parse("P(x) & !");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 8);
    CHECK(std::string(e.what()).find("parse error at 8") != std::string::npos);
    CHECK(std::string(e.what()).find("found end of input") != std::string::npos);
  }
  try {
    parse("P(x) & P(x,y)");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("arity") != std::string::npos);
  }
}

TEST_CASE("render examples") {
  CHECK(render(bundle(BundleKind::DiaForall, {Variable("z")}, P1("z"))) ==
        "dia forall z P(z)");
  CHECK(render(top()) == "top");
  CHECK(render(parse("(P(x) | Q(x)) & S")) == "((P(x) | Q(x)) & S)");
  CHECK(render(parse("~P(x)")) == "~P(x)");
  CHECK(render(parse("!(P(x) & Q(x))")) == "!((P(x) & Q(x)))");
}

TEST_CASE("parse round-trips render on both corpora") {
  for (const auto& f :
       generate_corpus(CorpusProfile::tableau(), kTableauCorpusSeed, kTableauCorpusCount)) {
    FormulaPtr back = parse(render(f));
    CHECK(equal(*back, *f));
  }
  for (const auto& f : generate_corpus(CorpusProfile::preservation(), kPreservationSeed,
                                       kPreservationCount)) {
    FormulaPtr back = parse(render(f));
    if (!equal(*back, *f)) {
      CAPTURE(render(f));
      CHECK(equal(*back, *f));
    }
  }
}

TEST_CASE("free_vars") {
  CHECK(free_vars(*parse("P(x,y)")) == std::set<Variable>{Variable("x"), Variable("y")});
  CHECK(free_vars(*parse("exists x box P(x,y)")) == std::set<Variable>{Variable("y")});
  CHECK(free_vars(*parse("box forall x (P(x) & Q(y))")) == std::set<Variable>{Variable("y")});
  CHECK(free_vars(*parse("box exists x y Q(x,y)")).empty());
}

TEST_CASE("substitute replaces free occurrences only") {
  CHECK(render(substitute(P1("x"), Variable("x"), Variable("y"))) == "P(y)");
  CHECK(render(substitute(parse("exists x box P(x,y)"), Variable("y"), Variable("z"))) ==
        "exists x box P(x,z)");
  // bound occurrences untouched
  CHECK(render(substitute(parse("P(x) & exists x dia Q(x)"), Variable("x"), Variable("w"))) ==
        "(P(w) & exists x dia Q(x))");
  CHECK_THROWS_AS(substitute(parse("exists x box P(x,y)"), Variable("y"), Variable("x")),
                  CaptureError);
}

TEST_CASE("modal_depth") {
  CHECK(modal_depth(*parse("P(x)")) == 0);
  CHECK(modal_depth(*parse("exists x box P(x)")) == 1);
  CHECK(modal_depth(*parse("top & bot")) == 0);
  CHECK(modal_depth(*parse("(box exists x dia forall y P(y)) | exists z dia Q(z)")) == 2);
}

TEST_CASE("is_pnf and is_clean") {
  CHECK(is_pnf(*parse("~P(x) & box exists y Q(y)")));
  CHECK_FALSE(is_pnf(*parse("!P(x)")));
  CHECK_FALSE(is_pnf(*parse("box exists y !Q(y)")));
  CHECK(is_clean(*parse("(exists x box P(x)) & Q(y)")));
  CHECK_FALSE(is_clean(*parse("(exists x box P(x)) & (exists x box Q(x))")));
  CHECK_FALSE(is_clean(*parse("P(x) & exists x box Q(x)")));
}

TEST_CASE("to_pnf dualizes each bundle kind") {
  CHECK(render(to_pnf(parse("!(exists x box P(x))"))) == "forall x dia ~P(x)");
  CHECK(render(to_pnf(parse("!(forall x box P(x))"))) == "exists x dia ~P(x)");
  CHECK(render(to_pnf(parse("!(exists x dia P(x))"))) == "forall x box ~P(x)");
  CHECK(render(to_pnf(parse("!(forall x dia P(x))"))) == "exists x box ~P(x)");
  CHECK(render(to_pnf(parse("!(box exists x P(x))"))) == "dia forall x ~P(x)");
  CHECK(render(to_pnf(parse("!(box forall x P(x))"))) == "dia exists x ~P(x)");
  CHECK(render(to_pnf(parse("!(dia exists x P(x))"))) == "box forall x ~P(x)");
  CHECK(render(to_pnf(parse("!(dia forall x P(x))"))) == "box exists x ~P(x)");
  // two-binder bundles dualize kind-wise, binders preserved
  CHECK(render(to_pnf(parse("!(box exists x y P(x,y))"))) == "dia forall x y ~P(x,y)");
  CHECK(render(to_pnf(parse("!(dia forall x y P(x,y))"))) == "box exists x y ~P(x,y)");
}

TEST_CASE("to_pnf boolean laws") {
  CHECK(render(to_pnf(parse("!!P(x)"))) == "P(x)");
  CHECK(render(to_pnf(parse("!top"))) == "bot");
  CHECK(render(to_pnf(parse("!bot"))) == "top");
  CHECK(render(to_pnf(parse("!(P(x) & Q(x))"))) == "(~P(x) | ~Q(x))");
  CHECK(render(to_pnf(parse("!(P(x) | ~Q(x))"))) == "(~P(x) & Q(x))");
  CHECK(render(to_pnf(parse("P(x) -> Q(x)"))) == "(~P(x) | Q(x))");
}

TEST_CASE("to_pnf totality and depth preservation on the corpus") {
  auto corpus = generate_corpus(CorpusProfile::preservation(), kPreservationSeed,
                                kPreservationCount);
  for (const auto& f : corpus) {
    FormulaPtr g = to_pnf(f);
    CAPTURE(render(f));
    CHECK(is_pnf(*g));
    CHECK(modal_depth(*g) == modal_depth(*f));
    // idempotent
    CHECK(equal(*to_pnf(g), *g));
    CHECK(free_vars(*g) == free_vars(*f));
  }
}

TEST_CASE("make_clean renames later binders with _k suffixes") {
  CHECK(render(make_clean(parse("(exists x box P(x)) & (exists x box Q(x))"))) ==
        "((exists x box P(x)) & exists x_1 box Q(x_1))");
  CHECK(render(make_clean(parse("P(x) & exists x box Q(x)"))) ==
        "(P(x) & exists x_1 box Q(x_1))");
  // x_1 is taken, so the duplicate binder becomes x_2
  CHECK(render(make_clean(parse("(exists x box P(x)) & ((exists x dia P(x)) & exists x_1 dia Q(x_1))"))) ==
        "((exists x box P(x)) & ((exists x_2 dia P(x_2)) & exists x_1 dia Q(x_1)))");
  FormulaPtr already = parse("(exists x box P(x)) & exists y box Q(y)");
  CHECK(equal(*make_clean(already), *already));
}

TEST_CASE("make_clean avoids reserved names and preserves free variables") {
  FormulaPtr f = parse("exists x box P(x,y)");
  FormulaPtr g = make_clean(f, {Variable("x")});
  CHECK(render(g) == "exists x_1 box P(x_1,y)");

  auto corpus = generate_corpus(CorpusProfile::preservation(), kPreservationSeed,
                                kPreservationCount);
  std::set<Variable> reserved{Variable("v1"), Variable("r9")};
  for (const auto& f2 : corpus) {
    FormulaPtr c = make_clean(f2, reserved);
    CAPTURE(render(f2));
    CHECK(is_clean(*c));
    CHECK(free_vars(*c) == free_vars(*f2));
    CHECK(modal_depth(*c) == modal_depth(*f2));
    std::set<Variable> forbidden = free_vars(*f2);
    forbidden.insert(reserved.begin(), reserved.end());
    for (const auto& b : bound_vars(*c)) CHECK_FALSE(forbidden.count(b));
    // idempotent once clean
    CHECK(equal(*make_clean(c, reserved), *c));
  }
}

TEST_CASE("classify names the least covering fragment") {
  CHECK(classify(parse("exists x box P(x)")) == Fragment::ExistsBox);
  CHECK(classify(parse("exists x dia P(x)")) == Fragment::ExistsBox);
  CHECK(classify(parse("forall x box P(x)")) == Fragment::ForallBox);
  CHECK(classify(parse("box exists x P(x)")) == Fragment::BoxExists);
  CHECK(classify(parse("dia forall y Q(y)")) == Fragment::BoxForall);
  CHECK(classify(parse("(box exists x P(x)) & (dia forall y Q(y))")) ==
        Fragment::BoxExistsBoxForall);
  CHECK(classify(parse("box exists x y P(x,y)")) == Fragment::BoxExists2);
  CHECK(classify(parse("(forall x box P(x)) & (exists y dia Q(y))")) ==
        Fragment::ExistsBoxForallBox);
  CHECK(classify(parse("(exists x box P(x)) & (box exists y Q(y))")) == Fragment::Mixed);
  // bundle-free formulas sit at the bottom of the lattice
  CHECK(classify(parse("P(x) & ~Q(x,x)")) == Fragment::ExistsBox);
  CHECK(to_string(Fragment::BoxExists2) == "BoxExists2");
}

TEST_CASE("classify is monotone under conjunction") {
  auto corpus = generate_corpus(CorpusProfile::preservation(), kPreservationSeed,
                                kPreservationCount);
  for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
    FormulaPtr f = to_pnf(corpus[i]);
    FormulaPtr g = to_pnf(corpus[i + 1]);
    Fragment both = classify(land(f, g));
    CAPTURE(render(f));
    CAPTURE(render(g));
    CHECK(fragment_leq(classify(f), both));
    CHECK(fragment_leq(classify(g), both));
  }
}

TEST_CASE("predicates collects the signature") {
  auto sig = predicates(*parse("P(x) & (box exists y Q(y,v1))"));
  REQUIRE(sig.size() == 2);
  CHECK(sig[0].name == "P");
  CHECK(sig[0].arity == 1);
  CHECK(sig[1].name == "Q");
  CHECK(sig[1].arity == 2);
}
