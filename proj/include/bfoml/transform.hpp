#pragma once

#include <set>
#include <string>

#include "bfoml/formula.hpp"

namespace bfoml {

// Sub-languages ordered by which bundle kinds they admit. ExistsBox/ForallBox
// cover the quantifier-first pairs {Ex box, Ex dia} and {All box, All dia};
// BoxExists/BoxForall cover {box Ex, dia Ex} and {box All, dia All};
// the later values are the joins, BoxExists2 additionally admits two binders,
// Mixed admits everything.
enum class Fragment {
  ExistsBox,
  ForallBox,
  BoxExists,
  BoxForall,
  ExistsBoxForallBox,
  BoxExistsBoxForall,
  BoxExists2,
  Mixed,
};

std::string to_string(Fragment fr);

// Pushes negation inward until the result has no Not node: double negation
// cancels, De Morgan splits the connectives, Top/Bot flip, and a negated
// bundle becomes its dual kind with the binders kept. Modal depth and free
// variables are preserved.
FormulaPtr to_pnf(const FormulaPtr& f);

// Alpha-renames binders so that every binder is distinct from all other
// binders, from every free variable of f, and from every name in `reserved`.
// Renaming walks left to right, keeps the first admissible occurrence of a
// name, and replaces conflicts by name_k for the least k >= 1 that collides
// with nothing in f, `reserved`, or an earlier replacement.
FormulaPtr make_clean(const FormulaPtr& f, const std::set<Variable>& reserved = {});

// Least fragment admitting every bundle kind that occurs in f; a formula with
// no bundles classifies as ExistsBox.
Fragment classify(const FormulaPtr& f);

}  // namespace bfoml
