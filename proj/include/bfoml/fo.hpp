#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

enum class FoQuant { Forall, Exists };

// Prenex sentence over the single binary relation R: a quantifier prefix and a
// quantifier-free matrix built from R-atoms with !, &, |.
struct FOSentence {
  std::vector<std::pair<FoQuant, Variable>> prefix;
  FormulaPtr matrix;
};

// Finite relational structure interpreting R.
struct FOStructure {
  std::set<std::string> universe;
  std::set<std::pair<std::string, std::string>> rel;
};

// Which bundled fragment the reduction targets.
enum class ReductionTarget { ForallBox, BoxExists2 };

// Syntax: `A x. E y. (R(x,y) & ~R(y,x))`. Quantifiers must all precede the
// matrix; every matrix variable must be bound by the prefix.
FOSentence parse_fo(std::string_view text);

std::string render_fo(const FOSentence& s);

bool fo_eval(const FOStructure& s, const FOSentence& alpha);

// Accepts {"universe": ["a", ...], "rel": [["a","b"], ...]}.
FOStructure fo_structure_from_json(const std::string& text);

// Homomorphic translation of a quantifier-free matrix; the result is
// PNF-normalized. Each R-atom gets its own fresh witness binder(s).
FormulaPtr tr_matrix(const FormulaPtr& beta, ReductionTarget target);

// The quantifier prefix rendered as bundles around the translated matrix.
FormulaPtr build_psi(const FOSentence& alpha, ReductionTarget target);

// Seriality ladder: conjuncts j = 0..n asserting a successor at depth j.
FormulaPtr build_lambda(std::size_t n, ReductionTarget target);

// Uniformity schema: pairs observed anywhere along an n-step tail are
// observed everywhere along it. Implication desugared, PNF-normalized.
FormulaPtr build_gamma(std::size_t n, ReductionTarget target);

// Full reductions. Both outputs are clean PNF sentences; no variable of
// alpha occurs bound in the output.
FormulaPtr translate_forall_box(const FOSentence& alpha);
FormulaPtr translate_box_exists2(const FOSentence& alpha);
FormulaPtr translate(const FOSentence& alpha, ReductionTarget target);

}  // namespace bfoml
