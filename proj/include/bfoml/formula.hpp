#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bfoml {

/// [a-z][a-zA-Z0-9_']* and not a keyword of the concrete syntax.
bool is_variable_name(std::string_view s);
/// [A-Z_][a-zA-Z0-9_']*
bool is_predicate_name(std::string_view s);

struct Variable {
  std::string name;
  Variable() = default;
  explicit Variable(std::string n);
  auto operator<=>(const Variable&) const = default;
};

struct PredicateSymbol {
  std::string name;
  std::size_t arity = 0;
  PredicateSymbol() = default;
  PredicateSymbol(std::string n, std::size_t a);
  auto operator<=>(const PredicateSymbol&) const = default;
};

/// The eight bundle operators. Quantifier-first bundles place the quantifier
/// outside the modality (exists x box ...), modality-first bundles inside
/// (box exists x ...). Only modality-first bundles may bind two variables.
enum class BundleKind {
  ExistsBox,
  ExistsDia,
  ForallBox,
  ForallDia,
  BoxExists,
  BoxForall,
  DiaExists,
  DiaForall,
};

constexpr bool modality_first(BundleKind k) {
  return k == BundleKind::BoxExists || k == BundleKind::BoxForall ||
         k == BundleKind::DiaExists || k == BundleKind::DiaForall;
}

/// Negation dual: not (exists x box f) == forall x dia (not f), and so on.
BundleKind dual_kind(BundleKind k);

std::string_view to_string(BundleKind k);

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct TopNode {};
struct BotNode {};
struct AtomNode {
  PredicateSymbol pred;
  std::vector<Variable> args;
};
struct NegAtomNode {
  PredicateSymbol pred;
  std::vector<Variable> args;
};
struct NotNode {
  FormulaPtr body;
};
struct AndNode {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct OrNode {
  FormulaPtr lhs;
  FormulaPtr rhs;
};
struct BundleNode {
  BundleKind kind;
  std::vector<Variable> binders;  // size 1, or 2 for modality-first kinds
  FormulaPtr body;
};

/// Immutable formula tree. NegAtom is a distinct constructor from Not(Atom):
/// positive normal form keeps the former and eliminates the latter.
class Formula {
 public:
  using Node = std::variant<TopNode, BotNode, AtomNode, NegAtomNode, NotNode,
                            AndNode, OrNode, BundleNode>;

  explicit Formula(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&node_);
  }

  bool is_literal() const;  // Top, Bot, Atom or NegAtom
  bool is_bundle() const;

 private:
  Node node_;
};

// Constructors. `atom`/`neg_atom` derive the predicate's arity from the
// argument list; `bundle` rejects empty or duplicate binder lists and
// two-variable binder lists on quantifier-first kinds.
FormulaPtr top();
FormulaPtr bot();
FormulaPtr atom(std::string pred, std::vector<Variable> args = {});
FormulaPtr neg_atom(std::string pred, std::vector<Variable> args = {});
FormulaPtr lnot(FormulaPtr body);
FormulaPtr land(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr lor(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr bundle(BundleKind kind, std::vector<Variable> binders, FormulaPtr body);

bool equal(const Formula& a, const Formula& b);
inline bool equal(const FormulaPtr& a, const FormulaPtr& b) { return equal(*a, *b); }

std::set<Variable> free_vars(const Formula& f);
std::set<Variable> bound_vars(const Formula& f);
std::set<Variable> all_vars(const Formula& f);

/// Predicate symbols used in f, sorted by name. Throws std::invalid_argument
/// if one name is used at two different arities.
std::vector<PredicateSymbol> predicates(const Formula& f);

/// Replace free occurrences of `from` by `to`. Throws CaptureError when a
/// replaced occurrence would fall under a binder for `to`.
FormulaPtr substitute(const FormulaPtr& f, const Variable& from, const Variable& to);

/// Maximum nesting of bundle operators.
std::size_t modal_depth(const Formula& f);

/// True iff f contains no Not constructor.
bool is_pnf(const Formula& f);

/// True iff no variable occurs both bound and free and all binders are
/// pairwise distinct.
bool is_clean(const Formula& f);

}  // namespace bfoml
