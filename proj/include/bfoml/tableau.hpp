#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bfoml/kripke.hpp"

namespace bfoml {

// One tableau label (w : Gamma, sigma). world is the tree path ("r",
// "r.v_u"...), formulas is Gamma as an insertion-ordered duplicate-free list,
// sigma is the domain of the partial identity valuation: the variables
// available as elements at this world.
struct Label {
  std::string world;
  std::vector<FormulaPtr> formulas;
  std::set<Variable> sigma;
};

enum class RuleKind { Leaf, Br, End };

// Node of a successful (open) tableau: the boolean-saturated label actually
// chosen at this world, plus the rule that produced its children. Disjunction
// choices live in the search, not the tree.
struct TableauNode {
  Label label;
  RuleKind rule = RuleKind::Leaf;
  std::vector<TableauNode> children;
};

struct SolveOptions {
  bool reverse_or = false;      // explore disjuncts right-to-left (determinism checks)
  bool trace = false;           // rule applications to trace_out as "RULE world |G| |s|"
  bool check_invariants = false;
  std::ostream* trace_out = nullptr;  // defaults to std::cerr
};

struct SolveStats {
  std::size_t rule_count = 0;
  std::size_t max_br_per_branch = 0;
};

struct SatWitness {
  KripkeModel model;
  std::string root;
  Valuation sigma;
};

struct SatResult {
  std::optional<SatWitness> witness;
  SolveStats stats;
  bool sat() const { return witness.has_value(); }
};

// Root label for theta: world "r", Gamma {theta}, sigma = free variables plus
// one fresh variable z<k> (least k so the name is new). theta must be clean
// PNF with only single-binder modality-first bundles, else FragmentError.
Label init_root(const FormulaPtr& theta);

// Exhaustive conjunction/disjunction expansion. Returns one label per way of
// resolving the disjunctions; conjunctions split in place, top is dropped,
// alternatives containing bot are pruned. Each result holds only literals and
// bundles. With reverse_or the disjunct alternatives come out right-to-left.
std::vector<Label> saturate_boolean(const Label& l, bool reverse_or = false);

struct Partition {
  std::vector<FormulaPtr> box_exists, box_forall, dia_forall, dia_exists, literals;
};

// Splits a saturated label's formulas by top constructor. Literals cover
// Top/Bot/Atom/NegAtom. Throws std::invalid_argument on unsaturated input and
// FragmentError on bundles outside the tableau fragment.
Partition partition(const Label& l);

// The branching rule. Requires a saturated label with at least one diamond
// formula. sigma' extends sigma by the box-exists and dia-exists binders;
// every dia formula gets one child world w.v_<binder>: dia-forall children
// receive the box-exists bodies, every sigma'-instance of each box-forall
// body, and every sigma'-instance of their own body; dia-exists children
// receive the box bodies/instances and their own body once. Literals stay at
// the parent. Bound variables of the added formulas are renamed apart so each
// child label stays clean as a set (first use of a name keeps it).
std::vector<Label> apply_br(const Label& l);

// The terminal rule for saturated labels with boxes but no diamonds: drops
// everything except the literals.
Label apply_end(const Label& l);

// True iff the literal set is contradictory: contains bot, or an atom and its
// negation over the same argument tuple.
bool is_closed(const std::vector<FormulaPtr>& literals);

// Depth-first search for an open tableau from l: picks a saturated
// alternative whose literals stay open and whose (BR) children all succeed
// recursively. Returns the successful tree, or nullopt when every alternative
// closes.
std::optional<TableauNode> search_open(const Label& l, const SolveOptions& opts = {},
                                       SolveStats* stats = nullptr);

// Reads the countermodel off an open tableau: worlds are the labels' worlds,
// the relation is the parent-child tree edge set, delta(w) is the label's
// sigma, V_w collects the positive literals, and the returned valuation is
// the identity on the root sigma. Throws InternalError if some world's
// literals are contradictory.
std::tuple<KripkeModel, std::string, Valuation> extract_model(const TableauNode& root);

// Full pipeline: PNF + clean conversion, fragment check, root construction,
// search, extraction. The witness is re-checked (validate + evaluate of the
// original theta) before being returned.
SatResult solve(const FormulaPtr& theta, const SolveOptions& opts = {});

}  // namespace bfoml
