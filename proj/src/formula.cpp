#include "bfoml/formula.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "bfoml/errors.hpp"

namespace bfoml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::string_view kKeywords[] = {"top", "bot", "exists", "forall", "box", "dia"};

bool ident_tail(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '\'';
  });
}

}  // namespace

bool is_variable_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z' || !ident_tail(s.substr(1))) return false;
  return std::find(std::begin(kKeywords), std::end(kKeywords), s) == std::end(kKeywords);
}

bool is_predicate_name(std::string_view s) {
  if (s.empty()) return false;
  if (!((s[0] >= 'A' && s[0] <= 'Z') || s[0] == '_')) return false;
  return ident_tail(s.substr(1));
}

Variable::Variable(std::string n) : name(std::move(n)) {
  if (!is_variable_name(name))
    throw std::invalid_argument("invalid variable name '" + name + "'");
}

PredicateSymbol::PredicateSymbol(std::string n, std::size_t a) : name(std::move(n)), arity(a) {
  if (!is_predicate_name(name))
    throw std::invalid_argument("invalid predicate name '" + name + "'");
}

BundleKind dual_kind(BundleKind k) {
  switch (k) {
    case BundleKind::ExistsBox: return BundleKind::ForallDia;
    case BundleKind::ForallDia: return BundleKind::ExistsBox;
    case BundleKind::ForallBox: return BundleKind::ExistsDia;
    case BundleKind::ExistsDia: return BundleKind::ForallBox;
    case BundleKind::BoxExists: return BundleKind::DiaForall;
    case BundleKind::DiaForall: return BundleKind::BoxExists;
    case BundleKind::BoxForall: return BundleKind::DiaExists;
    case BundleKind::DiaExists: return BundleKind::BoxForall;
  }
  throw InternalError("unknown bundle kind");
}

std::string_view to_string(BundleKind k) {
  switch (k) {
    case BundleKind::ExistsBox: return "ExistsBox";
    case BundleKind::ExistsDia: return "ExistsDia";
    case BundleKind::ForallBox: return "ForallBox";
    case BundleKind::ForallDia: return "ForallDia";
    case BundleKind::BoxExists: return "BoxExists";
    case BundleKind::BoxForall: return "BoxForall";
    case BundleKind::DiaExists: return "DiaExists";
    case BundleKind::DiaForall: return "DiaForall";
  }
  return "?";
}

bool Formula::is_literal() const {
  return std::holds_alternative<TopNode>(node_) || std::holds_alternative<BotNode>(node_) ||
         std::holds_alternative<AtomNode>(node_) || std::holds_alternative<NegAtomNode>(node_);
}

bool Formula::is_bundle() const { return std::holds_alternative<BundleNode>(node_); }

FormulaPtr top() {
  static const FormulaPtr t = std::make_shared<Formula>(Formula::Node{TopNode{}});
  return t;
}

FormulaPtr bot() {
  static const FormulaPtr b = std::make_shared<Formula>(Formula::Node{BotNode{}});
  return b;
}

FormulaPtr atom(std::string pred, std::vector<Variable> args) {
  PredicateSymbol sym(std::move(pred), args.size());
  return std::make_shared<Formula>(Formula::Node{AtomNode{std::move(sym), std::move(args)}});
}

FormulaPtr neg_atom(std::string pred, std::vector<Variable> args) {
  PredicateSymbol sym(std::move(pred), args.size());
  return std::make_shared<Formula>(Formula::Node{NegAtomNode{std::move(sym), std::move(args)}});
}

FormulaPtr lnot(FormulaPtr body) {
  if (!body) throw std::invalid_argument("lnot: null formula");
  return std::make_shared<Formula>(Formula::Node{NotNode{std::move(body)}});
}

FormulaPtr land(FormulaPtr lhs, FormulaPtr rhs) {
  if (!lhs || !rhs) throw std::invalid_argument("land: null formula");
  return std::make_shared<Formula>(Formula::Node{AndNode{std::move(lhs), std::move(rhs)}});
}

FormulaPtr lor(FormulaPtr lhs, FormulaPtr rhs) {
  if (!lhs || !rhs) throw std::invalid_argument("lor: null formula");
  return std::make_shared<Formula>(Formula::Node{OrNode{std::move(lhs), std::move(rhs)}});
}

FormulaPtr bundle(BundleKind kind, std::vector<Variable> binders, FormulaPtr body) {
  if (!body) throw std::invalid_argument("bundle: null body");
  if (binders.empty() || binders.size() > 2)
    throw std::invalid_argument("bundle: binder list must have one or two variables");
  if (binders.size() == 2) {
    if (!modality_first(kind))
      throw std::invalid_argument("bundle: two binders are only allowed on modality-first kinds");
    if (binders[0] == binders[1])
      throw std::invalid_argument("bundle: duplicate binder '" + binders[0].name + "'");
  }
  return std::make_shared<Formula>(Formula::Node{BundleNode{kind, std::move(binders), std::move(body)}});
}

bool equal(const Formula& a, const Formula& b) {
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      overloaded{
          [](const TopNode&, const TopNode&) { return true; },
          [](const BotNode&, const BotNode&) { return true; },
          [](const AtomNode& x, const AtomNode& y) { return x.pred == y.pred && x.args == y.args; },
          [](const NegAtomNode& x, const NegAtomNode& y) {
            return x.pred == y.pred && x.args == y.args;
          },
          [](const NotNode& x, const NotNode& y) { return equal(*x.body, *y.body); },
          [](const AndNode& x, const AndNode& y) {
            return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
          },
          [](const OrNode& x, const OrNode& y) {
            return equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
          },
          [](const BundleNode& x, const BundleNode& y) {
            return x.kind == y.kind && x.binders == y.binders && equal(*x.body, *y.body);
          },
          [](const auto&, const auto&) { return false; },
      },
      a.node(), b.node());
}

namespace {

void collect_free(const Formula& f, std::set<Variable>& bound, std::set<Variable>& out) {
  std::visit(overloaded{
                 [&](const AtomNode& n) {
                   for (const auto& v : n.args)
                     if (!bound.count(v)) out.insert(v);
                 },
                 [&](const NegAtomNode& n) {
                   for (const auto& v : n.args)
                     if (!bound.count(v)) out.insert(v);
                 },
                 [&](const NotNode& n) { collect_free(*n.body, bound, out); },
                 [&](const AndNode& n) {
                   collect_free(*n.lhs, bound, out);
                   collect_free(*n.rhs, bound, out);
                 },
                 [&](const OrNode& n) {
                   collect_free(*n.lhs, bound, out);
                   collect_free(*n.rhs, bound, out);
                 },
                 [&](const BundleNode& n) {
                   std::vector<Variable> added;
                   for (const auto& v : n.binders)
                     if (bound.insert(v).second) added.push_back(v);
                   collect_free(*n.body, bound, out);
                   for (const auto& v : added) bound.erase(v);
                 },
                 [](const auto&) {},
             },
             f.node());
}

void collect_bound(const Formula& f, std::set<Variable>& out) {
  std::visit(overloaded{
                 [&](const NotNode& n) { collect_bound(*n.body, out); },
                 [&](const AndNode& n) {
                   collect_bound(*n.lhs, out);
                   collect_bound(*n.rhs, out);
                 },
                 [&](const OrNode& n) {
                   collect_bound(*n.lhs, out);
                   collect_bound(*n.rhs, out);
                 },
                 [&](const BundleNode& n) {
                   out.insert(n.binders.begin(), n.binders.end());
                   collect_bound(*n.body, out);
                 },
                 [](const auto&) {},
             },
             f.node());
}

// Counts every binder occurrence; used by is_clean to spot duplicates.
void collect_binder_list(const Formula& f, std::vector<Variable>& out) {
  std::visit(overloaded{
                 [&](const NotNode& n) { collect_binder_list(*n.body, out); },
                 [&](const AndNode& n) {
                   collect_binder_list(*n.lhs, out);
                   collect_binder_list(*n.rhs, out);
                 },
                 [&](const OrNode& n) {
                   collect_binder_list(*n.lhs, out);
                   collect_binder_list(*n.rhs, out);
                 },
                 [&](const BundleNode& n) {
                   for (const auto& v : n.binders) out.push_back(v);
                   collect_binder_list(*n.body, out);
                 },
                 [](const auto&) {},
             },
             f.node());
}

}  // namespace

std::set<Variable> free_vars(const Formula& f) {
  std::set<Variable> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<Variable> bound_vars(const Formula& f) {
  std::set<Variable> out;
  collect_bound(f, out);
  return out;
}

std::set<Variable> all_vars(const Formula& f) {
  std::set<Variable> out = free_vars(f);
  collect_bound(f, out);
  return out;
}

namespace {

void collect_preds(const Formula& f, std::map<std::string, std::size_t>& out) {
  std::visit(overloaded{
                 [&](const AtomNode& n) {
                   auto [it, fresh] = out.emplace(n.pred.name, n.pred.arity);
                   if (!fresh && it->second != n.pred.arity)
                     throw std::invalid_argument("predicate '" + n.pred.name +
                                                 "' used at two different arities");
                 },
                 [&](const NegAtomNode& n) {
                   auto [it, fresh] = out.emplace(n.pred.name, n.pred.arity);
                   if (!fresh && it->second != n.pred.arity)
                     throw std::invalid_argument("predicate '" + n.pred.name +
                                                 "' used at two different arities");
                 },
                 [&](const NotNode& n) { collect_preds(*n.body, out); },
                 [&](const AndNode& n) {
                   collect_preds(*n.lhs, out);
                   collect_preds(*n.rhs, out);
                 },
                 [&](const OrNode& n) {
                   collect_preds(*n.lhs, out);
                   collect_preds(*n.rhs, out);
                 },
                 [&](const BundleNode& n) { collect_preds(*n.body, out); },
                 [](const auto&) {},
             },
             f.node());
}

}  // namespace

std::vector<PredicateSymbol> predicates(const Formula& f) {
  std::map<std::string, std::size_t> m;
  collect_preds(f, m);
  std::vector<PredicateSymbol> out;
  out.reserve(m.size());
  for (const auto& [name, arity] : m) out.emplace_back(name, arity);
  return out;
}

FormulaPtr substitute(const FormulaPtr& f, const Variable& from, const Variable& to) {
  if (from == to) return f;
  return std::visit(
      overloaded{
          [&](const AtomNode& n) -> FormulaPtr {
            if (std::find(n.args.begin(), n.args.end(), from) == n.args.end()) return f;
            std::vector<Variable> args = n.args;
            std::replace(args.begin(), args.end(), from, to);
            return atom(n.pred.name, std::move(args));
          },
          [&](const NegAtomNode& n) -> FormulaPtr {
            if (std::find(n.args.begin(), n.args.end(), from) == n.args.end()) return f;
            std::vector<Variable> args = n.args;
            std::replace(args.begin(), args.end(), from, to);
            return neg_atom(n.pred.name, std::move(args));
          },
          [&](const NotNode& n) -> FormulaPtr {
            FormulaPtr body = substitute(n.body, from, to);
            return body == n.body ? f : lnot(std::move(body));
          },
          [&](const AndNode& n) -> FormulaPtr {
            FormulaPtr l = substitute(n.lhs, from, to);
            FormulaPtr r = substitute(n.rhs, from, to);
            return (l == n.lhs && r == n.rhs) ? f : land(std::move(l), std::move(r));
          },
          [&](const OrNode& n) -> FormulaPtr {
            FormulaPtr l = substitute(n.lhs, from, to);
            FormulaPtr r = substitute(n.rhs, from, to);
            return (l == n.lhs && r == n.rhs) ? f : lor(std::move(l), std::move(r));
          },
          [&](const BundleNode& n) -> FormulaPtr {
            if (std::find(n.binders.begin(), n.binders.end(), from) != n.binders.end())
              return f;  // `from` is bound here, nothing below is free
            if (!free_vars(*n.body).count(from)) return f;
            if (std::find(n.binders.begin(), n.binders.end(), to) != n.binders.end())
              throw CaptureError("substituting '" + to.name + "' for '" + from.name +
                                 "' would be captured by a binder");
            FormulaPtr body = substitute(n.body, from, to);
            return bundle(n.kind, n.binders, std::move(body));
          },
          [&](const auto&) -> FormulaPtr { return f; },
      },
      f->node());
}

std::size_t modal_depth(const Formula& f) {
  return std::visit(overloaded{
                        [](const NotNode& n) { return modal_depth(*n.body); },
                        [](const AndNode& n) {
                          return std::max(modal_depth(*n.lhs), modal_depth(*n.rhs));
                        },
                        [](const OrNode& n) {
                          return std::max(modal_depth(*n.lhs), modal_depth(*n.rhs));
                        },
                        [](const BundleNode& n) { return modal_depth(*n.body) + 1; },
                        [](const auto&) { return std::size_t{0}; },
                    },
                    f.node());
}

bool is_pnf(const Formula& f) {
  return std::visit(overloaded{
                        [](const NotNode&) { return false; },
                        [](const AndNode& n) { return is_pnf(*n.lhs) && is_pnf(*n.rhs); },
                        [](const OrNode& n) { return is_pnf(*n.lhs) && is_pnf(*n.rhs); },
                        [](const BundleNode& n) { return is_pnf(*n.body); },
                        [](const auto&) { return true; },
                    },
                    f.node());
}

bool is_clean(const Formula& f) {
  std::vector<Variable> binders;
  collect_binder_list(f, binders);
  std::set<Variable> seen;
  for (const auto& v : binders)
    if (!seen.insert(v).second) return false;
  const std::set<Variable> free = free_vars(f);
  for (const auto& v : seen)
    if (free.count(v)) return false;
  return true;
}

}  // namespace bfoml
