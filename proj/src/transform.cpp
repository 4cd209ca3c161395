#include "bfoml/transform.hpp"

#include <map>

#include "bfoml/errors.hpp"

namespace bfoml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FormulaPtr pnf_pos(const FormulaPtr& f);
FormulaPtr pnf_neg(const FormulaPtr& f);

FormulaPtr pnf_pos(const FormulaPtr& f) {
  return std::visit(
      overloaded{
          [&](const TopNode&) { return f; },
          [&](const BotNode&) { return f; },
          [&](const AtomNode&) { return f; },
          [&](const NegAtomNode&) { return f; },
          [&](const NotNode& n) { return pnf_neg(n.body); },
          [&](const AndNode& n) {
            FormulaPtr l = pnf_pos(n.lhs), r = pnf_pos(n.rhs);
            return l == n.lhs && r == n.rhs ? f : land(std::move(l), std::move(r));
          },
          [&](const OrNode& n) {
            FormulaPtr l = pnf_pos(n.lhs), r = pnf_pos(n.rhs);
            return l == n.lhs && r == n.rhs ? f : lor(std::move(l), std::move(r));
          },
          [&](const BundleNode& n) {
            FormulaPtr b = pnf_pos(n.body);
            return b == n.body ? f : bundle(n.kind, n.binders, std::move(b));
          },
      },
      f->node());
}

FormulaPtr pnf_neg(const FormulaPtr& f) {
  return std::visit(
      overloaded{
          [&](const TopNode&) { return bot(); },
          [&](const BotNode&) { return top(); },
          [&](const AtomNode& n) { return neg_atom(n.pred.name, n.args); },
          [&](const NegAtomNode& n) { return atom(n.pred.name, n.args); },
          [&](const NotNode& n) { return pnf_pos(n.body); },
          [&](const AndNode& n) { return lor(pnf_neg(n.lhs), pnf_neg(n.rhs)); },
          [&](const OrNode& n) { return land(pnf_neg(n.lhs), pnf_neg(n.rhs)); },
          [&](const BundleNode& n) {
            return bundle(dual_kind(n.kind), n.binders, pnf_neg(n.body));
          },
      },
      f->node());
}

struct Cleaner {
  std::set<std::string> forbidden;  // reserved + free vars: never a binder
  std::set<std::string> taken;      // forbidden + all vars + created names
  std::set<std::string> used;       // names already bound in the output

  std::string fresh(const std::string& base) {
    for (std::size_t k = 1;; ++k) {
      std::string cand = base + "_" + std::to_string(k);
      if (taken.insert(cand).second) return cand;
    }
  }

  Variable lookup(const std::map<Variable, Variable>& env, const Variable& v) const {
    auto it = env.find(v);
    return it == env.end() ? v : it->second;
  }

  FormulaPtr rename_args(const FormulaPtr& f, const std::map<Variable, Variable>& env) {
    auto mapped = [&](const std::vector<Variable>& args, std::vector<Variable>& out) {
      bool changed = false;
      out.reserve(args.size());
      for (const auto& a : args) {
        out.push_back(lookup(env, a));
        changed |= !(out.back() == a);
      }
      return changed;
    };
    if (const auto* a = f->get_if<AtomNode>()) {
      std::vector<Variable> out;
      return mapped(a->args, out) ? atom(a->pred.name, std::move(out)) : f;
    }
    const auto* n = f->get_if<NegAtomNode>();
    std::vector<Variable> out;
    return mapped(n->args, out) ? neg_atom(n->pred.name, std::move(out)) : f;
  }

  FormulaPtr walk(const FormulaPtr& f, const std::map<Variable, Variable>& env) {
    return std::visit(
        overloaded{
            [&](const TopNode&) { return f; },
            [&](const BotNode&) { return f; },
            [&](const AtomNode&) { return rename_args(f, env); },
            [&](const NegAtomNode&) { return rename_args(f, env); },
            [&](const NotNode& n) {
              FormulaPtr b = walk(n.body, env);
              return b == n.body ? f : lnot(std::move(b));
            },
            [&](const AndNode& n) {
              FormulaPtr l = walk(n.lhs, env), r = walk(n.rhs, env);
              return l == n.lhs && r == n.rhs ? f : land(std::move(l), std::move(r));
            },
            [&](const OrNode& n) {
              FormulaPtr l = walk(n.lhs, env), r = walk(n.rhs, env);
              return l == n.lhs && r == n.rhs ? f : lor(std::move(l), std::move(r));
            },
            [&](const BundleNode& n) {
              std::map<Variable, Variable> inner = env;
              std::vector<Variable> binders;
              binders.reserve(n.binders.size());
              bool changed = false;
              for (const auto& v : n.binders) {
                if (!forbidden.count(v.name) && used.insert(v.name).second) {
                  binders.push_back(v);
                  inner.erase(v);  // v rebinds itself inside this scope
                } else {
                  Variable nv(fresh(v.name));
                  used.insert(nv.name);
                  inner[v] = nv;
                  binders.push_back(std::move(nv));
                  changed = true;
                }
              }
              FormulaPtr b = walk(n.body, inner);
              return !changed && b == n.body ? f
                                             : bundle(n.kind, std::move(binders), std::move(b));
            },
        },
        f->node());
  }
};

}  // namespace

std::string to_string(Fragment fr) {
  switch (fr) {
    case Fragment::ExistsBox: return "ExistsBox";
    case Fragment::ForallBox: return "ForallBox";
    case Fragment::BoxExists: return "BoxExists";
    case Fragment::BoxForall: return "BoxForall";
    case Fragment::ExistsBoxForallBox: return "ExistsBoxForallBox";
    case Fragment::BoxExistsBoxForall: return "BoxExistsBoxForall";
    case Fragment::BoxExists2: return "BoxExists2";
    case Fragment::Mixed: return "Mixed";
  }
  throw InternalError("unknown fragment");
}

FormulaPtr to_pnf(const FormulaPtr& f) { return pnf_pos(f); }

FormulaPtr make_clean(const FormulaPtr& f, const std::set<Variable>& reserved) {
  Cleaner c;
  for (const auto& v : reserved) c.forbidden.insert(v.name);
  for (const auto& v : free_vars(*f)) c.forbidden.insert(v.name);
  c.taken = c.forbidden;
  for (const auto& v : all_vars(*f)) c.taken.insert(v.name);
  return c.walk(f, {});
}

Fragment classify(const FormulaPtr& f) {
  bool exists_q = false, forall_q = false;  // quantifier-first families
  bool exists_m = false, forall_m = false;  // modality-first families
  bool two_binders = false;

  auto scan = [&](auto&& self, const Formula& g) -> void {
    std::visit(overloaded{
                   [&](const TopNode&) {},
                   [&](const BotNode&) {},
                   [&](const AtomNode&) {},
                   [&](const NegAtomNode&) {},
                   [&](const NotNode& n) { self(self, *n.body); },
                   [&](const AndNode& n) {
                     self(self, *n.lhs);
                     self(self, *n.rhs);
                   },
                   [&](const OrNode& n) {
                     self(self, *n.lhs);
                     self(self, *n.rhs);
                   },
                   [&](const BundleNode& n) {
                     switch (n.kind) {
                       case BundleKind::ExistsBox:
                       case BundleKind::ExistsDia: exists_q = true; break;
                       case BundleKind::ForallBox:
                       case BundleKind::ForallDia: forall_q = true; break;
                       case BundleKind::BoxExists:
                       case BundleKind::DiaExists: exists_m = true; break;
                       case BundleKind::BoxForall:
                       case BundleKind::DiaForall: forall_m = true; break;
                     }
                     two_binders |= n.binders.size() == 2;
                     self(self, *n.body);
                   },
               },
               g.node());
  };
  scan(scan, *f);

  bool any_q = exists_q || forall_q;
  bool any_m = exists_m || forall_m;
  if (any_q && any_m) return Fragment::Mixed;
  if (any_m) {
    if (two_binders) return Fragment::BoxExists2;
    if (exists_m && forall_m) return Fragment::BoxExistsBoxForall;
    return forall_m ? Fragment::BoxForall : Fragment::BoxExists;
  }
  if (exists_q && forall_q) return Fragment::ExistsBoxForallBox;
  return forall_q ? Fragment::ForallBox : Fragment::ExistsBox;
}

}  // namespace bfoml
