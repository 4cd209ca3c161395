#include "bfoml/tableau.hpp"

#include <algorithm>
#include <iostream>
#include <map>

#include "bfoml/errors.hpp"
#include "bfoml/parser.hpp"
#include "bfoml/transform.hpp"

namespace bfoml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool in_tableau_fragment(const Formula& f) {
  return std::visit(
      overloaded{
          [](const TopNode&) { return true; },
          [](const BotNode&) { return true; },
          [](const AtomNode&) { return true; },
          [](const NegAtomNode&) { return true; },
          [](const NotNode&) { return false; },  // callers normalize first
          [](const AndNode& n) {
            return in_tableau_fragment(*n.lhs) && in_tableau_fragment(*n.rhs);
          },
          [](const OrNode& n) {
            return in_tableau_fragment(*n.lhs) && in_tableau_fragment(*n.rhs);
          },
          [](const BundleNode& n) {
            return modality_first(n.kind) && n.binders.size() == 1 &&
                   in_tableau_fragment(*n.body);
          },
      },
      f.node());
}

bool contains(const std::vector<FormulaPtr>& v, const FormulaPtr& f) {
  return std::any_of(v.begin(), v.end(), [&](const FormulaPtr& g) { return equal(f, g); });
}

void insert_unique(std::vector<FormulaPtr>& v, std::size_t pos, const FormulaPtr& f) {
  if (!contains(v, f)) v.insert(v.begin() + static_cast<std::ptrdiff_t>(pos), f);
}

bool is_literal_or_bundle(const Formula& f) { return f.is_literal() || f.is_bundle(); }

void trace_line(std::ostream& os, const char* rule, const Label& l) {
  os << rule << " " << l.world << " " << l.formulas.size() << " " << l.sigma.size() << "\n";
}

std::vector<Label> saturate_impl(const Label& l, bool reverse_or, std::ostream* trace) {
  std::vector<Label> out;
  std::vector<Label> work{l};
  while (!work.empty()) {
    Label cur = std::move(work.back());
    work.pop_back();
    std::size_t i = 0;
    bool reduced = false;
    for (; i < cur.formulas.size(); ++i) {
      const Formula& f = *cur.formulas[i];
      if (f.get_if<TopNode>()) {
        cur.formulas.erase(cur.formulas.begin() + static_cast<std::ptrdiff_t>(i));
        work.push_back(std::move(cur));
        reduced = true;
        break;
      }
      if (f.get_if<BotNode>()) {
        reduced = true;  // alternative closes: drop it entirely
        break;
      }
      if (const auto* a = f.get_if<AndNode>()) {
        if (trace) trace_line(*trace, "AND", cur);
        FormulaPtr lhs = a->lhs, rhs = a->rhs;
        cur.formulas.erase(cur.formulas.begin() + static_cast<std::ptrdiff_t>(i));
        insert_unique(cur.formulas, i, lhs);
        insert_unique(cur.formulas, std::min(i + 1, cur.formulas.size()), rhs);
        work.push_back(std::move(cur));
        reduced = true;
        break;
      }
      if (const auto* o = f.get_if<OrNode>()) {
        if (trace) trace_line(*trace, "OR", cur);
        Label left = cur, right = cur;
        left.formulas.erase(left.formulas.begin() + static_cast<std::ptrdiff_t>(i));
        insert_unique(left.formulas, i, o->lhs);
        right.formulas.erase(right.formulas.begin() + static_cast<std::ptrdiff_t>(i));
        insert_unique(right.formulas, i, o->rhs);
        if (reverse_or) std::swap(left, right);
        work.push_back(std::move(right));  // popped second
        work.push_back(std::move(left));   // popped first
        reduced = true;
        break;
      }
      if (f.get_if<NotNode>())
        throw std::invalid_argument("saturate_boolean: formula is not in PNF");
    }
    if (!reduced) out.push_back(std::move(cur));
  }
  return out;
}

// Renames bound variables so that no binder repeats a committed name; the
// first formula to use a name keeps it. Fresh names append _k, avoiding
// every name ever seen in the parent label or created here.
struct ApartRenamer {
  std::set<std::string>& committed;
  std::set<std::string>& avoid;

  std::string fresh(const std::string& base) {
    for (std::size_t k = 1;; ++k) {
      std::string cand = base + "_" + std::to_string(k);
      if (avoid.insert(cand).second) return cand;
    }
  }

  FormulaPtr walk(const FormulaPtr& f, std::map<Variable, Variable>& env) {
    return std::visit(
        overloaded{
            [&](const TopNode&) { return f; },
            [&](const BotNode&) { return f; },
            [&](const AtomNode& n) { return remap(f, n.pred, n.args, env, true); },
            [&](const NegAtomNode& n) { return remap(f, n.pred, n.args, env, false); },
            [&](const NotNode&) -> FormulaPtr {
              throw InternalError("Not node inside tableau label");
            },
            [&](const AndNode& n) {
              FormulaPtr a = walk(n.lhs, env), b = walk(n.rhs, env);
              return a == n.lhs && b == n.rhs ? f : land(std::move(a), std::move(b));
            },
            [&](const OrNode& n) {
              FormulaPtr a = walk(n.lhs, env), b = walk(n.rhs, env);
              return a == n.lhs && b == n.rhs ? f : lor(std::move(a), std::move(b));
            },
            [&](const BundleNode& n) {
              std::vector<Variable> binders;
              bool changed = false;
              std::map<Variable, Variable> inner = env;
              for (const auto& v : n.binders) {
                if (committed.insert(v.name).second) {
                  avoid.insert(v.name);
                  binders.push_back(v);
                  inner.erase(v);
                } else {
                  Variable nv(fresh(v.name));
                  committed.insert(nv.name);
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

  FormulaPtr remap(const FormulaPtr& f, const PredicateSymbol& p,
                   const std::vector<Variable>& args, const std::map<Variable, Variable>& env,
                   bool positive) {
    bool changed = false;
    std::vector<Variable> out;
    out.reserve(args.size());
    for (const auto& a : args) {
      auto it = env.find(a);
      out.push_back(it == env.end() ? a : it->second);
      changed |= it != env.end();
    }
    if (!changed) return f;
    return positive ? atom(p.name, std::move(out)) : neg_atom(p.name, std::move(out));
  }

  FormulaPtr rename(const FormulaPtr& f) {
    std::map<Variable, Variable> env;
    return walk(f, env);
  }
};

void check_label(const Label& l) {
  std::set<std::string> binders;
  for (const auto& f : l.formulas) {
    if (!is_pnf(*f) || !is_clean(*f))
      throw InternalError("label formula not clean PNF at " + l.world + ": " + render(*f));
    if (!in_tableau_fragment(*f))
      throw InternalError("label formula outside fragment at " + l.world);
    for (const auto& v : free_vars(*f))
      if (!l.sigma.count(v))
        throw InternalError("free variable " + v.name + " outside sigma at " + l.world);
    for (const auto& v : bound_vars(*f)) {
      if (!binders.insert(v.name).second)
        throw InternalError("binder " + v.name + " reused across label at " + l.world);
      if (l.sigma.count(v))
        throw InternalError("binder " + v.name + " collides with sigma at " + l.world);
    }
  }
}

struct Searcher {
  const SolveOptions& opts;
  SolveStats stats;
  std::ostream* trace;

  explicit Searcher(const SolveOptions& o)
      : opts(o), trace(o.trace ? (o.trace_out ? o.trace_out : &std::cerr) : nullptr) {}

  std::optional<TableauNode> run(const Label& l, std::size_t br_depth) {
    stats.max_br_per_branch = std::max(stats.max_br_per_branch, br_depth);
    std::vector<Label> alts = saturate_impl(l, opts.reverse_or, trace);
    stats.rule_count += 1;  // counting the saturation pass as a unit is enough for tests
    for (Label& alt : alts) {
      if (opts.check_invariants) check_label(alt);
      Partition p = partition(alt);
      if (is_closed(p.literals)) continue;
      bool diamonds = !p.dia_forall.empty() || !p.dia_exists.empty();
      bool boxes = !p.box_exists.empty() || !p.box_forall.empty();
      if (!diamonds) {
        TableauNode node;
        if (boxes) {
          if (trace) trace_line(*trace, "END", alt);
          ++stats.rule_count;
          node.label = apply_end(alt);
          node.rule = RuleKind::End;
        } else {
          node.label = alt;
          node.rule = RuleKind::Leaf;
        }
        return node;
      }
      if (trace) trace_line(*trace, "BR", alt);
      ++stats.rule_count;
      std::vector<Label> children = apply_br(alt);
      if (opts.check_invariants)
        for (const auto& c : children) check_label(c);
      TableauNode node;
      node.label = alt;
      node.rule = RuleKind::Br;
      bool ok = true;
      for (const Label& c : children) {
        auto sub = run(c, br_depth + 1);
        if (!sub) {
          ok = false;
          break;
        }
        node.children.push_back(std::move(*sub));
      }
      if (ok) return node;
    }
    return std::nullopt;
  }
};

FormulaPtr body_of(const FormulaPtr& f) { return f->get_if<BundleNode>()->body; }
Variable binder_of(const FormulaPtr& f) { return f->get_if<BundleNode>()->binders[0]; }

}  // namespace

Label init_root(const FormulaPtr& theta) {
  if (!is_pnf(*theta) || !is_clean(*theta))
    throw std::invalid_argument("init_root expects a clean PNF formula");
  if (!in_tableau_fragment(*theta))
    throw FragmentError(
        "formula outside the single-binder modality-first fragment: " + render(*theta));
  Label root;
  root.world = "r";
  root.formulas.push_back(theta);
  root.sigma = free_vars(*theta);
  std::set<Variable> used = all_vars(*theta);
  for (std::size_t k = 0;; ++k) {
    Variable z("z" + std::to_string(k));
    if (!used.count(z)) {
      root.sigma.insert(z);
      break;
    }
  }
  return root;
}

std::vector<Label> saturate_boolean(const Label& l, bool reverse_or) {
  return saturate_impl(l, reverse_or, nullptr);
}

Partition partition(const Label& l) {
  Partition p;
  for (const auto& f : l.formulas) {
    if (f->is_literal()) {
      p.literals.push_back(f);
      continue;
    }
    const auto* b = f->get_if<BundleNode>();
    if (!b) throw std::invalid_argument("partition: label is not boolean-saturated");
    if (!modality_first(b->kind) || b->binders.size() != 1)
      throw FragmentError("bundle outside the tableau fragment: " + render(*f));
    switch (b->kind) {
      case BundleKind::BoxExists: p.box_exists.push_back(f); break;
      case BundleKind::BoxForall: p.box_forall.push_back(f); break;
      case BundleKind::DiaForall: p.dia_forall.push_back(f); break;
      case BundleKind::DiaExists: p.dia_exists.push_back(f); break;
      default: throw FragmentError("bundle outside the tableau fragment: " + render(*f));
    }
  }
  return p;
}

std::vector<Label> apply_br(const Label& l) {
  Partition p = partition(l);
  if (p.dia_forall.empty() && p.dia_exists.empty())
    throw std::invalid_argument("apply_br: no diamond formulas");

  std::set<Variable> sigma2 = l.sigma;
  for (const auto& f : p.box_exists) sigma2.insert(binder_of(f));
  for (const auto& f : p.dia_exists) sigma2.insert(binder_of(f));

  std::set<std::string> avoid_base;
  for (const auto& v : l.sigma) avoid_base.insert(v.name);
  for (const auto& f : l.formulas)
    for (const auto& v : all_vars(*f)) avoid_base.insert(v.name);
  std::set<std::string> committed_base;
  for (const auto& v : sigma2) committed_base.insert(v.name);

  std::vector<Label> children;
  auto start_child = [&](const Variable& binder) {
    Label c;
    c.world = l.world + ".v_" + binder.name;
    c.sigma = sigma2;
    return c;
  };
  auto emit = [](Label& c, ApartRenamer& rn, const FormulaPtr& f) {
    FormulaPtr g = rn.rename(f);
    if (!contains(c.formulas, g)) c.formulas.push_back(std::move(g));
  };
  // Label cleanliness rules out capture; if it fires anyway the caller has a bug.
  auto inst = [](const FormulaPtr& body, const Variable& from, const Variable& to) {
    try {
      return substitute(body, from, to);
    } catch (const CaptureError& e) {
      throw InternalError(std::string("capture while instantiating a rule: ") + e.what());
    }
  };
  auto common = [&](Label& c, ApartRenamer& rn) {
    for (const auto& f : p.box_exists) emit(c, rn, body_of(f));
    for (const auto& f : p.box_forall) {
      Variable y = binder_of(f);
      FormulaPtr body = body_of(f);
      for (const auto& x : sigma2) emit(c, rn, inst(body, y, x));
    }
  };

  for (const auto& f : p.dia_forall) {
    std::set<std::string> committed = committed_base, avoid = avoid_base;
    ApartRenamer rn{committed, avoid};
    Label c = start_child(binder_of(f));
    common(c, rn);
    Variable z = binder_of(f);
    FormulaPtr body = body_of(f);
    for (const auto& y : sigma2) emit(c, rn, inst(body, z, y));
    children.push_back(std::move(c));
  }
  for (const auto& f : p.dia_exists) {
    std::set<std::string> committed = committed_base, avoid = avoid_base;
    ApartRenamer rn{committed, avoid};
    Label c = start_child(binder_of(f));
    common(c, rn);
    emit(c, rn, body_of(f));
    children.push_back(std::move(c));
  }
  return children;
}

Label apply_end(const Label& l) {
  Partition p = partition(l);
  if (!p.dia_forall.empty() || !p.dia_exists.empty())
    throw std::invalid_argument("apply_end: diamond formulas present");
  if (p.box_exists.empty() && p.box_forall.empty())
    throw std::invalid_argument("apply_end: no box formulas");
  Label out;
  out.world = l.world;
  out.sigma = l.sigma;
  out.formulas = p.literals;
  return out;
}

bool is_closed(const std::vector<FormulaPtr>& literals) {
  std::set<std::pair<std::string, std::vector<std::string>>> pos, neg;
  auto key = [](const PredicateSymbol& p, const std::vector<Variable>& args) {
    std::vector<std::string> names;
    names.reserve(args.size());
    for (const auto& a : args) names.push_back(a.name);
    return std::make_pair(p.name, std::move(names));
  };
  for (const auto& f : literals) {
    if (f->get_if<BotNode>()) return true;
    if (const auto* a = f->get_if<AtomNode>()) pos.insert(key(a->pred, a->args));
    if (const auto* n = f->get_if<NegAtomNode>()) neg.insert(key(n->pred, n->args));
  }
  for (const auto& k : pos)
    if (neg.count(k)) return true;
  return false;
}

std::optional<TableauNode> search_open(const Label& l, const SolveOptions& opts,
                                       SolveStats* stats) {
  Searcher s(opts);
  auto r = s.run(l, 0);
  if (stats) *stats = s.stats;
  return r;
}

std::tuple<KripkeModel, std::string, Valuation> extract_model(const TableauNode& root) {
  KripkeModel m;
  auto walk = [&](auto&& self, const TableauNode& n) -> void {
    if (!m.worlds.insert(n.label.world).second)
      throw InternalError("duplicate world name in tableau: " + n.label.world);
    auto& dom = m.delta[n.label.world];
    for (const auto& v : n.label.sigma) {
      dom.insert(v.name);
      m.domain.insert(v.name);
    }
    std::vector<FormulaPtr> lits;
    for (const auto& f : n.label.formulas)
      if (f->is_literal()) lits.push_back(f);
    if (is_closed(lits))
      throw InternalError("closed literal set at extracted world " + n.label.world);
    for (const auto& f : lits)
      if (const auto* a = f->get_if<AtomNode>()) {
        Tuple t;
        for (const auto& v : a->args) t.push_back(v.name);
        m.valuation[n.label.world][a->pred.name].insert(std::move(t));
      }
    for (const auto& c : n.children) {
      m.relation.emplace(n.label.world, c.label.world);
      self(self, c);
    }
  };
  walk(walk, root);
  Valuation sigma;
  for (const auto& v : root.label.sigma) sigma[v] = v.name;
  return {std::move(m), root.label.world, std::move(sigma)};
}

SatResult solve(const FormulaPtr& theta, const SolveOptions& opts) {
  FormulaPtr normal = make_clean(to_pnf(theta));
  if (!in_tableau_fragment(*normal))
    throw FragmentError(
        "formula outside the single-binder modality-first fragment: " + render(*theta));
  Label root = init_root(normal);
  SatResult result;
  auto tree = search_open(root, opts, &result.stats);
  if (!tree) return result;
  auto [model, root_world, sigma] = extract_model(*tree);
  if (auto bad = validate(model, DomainPolicy::Increasing))
    throw InternalError("extracted model invalid: " + *bad);
  if (!evaluate(model, root_world, sigma, *theta))
    throw InternalError("extracted model does not satisfy the input");
  result.witness = SatWitness{std::move(model), root_world, std::move(sigma)};
  return result;
}

}  // namespace bfoml
