#include "bfoml/corpus.hpp"

#include <algorithm>
#include <random>

namespace bfoml {

CorpusProfile CorpusProfile::tableau() {
  CorpusProfile p;
  p.preds = {{"P", 1}, {"Q", 2}, {"S", 0}};
  p.free_pool = {"v1", "v2"};
  p.max_modal_depth = 3;
  p.max_connectives = 10;
  p.modality_first_only = true;
  return p;
}

CorpusProfile CorpusProfile::preservation() {
  CorpusProfile p;
  p.preds = {{"P", 1}, {"Q", 2}};
  p.free_pool = {"v1"};
  p.max_modal_depth = 2;
  p.max_connectives = 8;
  p.allow_not = true;
  p.allow_two_binders = true;
  p.allow_unclean = true;
  return p;
}

namespace {

constexpr BundleKind kModalityFirst[] = {BundleKind::BoxExists, BundleKind::BoxForall,
                                         BundleKind::DiaForall, BundleKind::DiaExists};
constexpr BundleKind kAllKinds[] = {BundleKind::ExistsBox, BundleKind::ExistsDia,
                                    BundleKind::ForallBox, BundleKind::ForallDia,
                                    BundleKind::BoxExists, BundleKind::BoxForall,
                                    BundleKind::DiaForall, BundleKind::DiaExists};

struct Gen {
  std::mt19937_64 rng;
  const CorpusProfile& prof;
  std::size_t conns = 0;
  std::size_t binders = 0;

  Gen(const CorpusProfile& p, std::uint64_t seed) : rng(seed), prof(p) {}

  // rng() % n is stable across standard libraries, unlike the distributions.
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng() % n); }

  Variable fresh_binder() { return Variable("x" + std::to_string(++binders)); }

  Variable binder_name(const std::vector<Variable>& scope) {
    if (prof.allow_unclean && !scope.empty() && pick(4) == 0)
      return scope[pick(scope.size())];
    return fresh_binder();
  }

  FormulaPtr leaf(const std::vector<Variable>& scope) {
    std::size_t r = pick(10);
    if (r == 0) return top();
    if (r == 1) return bot();
    const PredicateSymbol& p = prof.preds[pick(prof.preds.size())];
    std::vector<Variable> args;
    for (std::size_t i = 0; i < p.arity; ++i) args.push_back(scope[pick(scope.size())]);
    return pick(2) ? atom(p.name, std::move(args)) : neg_atom(p.name, std::move(args));
  }

  FormulaPtr gen(std::size_t depth_left, const std::vector<Variable>& scope) {
    while (true) {
      if (conns >= prof.max_connectives) return leaf(scope);
      std::size_t r = pick(6);
      if (r <= 1) return leaf(scope);
      if (r == 2 || r == 3) {
        ++conns;
        FormulaPtr l = gen(depth_left, scope);
        FormulaPtr rr = gen(depth_left, scope);
        return r == 2 ? land(std::move(l), std::move(rr)) : lor(std::move(l), std::move(rr));
      }
      if (r == 4) {
        if (!prof.allow_not) continue;
        ++conns;
        return lnot(gen(depth_left, scope));
      }
      if (depth_left == 0) continue;
      ++conns;
      BundleKind kind = prof.modality_first_only ? kModalityFirst[pick(4)] : kAllKinds[pick(8)];
      std::vector<Variable> bs{binder_name(scope)};
      if (prof.allow_two_binders && modality_first(kind) && pick(3) == 0) {
        Variable b2 = binder_name(scope);
        while (b2 == bs[0]) b2 = fresh_binder();
        bs.push_back(b2);
      }
      std::vector<Variable> inner = scope;
      for (const auto& b : bs)
        if (std::find(inner.begin(), inner.end(), b) == inner.end()) inner.push_back(b);
      return bundle(kind, bs, gen(depth_left - 1, inner));
    }
  }
};

}  // namespace

std::vector<FormulaPtr> generate_corpus(const CorpusProfile& profile, std::uint64_t seed,
                                        std::size_t count) {
  Gen g(profile, seed);
  std::vector<Variable> base;
  for (const auto& n : profile.free_pool) base.emplace_back(n);

  std::vector<FormulaPtr> out;
  while (out.size() < count) {
    g.conns = 0;
    g.binders = 0;
    FormulaPtr f = g.gen(profile.max_modal_depth, base);
    if (f->get_if<TopNode>() || f->get_if<BotNode>()) continue;
    if (profile.modality_first_only && (!is_pnf(*f) || !is_clean(*f))) continue;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace bfoml
