#include "bfoml/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <tuple>

#include "bfoml/errors.hpp"

namespace bfoml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Bit layout of a predicate valuation over k worlds and m elements.
struct Layout {
  std::size_t m = 0;
  std::size_t per_world = 0;
  std::vector<std::size_t> offset;               // per predicate
  std::vector<std::vector<std::size_t>> weight;  // per predicate, per argument
};

Layout make_layout(const std::vector<PredicateSymbol>& preds, std::size_t m) {
  Layout lay;
  lay.m = m;
  for (const auto& p : preds) {
    lay.offset.push_back(lay.per_world);
    std::vector<std::size_t> w(p.arity);
    std::size_t span = 1;
    for (std::size_t i = p.arity; i-- > 0;) {
      w[i] = span;
      span *= m;
    }
    lay.weight.push_back(std::move(w));
    lay.per_world += span;
  }
  return lay;
}

struct Frame {
  std::size_t k = 0, m = 0;
  std::uint64_t rel = 0;
  std::vector<std::uint32_t> delta;       // per world, element bitmask
  std::vector<std::vector<int>> succ;     // per world, ascending
  std::vector<std::vector<int>> dom;      // per world, ascending
};

Frame build_frame(std::size_t k, std::size_t m, std::uint64_t rel,
                  const std::vector<std::uint32_t>& delta) {
  Frame fr;
  fr.k = k;
  fr.m = m;
  fr.rel = rel;
  fr.delta = delta;
  fr.succ.resize(k);
  fr.dom.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (rel >> (i * k + j) & 1) fr.succ[i].push_back(static_cast<int>(j));
    for (std::size_t e = 0; e < m; ++e)
      if (delta[i] >> e & 1) fr.dom[i].push_back(static_cast<int>(e));
  }
  return fr;
}

// ---- precomputed frame lists with isomorphism classes ----

struct FrameRec {
  std::uint32_t rel;
  std::uint32_t combo;  // local-domain odometer index
  std::int32_t cls;
};

struct FrameList {
  std::vector<FrameRec> frames;  // enumeration order
  std::size_t num_classes = 0;
};

void combo_digits(std::uint64_t combo, std::size_t k, std::uint32_t base,
                  std::vector<std::uint32_t>& out) {
  out.resize(k);
  for (std::size_t w = 0; w < k; ++w) {
    out[w] = static_cast<std::uint32_t>(combo % base) + 1;  // non-empty subset
    combo /= base;
  }
}

bool increasing_ok(std::uint64_t rel, std::size_t k, const std::vector<std::uint32_t>& delta) {
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if ((rel >> (i * k + j) & 1) && (delta[i] & ~delta[j])) return false;
  return true;
}

std::vector<std::vector<int>> permutations(std::size_t n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Least (relation, delta-digit) encoding over all world/element relabelings;
// frames sharing it are isomorphic, so they agree on every sat question.
std::pair<std::uint64_t, std::uint64_t> canonical_key(
    std::size_t k, std::size_t m, std::uint64_t rel, const std::vector<std::uint32_t>& delta,
    const std::vector<std::vector<int>>& wperms, const std::vector<std::vector<int>>& eperms) {
  std::pair<std::uint64_t, std::uint64_t> best{~0ull, ~0ull};
  for (const auto& wp : wperms) {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (rel >> (wp[i] * k + wp[j]) & 1) r |= 1ull << (i * k + j);
    if (r > best.first) continue;
    for (const auto& ep : eperms) {
      std::uint64_t d = 0;
      for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t src = delta[wp[i]], img = 0;
        for (std::size_t e = 0; e < m; ++e)
          if (src >> e & 1) img |= 1u << ep[e];
        d |= static_cast<std::uint64_t>(img) << (i * m);
      }
      best = std::min(best, {r, d});
    }
  }
  return best;
}

const FrameList& frame_list(std::size_t k, std::size_t m, DomainPolicy policy) {
  if (k * k >= 64 || m >= 31)
    throw std::invalid_argument("model bounds too large for bounded search");
  static std::map<std::tuple<std::size_t, std::size_t, int>, FrameList> cache;
  auto key = std::make_tuple(k, m, static_cast<int>(policy));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  FrameList fl;
  bool canonize = k <= 5 && m <= 5 && k * k <= 64 && k * m <= 64;
  auto wperms = canonize ? permutations(k) : std::vector<std::vector<int>>{};
  auto eperms = canonize ? permutations(m) : std::vector<std::vector<int>>{};
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::int32_t> classes;

  std::uint32_t base = (1u << m) - 1;
  std::uint64_t combos = 1;
  if (policy == DomainPolicy::Increasing)
    for (std::size_t w = 0; w < k; ++w) combos *= base;

  std::vector<std::uint32_t> delta;
  for (std::uint64_t rel = 0; rel < (1ull << (k * k)); ++rel) {
    for (std::uint64_t c = 0; c < combos; ++c) {
      if (policy == DomainPolicy::Constant) {
        delta.assign(k, base);
      } else {
        combo_digits(c, k, base, delta);
        if (!increasing_ok(rel, k, delta)) continue;
      }
      std::int32_t cls;
      if (canonize) {
        auto ck = canonical_key(k, m, rel, delta, wperms, eperms);
        auto [cit, fresh] = classes.emplace(ck, static_cast<std::int32_t>(classes.size()));
        cls = cit->second;
      } else {
        cls = static_cast<std::int32_t>(fl.frames.size());
      }
      fl.frames.push_back({static_cast<std::uint32_t>(rel), static_cast<std::uint32_t>(c), cls});
    }
  }
  fl.num_classes = canonize ? classes.size() : fl.frames.size();
  return cache.emplace(key, std::move(fl)).first->second;
}

// ---- compiled formulas ----

struct Node {
  enum class Op { True, False, Lit, Neg, And, Or, Bun } op;
  bool positive = true;        // Lit
  int pred = -1;               // Lit: index into the predicate list
  std::vector<int> args;       // Lit: variable slots
  int a = -1, b = -1;          // children / bundle body in a
  BundleKind kind{};           // Bun
  int slot1 = -1, slot2 = -1;  // Bun binder slots
};

struct Compiled {
  std::vector<Node> nodes;
  int root_f = -1, root_g = -1;
  std::vector<PredicateSymbol> preds;    // sorted by name
  std::vector<Variable> free_sorted;     // slots 0..F-1
  int num_slots = 0;
};

int compile_into(Compiled& c, const Formula& f, std::map<Variable, int> scope) {
  auto add = [&](Node n) {
    c.nodes.push_back(std::move(n));
    return static_cast<int>(c.nodes.size() - 1);
  };
  auto pred_index = [&](const PredicateSymbol& p) {
    auto it = std::lower_bound(c.preds.begin(), c.preds.end(), p,
                               [](const auto& a, const auto& b) { return a.name < b.name; });
    if (it == c.preds.end() || it->name != p.name)
      throw InternalError("predicate missing from layout: " + p.name);
    return static_cast<int>(it - c.preds.begin());
  };
  auto lit = [&](const PredicateSymbol& p, const std::vector<Variable>& args, bool pos) {
    Node n;
    n.op = Node::Op::Lit;
    n.positive = pos;
    n.pred = pred_index(p);
    for (const auto& a : args) {
      auto it = scope.find(a);
      if (it == scope.end()) throw InternalError("unresolved variable: " + a.name);
      n.args.push_back(it->second);
    }
    return add(std::move(n));
  };
  return std::visit(
      overloaded{
          [&](const TopNode&) { return add({.op = Node::Op::True}); },
          [&](const BotNode&) { return add({.op = Node::Op::False}); },
          [&](const AtomNode& n) { return lit(n.pred, n.args, true); },
          [&](const NegAtomNode& n) { return lit(n.pred, n.args, false); },
          [&](const NotNode& n) {
            int body = compile_into(c, *n.body, scope);
            Node out;
            out.op = Node::Op::Neg;
            out.a = body;
            return add(std::move(out));
          },
          [&](const AndNode& n) {
            Node out;
            out.op = Node::Op::And;
            out.a = compile_into(c, *n.lhs, scope);
            out.b = compile_into(c, *n.rhs, scope);
            return add(std::move(out));
          },
          [&](const OrNode& n) {
            Node out;
            out.op = Node::Op::Or;
            out.a = compile_into(c, *n.lhs, scope);
            out.b = compile_into(c, *n.rhs, scope);
            return add(std::move(out));
          },
          [&](const BundleNode& n) {
            Node out;
            out.op = Node::Op::Bun;
            out.kind = n.kind;
            out.slot1 = c.num_slots++;
            scope[n.binders[0]] = out.slot1;
            if (n.binders.size() == 2) {
              out.slot2 = c.num_slots++;
              scope[n.binders[1]] = out.slot2;
            }
            out.a = compile_into(c, *n.body, scope);
            return add(std::move(out));
          },
      },
      f.node());
}

Compiled compile(const FormulaPtr& f, const FormulaPtr& g) {
  Compiled c;
  std::map<std::string, PredicateSymbol> by_name;
  for (const FormulaPtr& h : {f, g}) {
    if (!h) continue;
    for (const auto& p : predicates(*h)) {
      auto [it, fresh] = by_name.emplace(p.name, p);
      if (!fresh && it->second.arity != p.arity)
        throw EvalError("predicate '" + p.name + "' used at two arities");
    }
  }
  for (auto& [name, p] : by_name) c.preds.push_back(p);

  std::set<Variable> free = free_vars(*f);
  if (g)
    for (const auto& v : free_vars(*g)) free.insert(v);
  std::map<Variable, int> scope;
  for (const auto& v : free) {
    scope[v] = c.num_slots++;
    c.free_sorted.push_back(v);
  }
  c.root_f = compile_into(c, *f, scope);
  if (g) c.root_g = compile_into(c, *g, scope);
  return c;
}

// ---- three-valued evaluation over a partial valuation ----

constexpr std::int8_t kU = 2;

struct Eval {
  const Compiled& c;
  const Frame& fr;
  const Layout& lay;
  std::vector<std::int8_t> bits;  // -1 unknown / 0 / 1
  std::vector<int> env;           // element index per slot
  int first_unknown = -1;

  Eval(const Compiled& cc, const Frame& f, const Layout& l)
      : c(cc), fr(f), lay(l), bits(f.k * l.per_world, -1), env(cc.num_slots, 0) {}

  std::int8_t run(int id, int w) {
    const Node& n = c.nodes[id];
    switch (n.op) {
      case Node::Op::True: return 1;
      case Node::Op::False: return 0;
      case Node::Op::Lit: {
        std::size_t bit = w * lay.per_world + lay.offset[n.pred];
        const auto& wt = lay.weight[n.pred];
        for (std::size_t i = 0; i < n.args.size(); ++i)
          bit += wt[i] * static_cast<std::size_t>(env[n.args[i]]);
        std::int8_t v = bits[bit];
        if (v < 0) {
          if (first_unknown < 0) first_unknown = static_cast<int>(bit);
          return kU;
        }
        return n.positive ? v : static_cast<std::int8_t>(1 - v);
      }
      case Node::Op::Neg: {
        std::int8_t v = run(n.a, w);
        return v == kU ? kU : static_cast<std::int8_t>(1 - v);
      }
      case Node::Op::And: {
        std::int8_t x = run(n.a, w);
        if (x == 0) return 0;
        std::int8_t y = run(n.b, w);
        if (y == 0) return 0;
        return (x == kU || y == kU) ? kU : 1;
      }
      case Node::Op::Or: {
        std::int8_t x = run(n.a, w);
        if (x == 1) return 1;
        std::int8_t y = run(n.b, w);
        if (y == 1) return 1;
        return (x == kU || y == kU) ? kU : 0;
      }
      case Node::Op::Bun: return run_bundle(n, w);
    }
    throw InternalError("bad node");
  }

  // AND/OR combinators over a range, three-valued with short-circuit.
  template <class Range, class Fn>
  std::int8_t all3(const Range& r, Fn&& fn) {
    bool unknown = false;
    for (const auto& x : r) {
      std::int8_t v = fn(x);
      if (v == 0) return 0;
      unknown |= v == kU;
    }
    return unknown ? kU : 1;
  }
  template <class Range, class Fn>
  std::int8_t any3(const Range& r, Fn&& fn) {
    bool unknown = false;
    for (const auto& x : r) {
      std::int8_t v = fn(x);
      if (v == 1) return 1;
      unknown |= v == kU;
    }
    return unknown ? kU : 0;
  }

  std::int8_t run_bundle(const Node& n, int w) {
    auto body_at = [&](int v) { return run(n.a, v); };
    switch (n.kind) {
      case BundleKind::ExistsBox:
        return any3(fr.dom[w], [&](int d) {
          env[n.slot1] = d;
          return all3(fr.succ[w], body_at);
        });
      case BundleKind::ExistsDia:
        return any3(fr.dom[w], [&](int d) {
          env[n.slot1] = d;
          return any3(fr.succ[w], body_at);
        });
      case BundleKind::ForallBox:
        return all3(fr.dom[w], [&](int d) {
          env[n.slot1] = d;
          return all3(fr.succ[w], body_at);
        });
      case BundleKind::ForallDia:
        return all3(fr.dom[w], [&](int d) {
          env[n.slot1] = d;
          return any3(fr.succ[w], body_at);
        });
      case BundleKind::BoxExists:
        return all3(fr.succ[w], [&](int v) { return some_elem(n, v); });
      case BundleKind::BoxForall:
        return all3(fr.succ[w], [&](int v) { return every_elem(n, v); });
      case BundleKind::DiaExists:
        return any3(fr.succ[w], [&](int v) { return some_elem(n, v); });
      case BundleKind::DiaForall:
        return any3(fr.succ[w], [&](int v) { return every_elem(n, v); });
    }
    throw InternalError("bad bundle");
  }

  std::int8_t some_elem(const Node& n, int v) {
    return any3(fr.dom[v], [&](int d) {
      env[n.slot1] = d;
      if (n.slot2 < 0) return run(n.a, v);
      return any3(fr.dom[v], [&](int d2) {
        env[n.slot2] = d2;
        return run(n.a, v);
      });
    });
  }
  std::int8_t every_elem(const Node& n, int v) {
    return all3(fr.dom[v], [&](int d) {
      env[n.slot1] = d;
      if (n.slot2 < 0) return run(n.a, v);
      return all3(fr.dom[v], [&](int d2) {
        env[n.slot2] = d2;
        return run(n.a, v);
      });
    });
  }

  // Is some completion of the partial valuation a model of root at (w, env)?
  bool sat_here(int root, int w) {
    first_unknown = -1;
    std::int8_t r = run(root, w);
    if (r != kU) return r == 1;
    int bit = first_unknown;
    for (std::int8_t v : {std::int8_t(1), std::int8_t(0)}) {
      bits[bit] = v;
      if (sat_here(root, w)) {
        bits[bit] = -1;
        return true;
      }
    }
    bits[bit] = -1;
    return false;
  }

  // Every completion makes root_f and root_g agree (or complement)?
  bool agree_here(int w, bool complement) {
    first_unknown = -1;
    std::int8_t a = run(c.root_f, w);
    std::int8_t b = run(c.root_g, w);
    if (a != kU && b != kU) return a == (complement ? 1 - b : b);
    int bit = first_unknown;
    for (std::int8_t v : {std::int8_t(0), std::int8_t(1)}) {
      bits[bit] = v;
      if (!agree_here(w, complement)) {
        bits[bit] = -1;
        return false;
      }
    }
    bits[bit] = -1;
    return true;
  }

  // Valuation-of-free-variables odometer: last variable fastest, each ranging
  // over delta(w) in ascending element order. fn gets called per assignment.
  bool each_sigma(int w, const std::function<bool()>& fn) {
    std::size_t nf = c.free_sorted.size();
    const auto& dom = fr.dom[w];
    std::vector<std::size_t> idx(nf, 0);
    while (true) {
      for (std::size_t i = 0; i < nf; ++i) env[i] = dom[idx[i]];
      if (fn()) return true;
      std::size_t i = nf;
      while (i > 0) {
        --i;
        if (++idx[i] < dom.size()) break;
        idx[i] = 0;
        if (i == 0) return false;
      }
      if (nf == 0) return false;
    }
  }

  bool frame_sat() {
    for (std::size_t w = 0; w < fr.k; ++w)
      if (each_sigma(static_cast<int>(w),
                     [&] { return sat_here(c.root_f, static_cast<int>(w)); }))
        return true;
    return false;
  }
};

KripkeModel materialize(const Frame& fr, const Layout& lay,
                        const std::vector<PredicateSymbol>& preds,
                        const std::vector<std::int8_t>& bits) {
  KripkeModel m;
  auto wname = [](std::size_t i) { return "w" + std::to_string(i); };
  auto dname = [](std::size_t e) { return "d" + std::to_string(e); };
  for (std::size_t i = 0; i < fr.k; ++i) m.worlds.insert(wname(i));
  for (std::size_t e = 0; e < fr.m; ++e) m.domain.insert(dname(e));
  for (std::size_t i = 0; i < fr.k; ++i)
    for (std::size_t j = 0; j < fr.k; ++j)
      if (fr.rel >> (i * fr.k + j) & 1) m.relation.emplace(wname(i), wname(j));
  for (std::size_t i = 0; i < fr.k; ++i) {
    auto& slot = m.delta[wname(i)];
    for (int e : fr.dom[i]) slot.insert(dname(static_cast<std::size_t>(e)));
  }
  for (std::size_t w = 0; w < fr.k; ++w) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      std::size_t span = 1;
      for (std::size_t i = 0; i < preds[p].arity; ++i) span *= fr.m;
      for (std::size_t t = 0; t < span; ++t) {
        std::size_t bit = w * lay.per_world + lay.offset[p] + t;
        if (bits[bit] != 1) continue;
        Tuple tup(preds[p].arity);
        std::size_t rest = t;
        for (std::size_t i = preds[p].arity; i-- > 0;) {
          tup[i] = dname(rest % fr.m);
          rest /= fr.m;
        }
        m.valuation[wname(w)][preds[p].name].insert(std::move(tup));
      }
    }
  }
  return m;
}

Frame frame_of_model(const KripkeModel& m, std::vector<std::string>& wnames,
                     std::vector<std::string>& dnames) {
  wnames.assign(m.worlds.begin(), m.worlds.end());
  dnames.assign(m.domain.begin(), m.domain.end());
  auto widx = [&](const std::string& w) {
    return std::lower_bound(wnames.begin(), wnames.end(), w) - wnames.begin();
  };
  auto didx = [&](const std::string& d) {
    return std::lower_bound(dnames.begin(), dnames.end(), d) - dnames.begin();
  };
  std::size_t k = wnames.size(), dm = dnames.size();
  if (k * k > 64) throw EvalError("frame too large");
  std::uint64_t rel = 0;
  for (const auto& e : m.relation) rel |= 1ull << (widx(e.first) * k + widx(e.second));
  std::vector<std::uint32_t> delta(k, 0);
  for (const auto& [w, dom] : m.delta)
    for (const auto& d : dom) delta[widx(w)] |= 1u << didx(d);
  return build_frame(k, dm, rel, delta);
}

}  // namespace

void enumerate_models(const std::vector<PredicateSymbol>& signature,
                      std::size_t max_worlds, std::size_t max_domain, DomainPolicy policy,
                      const std::function<bool(const KripkeModel&)>& visit) {
  if (max_worlds < 1 || max_domain < 1)
    throw std::invalid_argument("bounds must be at least 1");
  if (max_worlds * max_worlds >= 64 || max_domain >= 31)
    throw std::invalid_argument("model bounds too large for bounded search");
  std::vector<PredicateSymbol> preds(signature);
  std::sort(preds.begin(), preds.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < preds.size(); ++i)
    if (preds[i - 1].name == preds[i].name)
      throw std::invalid_argument("duplicate predicate in signature: " + preds[i].name);

  for (std::size_t k = 1; k <= max_worlds; ++k) {
    for (std::size_t m = 1; m <= max_domain; ++m) {
      Layout lay = make_layout(preds, m);
      std::size_t nbits = k * lay.per_world;
      std::uint32_t base = (1u << m) - 1;
      std::uint64_t combos = 1;
      if (policy == DomainPolicy::Increasing)
        for (std::size_t w = 0; w < k; ++w) combos *= base;
      std::vector<std::uint32_t> delta;
      for (std::uint64_t rel = 0; rel < (1ull << (k * k)); ++rel) {
        for (std::uint64_t c = 0; c < combos; ++c) {
          if (policy == DomainPolicy::Constant) {
            delta.assign(k, base);
          } else {
            combo_digits(c, k, base, delta);
            if (!increasing_ok(rel, k, delta)) continue;
          }
          Frame fr = build_frame(k, m, rel, delta);
          std::vector<std::int8_t> bits(nbits, 0);
          while (true) {
            if (!visit(materialize(fr, lay, preds, bits))) return;
            std::size_t i = 0;
            while (i < nbits && bits[i] == 1) bits[i++] = 0;
            if (i == nbits) break;
            bits[i] = 1;
          }
        }
      }
    }
  }
}

std::optional<OracleWitness> bounded_sat(const FormulaPtr& f, std::size_t max_worlds,
                                         std::size_t max_domain, DomainPolicy policy) {
  if (max_worlds < 1 || max_domain < 1)
    throw std::invalid_argument("bounds must be at least 1");
  Compiled c = compile(f, nullptr);

  for (std::size_t k = 1; k <= max_worlds; ++k) {
    for (std::size_t m = 1; m <= max_domain; ++m) {
      Layout lay = make_layout(c.preds, m);
      const FrameList& fl = frame_list(k, m, policy);
      std::vector<std::int8_t> verdict(fl.num_classes, -1);
      std::vector<std::uint32_t> delta;
      std::uint32_t base = (1u << m) - 1;
      for (const FrameRec& rec : fl.frames) {
        std::int8_t& v = verdict[rec.cls];
        if (v < 0) {
          if (policy == DomainPolicy::Constant)
            delta.assign(k, base);
          else
            combo_digits(rec.combo, k, base, delta);
          Frame fr = build_frame(k, m, rec.rel, delta);
          Eval ev(c, fr, lay);
          v = ev.frame_sat() ? 1 : 0;
        }
        if (v != 1) continue;

        // First satisfiable frame in enumeration order: extract the least
        // valuation admitting a witness, then the first (world, sigma).
        if (policy == DomainPolicy::Constant)
          delta.assign(k, base);
        else
          combo_digits(rec.combo, k, base, delta);
        Frame fr = build_frame(k, m, rec.rel, delta);
        Eval ev(c, fr, lay);
        std::size_t nbits = fr.k * lay.per_world;
        for (std::size_t b = nbits; b-- > 0;) {
          ev.bits[b] = 0;
          if (!ev.frame_sat()) ev.bits[b] = 1;
        }
        std::string world;
        Valuation sigma;
        bool found = false;
        for (std::size_t w = 0; w < fr.k && !found; ++w) {
          ev.each_sigma(static_cast<int>(w), [&] {
            std::int8_t r = ev.run(c.root_f, static_cast<int>(w));
            if (r == kU) throw InternalError("incomplete valuation in witness scan");
            if (r != 1) return false;
            world = "w" + std::to_string(w);
            for (std::size_t i = 0; i < c.free_sorted.size(); ++i)
              sigma[c.free_sorted[i]] = "d" + std::to_string(ev.env[i]);
            found = true;
            return true;
          });
        }
        if (!found) throw InternalError("satisfiable frame lost its witness");
        KripkeModel model = materialize(fr, lay, c.preds, ev.bits);
        if (validate(model, policy))
          throw InternalError("oracle produced an invalid model");
        if (!evaluate(model, world, sigma, *f))
          throw InternalError("oracle witness failed re-evaluation");
        return OracleWitness{std::move(model), std::move(world), std::move(sigma)};
      }
    }
  }
  return std::nullopt;
}

bool agree_on_frame(const KripkeModel& frame, const std::string& world,
                    const Valuation& sigma, const FormulaPtr& f, const FormulaPtr& g,
                    bool complement) {
  Compiled c = compile(f, g);
  std::vector<std::string> wnames, dnames;
  Frame fr = frame_of_model(frame, wnames, dnames);
  Layout lay = make_layout(c.preds, fr.m);
  Eval ev(c, fr, lay);

  auto wit = std::lower_bound(wnames.begin(), wnames.end(), world);
  if (wit == wnames.end() || *wit != world) throw EvalError("unknown world '" + world + "'");
  int w = static_cast<int>(wit - wnames.begin());
  for (std::size_t i = 0; i < c.free_sorted.size(); ++i) {
    auto it = sigma.find(c.free_sorted[i]);
    if (it == sigma.end())
      throw EvalError("valuation does not bind free variable '" + c.free_sorted[i].name + "'");
    auto dit = std::lower_bound(dnames.begin(), dnames.end(), it->second);
    if (dit == dnames.end() || *dit != it->second)
      throw EvalError("unknown element '" + it->second + "'");
    int e = static_cast<int>(dit - dnames.begin());
    if (!(fr.delta[w] >> e & 1))
      throw EvalError("valuation maps '" + c.free_sorted[i].name + "' outside delta(" + world +
                      ")");
    ev.env[i] = e;
  }
  return ev.agree_here(w, complement);
}

}  // namespace bfoml
