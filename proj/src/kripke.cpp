#include "bfoml/kripke.hpp"

#include <algorithm>

#include "bfoml/errors.hpp"

namespace bfoml {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string edge_str(const std::pair<std::string, std::string>& e) {
  return "(" + e.first + "," + e.second + ")";
}

struct Evaluator {
  const KripkeModel& m;
  std::map<Variable, std::string> env;

  bool atom_true(const std::string& w, const std::string& pred,
                 const std::vector<Variable>& args) {
    Tuple t;
    t.reserve(args.size());
    for (const auto& a : args) {
      auto it = env.find(a);
      if (it == env.end())
        throw EvalError("unbound variable '" + a.name + "'");
      t.push_back(it->second);
    }
    auto wit = m.valuation.find(w);
    if (wit == m.valuation.end()) return false;
    auto pit = wit->second.find(pred);
    if (pit == wit->second.end()) return false;
    return pit->second.count(t) > 0;
  }

  template <class Fn>
  bool with_binding(const Variable& x, const std::string& d, Fn&& fn) {
    auto [it, fresh] = env.emplace(x, d);
    std::string saved;
    if (!fresh) {
      saved = it->second;
      it->second = d;
    }
    bool r = fn();
    if (fresh)
      env.erase(it);
    else
      it->second = saved;
    return r;
  }

  std::vector<std::string> successors(const std::string& w) const {
    std::vector<std::string> out;
    for (auto it = m.relation.lower_bound({w, ""});
         it != m.relation.end() && it->first == w; ++it)
      out.push_back(it->second);
    return out;
  }

  const std::set<std::string>& local(const std::string& w) const {
    auto it = m.delta.find(w);
    if (it == m.delta.end()) throw EvalError("world '" + w + "' has no local domain");
    return it->second;
  }

  bool eval(const std::string& w, const Formula& f) {
    return std::visit(
        overloaded{
            [&](const TopNode&) { return true; },
            [&](const BotNode&) { return false; },
            [&](const AtomNode& n) { return atom_true(w, n.pred.name, n.args); },
            [&](const NegAtomNode& n) { return !atom_true(w, n.pred.name, n.args); },
            [&](const NotNode& n) { return !eval(w, *n.body); },
            [&](const AndNode& n) { return eval(w, *n.lhs) && eval(w, *n.rhs); },
            [&](const OrNode& n) { return eval(w, *n.lhs) || eval(w, *n.rhs); },
            [&](const BundleNode& n) { return eval_bundle(w, n); },
        },
        f.node());
  }

  bool eval_bundle(const std::string& w, const BundleNode& n) {
    auto succ = successors(w);
    const Formula& body = *n.body;
    const Variable& x = n.binders[0];
    switch (n.kind) {
      case BundleKind::ExistsBox:
        for (const auto& d : local(w))
          if (with_binding(x, d, [&] {
                return std::all_of(succ.begin(), succ.end(),
                                   [&](const std::string& v) { return eval(v, body); });
              }))
            return true;
        return false;
      case BundleKind::ExistsDia:
        for (const auto& d : local(w))
          if (with_binding(x, d, [&] {
                return std::any_of(succ.begin(), succ.end(),
                                   [&](const std::string& v) { return eval(v, body); });
              }))
            return true;
        return false;
      case BundleKind::ForallBox:
        for (const auto& d : local(w))
          if (!with_binding(x, d, [&] {
                return std::all_of(succ.begin(), succ.end(),
                                   [&](const std::string& v) { return eval(v, body); });
              }))
            return false;
        return true;
      case BundleKind::ForallDia:
        for (const auto& d : local(w))
          if (!with_binding(x, d, [&] {
                return std::any_of(succ.begin(), succ.end(),
                                   [&](const std::string& v) { return eval(v, body); });
              }))
            return false;
        return true;
      case BundleKind::BoxExists:
        return std::all_of(succ.begin(), succ.end(),
                           [&](const std::string& v) { return some_element(v, n); });
      case BundleKind::BoxForall:
        return std::all_of(succ.begin(), succ.end(),
                           [&](const std::string& v) { return every_element(v, n); });
      case BundleKind::DiaExists:
        return std::any_of(succ.begin(), succ.end(),
                           [&](const std::string& v) { return some_element(v, n); });
      case BundleKind::DiaForall:
        return std::any_of(succ.begin(), succ.end(),
                           [&](const std::string& v) { return every_element(v, n); });
    }
    throw InternalError("unknown bundle kind");
  }

  // exists d (exists d') in delta(v) making the body true at v
  bool some_element(const std::string& v, const BundleNode& n) {
    const auto& dom = local(v);
    for (const auto& d : dom) {
      bool r = with_binding(n.binders[0], d, [&] {
        if (n.binders.size() == 1) return eval(v, *n.body);
        for (const auto& d2 : dom)
          if (with_binding(n.binders[1], d2, [&] { return eval(v, *n.body); })) return true;
        return false;
      });
      if (r) return true;
    }
    return false;
  }

  // all d (and d') in delta(v) make the body true at v
  bool every_element(const std::string& v, const BundleNode& n) {
    const auto& dom = local(v);
    for (const auto& d : dom) {
      bool r = with_binding(n.binders[0], d, [&] {
        if (n.binders.size() == 1) return eval(v, *n.body);
        for (const auto& d2 : dom)
          if (!with_binding(n.binders[1], d2, [&] { return eval(v, *n.body); })) return false;
        return true;
      });
      if (!r) return false;
    }
    return true;
  }
};

}  // namespace

std::string to_string(DomainPolicy p) {
  return p == DomainPolicy::Increasing ? "increasing" : "constant";
}

DomainPolicy policy_from_string(const std::string& s) {
  if (s == "increasing") return DomainPolicy::Increasing;
  if (s == "constant") return DomainPolicy::Constant;
  throw ModelError("unknown domain policy '" + s + "'");
}

std::optional<std::string> validate(const KripkeModel& m, DomainPolicy policy) {
  if (m.worlds.empty()) return "model has no worlds";
  if (m.domain.empty()) return "model has an empty domain";
  for (const auto& e : m.relation) {
    if (!m.worlds.count(e.first) || !m.worlds.count(e.second))
      return "relation edge " + edge_str(e) + " references an unknown world";
  }
  for (const auto& w : m.worlds)
    if (!m.delta.count(w)) return "delta is missing world " + w;
  for (const auto& [w, dom] : m.delta) {
    if (!m.worlds.count(w)) return "delta names an unknown world " + w;
    if (dom.empty()) return "delta(" + w + ") is empty";
    for (const auto& d : dom)
      if (!m.domain.count(d)) return "delta(" + w + ") contains unknown element " + d;
  }
  if (policy == DomainPolicy::Increasing) {
    for (const auto& e : m.relation) {
      const auto& a = m.delta.at(e.first);
      const auto& b = m.delta.at(e.second);
      if (!std::includes(b.begin(), b.end(), a.begin(), a.end()))
        return "increasing-domain violation at edge " + edge_str(e);
    }
  } else {
    for (const auto& w : m.worlds)
      if (m.delta.at(w) != m.domain)
        return "constant-domain violation at world " + w;
  }
  std::map<std::string, std::size_t> arity;
  for (const auto& [w, preds] : m.valuation) {
    if (!m.worlds.count(w)) return "valuation names an unknown world " + w;
    for (const auto& [p, tuples] : preds) {
      for (const auto& t : tuples) {
        auto [it, fresh] = arity.emplace(p, t.size());
        if (!fresh && it->second != t.size())
          return "predicate " + p + " has tuples of unequal lengths";
        for (const auto& d : t)
          if (!m.domain.count(d))
            return "valuation of " + p + " at " + w + " contains unknown element " + d;
      }
    }
  }
  return std::nullopt;
}

bool evaluate(const KripkeModel& m, const std::string& w, const Valuation& sigma,
              const Formula& f) {
  if (!m.worlds.count(w)) throw EvalError("unknown world '" + w + "'");
  auto dit = m.delta.find(w);
  if (dit == m.delta.end()) throw EvalError("world '" + w + "' has no local domain");
  for (const auto& x : free_vars(f)) {
    auto it = sigma.find(x);
    if (it == sigma.end())
      throw EvalError("valuation does not bind free variable '" + x.name + "'");
    if (!dit->second.count(it->second))
      throw EvalError("valuation maps '" + x.name + "' to '" + it->second +
                      "' outside delta(" + w + ")");
  }
  Evaluator ev{m, sigma};
  return ev.eval(w, f);
}

nlohmann::json model_to_json(const KripkeModel& m, DomainPolicy policy) {
  nlohmann::json j;
  j["worlds"] = m.worlds;
  nlohmann::json rel = nlohmann::json::array();
  for (const auto& e : m.relation) rel.push_back({e.first, e.second});
  j["relation"] = std::move(rel);
  j["domain"] = m.domain;
  nlohmann::json delta = nlohmann::json::object();
  for (const auto& [w, dom] : m.delta) delta[w] = dom;
  j["delta"] = std::move(delta);
  nlohmann::json val = nlohmann::json::object();
  for (const auto& [w, preds] : m.valuation) {
    nlohmann::json pv = nlohmann::json::object();
    for (const auto& [p, tuples] : preds) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& t : tuples) arr.push_back(t);
      pv[p] = std::move(arr);
    }
    val[w] = std::move(pv);
  }
  j["valuation"] = std::move(val);
  j["policy"] = to_string(policy);
  return j;
}

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) throw ModelError("model JSON must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ModelError(std::string("model JSON lacks key \"") + key + "\"");
  return *it;
}

std::string as_string(const nlohmann::json& j, const char* what) {
  if (!j.is_string()) throw ModelError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

}  // namespace

std::pair<KripkeModel, DomainPolicy> model_from_json(const nlohmann::json& j) {
  KripkeModel m;
  for (const auto& w : field(j, "worlds"))
    m.worlds.insert(as_string(w, "world name"));
  for (const auto& e : field(j, "relation")) {
    if (!e.is_array() || e.size() != 2)
      throw ModelError("relation entries must be two-element arrays");
    m.relation.emplace(as_string(e[0], "world name"), as_string(e[1], "world name"));
  }
  for (const auto& d : field(j, "domain"))
    m.domain.insert(as_string(d, "domain element"));
  const auto& delta = field(j, "delta");
  if (!delta.is_object()) throw ModelError("\"delta\" must be an object");
  for (const auto& [w, dom] : delta.items()) {
    auto& slot = m.delta[w];
    for (const auto& d : dom) slot.insert(as_string(d, "domain element"));
  }
  const auto& val = field(j, "valuation");
  if (!val.is_object()) throw ModelError("\"valuation\" must be an object");
  for (const auto& [w, preds] : val.items()) {
    if (!preds.is_object()) throw ModelError("valuation entries must be objects");
    auto& wslot = m.valuation[w];
    for (const auto& [p, tuples] : preds.items()) {
      auto& pslot = wslot[p];
      for (const auto& t : tuples) {
        if (!t.is_array()) throw ModelError("valuation tuples must be arrays");
        Tuple tup;
        for (const auto& d : t) tup.push_back(as_string(d, "domain element"));
        pslot.insert(std::move(tup));
      }
    }
  }
  DomainPolicy policy = policy_from_string(as_string(field(j, "policy"), "\"policy\""));
  return {std::move(m), policy};
}

}  // namespace bfoml
