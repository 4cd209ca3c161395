#include "bfoml/fo.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bfoml/errors.hpp"
#include "bfoml/transform.hpp"

namespace bfoml {

namespace {

[[noreturn]] void fail(std::size_t pos, const std::string& msg) {
  throw ParseError("parse error at " + std::to_string(pos) + ": " + msg, pos);
}

struct FoTok {
  enum Kind { VarName, PredName, LParen, RParen, Comma, Dot, Amp, Pipe, Tilde, Bang, End };
  Kind kind;
  std::string text;
  std::size_t pos;
};

std::vector<FoTok> lex(std::string_view text) {
  std::vector<FoTok> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
              text[j] == '\''))
        ++j;
      bool lower = std::islower(static_cast<unsigned char>(ch)) != 0;
      out.push_back({lower ? FoTok::VarName : FoTok::PredName,
                     std::string(text.substr(i, j - i)), start});
      i = j;
      continue;
    }
    FoTok::Kind k;
    switch (ch) {
      case '(': k = FoTok::LParen; break;
      case ')': k = FoTok::RParen; break;
      case ',': k = FoTok::Comma; break;
      case '.': k = FoTok::Dot; break;
      case '&': k = FoTok::Amp; break;
      case '|': k = FoTok::Pipe; break;
      case '~': k = FoTok::Tilde; break;
      case '!': k = FoTok::Bang; break;
      default: fail(start, std::string("unexpected character '") + ch + "'");
    }
    out.push_back({k, std::string(1, ch), start});
    ++i;
  }
  out.push_back({FoTok::End, "", text.size()});
  return out;
}

struct FoParser {
  std::vector<FoTok> toks;
  std::size_t at = 0;
  std::set<Variable> bound;

  const FoTok& peek() const { return toks[at]; }
  FoTok take() { return toks[at++]; }
  void expect(FoTok::Kind k, const char* what) {
    if (peek().kind != k) fail(peek().pos, std::string("expected ") + what);
    take();
  }
  bool at_quantifier() const {
    return peek().kind == FoTok::PredName && (peek().text == "A" || peek().text == "E");
  }

  FOSentence run() {
    FOSentence s;
    while (at_quantifier()) {
      FoTok q = take();
      if (peek().kind != FoTok::VarName)
        fail(peek().pos, "expected a variable after quantifier");
      FoTok v = take();
      Variable var(v.text);
      if (!bound.insert(var).second)
        fail(v.pos, "duplicate quantified variable '" + v.text + "'");
      expect(FoTok::Dot, "'.' after quantified variable");
      s.prefix.emplace_back(q.text == "A" ? FoQuant::Forall : FoQuant::Exists, var);
    }
    s.matrix = or_expr();
    if (peek().kind != FoTok::End) fail(peek().pos, "unexpected trailing input");
    return s;
  }

  FormulaPtr or_expr() {
    FormulaPtr f = and_expr();
    while (peek().kind == FoTok::Pipe) {
      take();
      f = lor(std::move(f), and_expr());
    }
    return f;
  }

  FormulaPtr and_expr() {
    FormulaPtr f = unary();
    while (peek().kind == FoTok::Amp) {
      take();
      f = land(std::move(f), unary());
    }
    return f;
  }

  FormulaPtr unary() {
    if (peek().kind == FoTok::Tilde) {
      take();
      return lnot(atom_expr());
    }
    if (peek().kind == FoTok::Bang) {
      take();
      return lnot(unary());
    }
    if (peek().kind == FoTok::LParen) {
      take();
      FormulaPtr f = or_expr();
      expect(FoTok::RParen, "')'");
      return f;
    }
    return atom_expr();
  }

  FormulaPtr atom_expr() {
    if (at_quantifier())
      fail(peek().pos, "quantifier inside the matrix: input must be prenex");
    if (peek().kind != FoTok::PredName) fail(peek().pos, "expected an atom");
    FoTok p = take();
    if (p.text != "R")
      fail(p.pos, "only the binary relation R may appear in the matrix");
    expect(FoTok::LParen, "'(' after R");
    Variable a = matrix_var();
    expect(FoTok::Comma, "','");
    Variable b = matrix_var();
    expect(FoTok::RParen, "')'");
    return atom("R", {a, b});
  }

  Variable matrix_var() {
    if (peek().kind != FoTok::VarName) fail(peek().pos, "expected a variable");
    FoTok v = take();
    Variable var(v.text);
    if (!bound.count(var)) fail(v.pos, "unbound variable '" + v.text + "' in matrix");
    return var;
  }
};

std::string render_matrix(const Formula& f) {
  if (f.get_if<TopNode>()) return "top";
  if (f.get_if<BotNode>()) return "bot";
  if (const auto* a = f.get_if<AtomNode>()) {
    std::string out = a->pred.name + "(";
    for (std::size_t i = 0; i < a->args.size(); ++i) {
      if (i) out += ",";
      out += a->args[i].name;
    }
    return out + ")";
  }
  if (const auto* a = f.get_if<NegAtomNode>())
    return "~" + render_matrix(*atom(a->pred.name, a->args));
  if (const auto* n = f.get_if<NotNode>()) {
    if (n->body->get_if<AtomNode>()) return "~" + render_matrix(*n->body);
    return "!" + render_matrix(*n->body);
  }
  if (const auto* n = f.get_if<AndNode>())
    return "(" + render_matrix(*n->lhs) + " & " + render_matrix(*n->rhs) + ")";
  if (const auto* n = f.get_if<OrNode>())
    return "(" + render_matrix(*n->lhs) + " | " + render_matrix(*n->rhs) + ")";
  throw std::invalid_argument("matrix is not quantifier-free");
}

bool eval_matrix(const FOStructure& s, const Formula& f,
                 const std::map<Variable, std::string>& env) {
  auto lookup = [&](const Variable& v) -> const std::string& {
    auto it = env.find(v);
    if (it == env.end()) throw EvalError("unbound variable in matrix: " + v.name);
    return it->second;
  };
  if (f.get_if<TopNode>()) return true;
  if (f.get_if<BotNode>()) return false;
  if (const auto* a = f.get_if<AtomNode>()) {
    if (a->args.size() != 2) throw EvalError("matrix atoms must be binary");
    return s.rel.count({lookup(a->args[0]), lookup(a->args[1])}) != 0;
  }
  if (const auto* a = f.get_if<NegAtomNode>()) {
    if (a->args.size() != 2) throw EvalError("matrix atoms must be binary");
    return s.rel.count({lookup(a->args[0]), lookup(a->args[1])}) == 0;
  }
  if (const auto* n = f.get_if<NotNode>()) return !eval_matrix(s, *n->body, env);
  if (const auto* n = f.get_if<AndNode>())
    return eval_matrix(s, *n->lhs, env) && eval_matrix(s, *n->rhs, env);
  if (const auto* n = f.get_if<OrNode>())
    return eval_matrix(s, *n->lhs, env) || eval_matrix(s, *n->rhs, env);
  throw EvalError("matrix is not quantifier-free");
}

bool eval_prefix(const FOStructure& s, const FOSentence& alpha, std::size_t idx,
                 std::map<Variable, std::string>& env) {
  if (idx == alpha.prefix.size()) return eval_matrix(s, *alpha.matrix, env);
  const auto& [q, v] = alpha.prefix[idx];
  for (const auto& e : s.universe) {
    env[v] = e;
    bool r = eval_prefix(s, alpha, idx + 1, env);
    if (q == FoQuant::Exists && r) return true;
    if (q == FoQuant::Forall && !r) return false;
  }
  env.erase(v);
  return q == FoQuant::Forall;
}

// Fresh binder names z, z_1, z_2, ... skipping anything in `avoid`.
struct FreshZ {
  std::set<std::string> avoid;
  std::size_t next = 0;

  Variable one() {
    while (true) {
      std::string cand = next == 0 ? std::string("z") : "z_" + std::to_string(next);
      ++next;
      if (avoid.insert(cand).second) return Variable(cand);
    }
  }

  std::pair<Variable, Variable> two() {
    while (true) {
      std::string cand = next == 0 ? std::string("z") : "z_" + std::to_string(next);
      ++next;
      std::string primed = cand + "'";
      if (!avoid.count(cand) && !avoid.count(primed)) {
        avoid.insert(cand);
        avoid.insert(primed);
        return {Variable(cand), Variable(primed)};
      }
    }
  }
};

Variable primed_fresh(const std::string& base, std::set<std::string>& avoid) {
  std::string cand = base + "'";
  for (std::size_t k = 1; avoid.count(cand); ++k) cand = base + "'_" + std::to_string(k);
  avoid.insert(cand);
  return Variable(cand);
}

std::set<Variable> prefix_vars(const FOSentence& alpha) {
  std::set<Variable> out;
  for (const auto& [q, v] : alpha.prefix) out.insert(v);
  return out;
}

}  // namespace

FOSentence parse_fo(std::string_view text) {
  FoParser p{lex(text)};
  return p.run();
}

std::string render_fo(const FOSentence& s) {
  std::string out;
  for (const auto& [q, v] : s.prefix) {
    out += q == FoQuant::Forall ? "A " : "E ";
    out += v.name + ". ";
  }
  return out + render_matrix(*s.matrix);
}

bool fo_eval(const FOStructure& s, const FOSentence& alpha) {
  std::map<Variable, std::string> env;
  return eval_prefix(s, alpha, 0, env);
}

FOStructure fo_structure_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ModelError("structure must be a JSON object");
  if (!j.contains("universe") || !j["universe"].is_array())
    throw ModelError("missing array field 'universe'");
  if (!j.contains("rel") || !j["rel"].is_array())
    throw ModelError("missing array field 'rel'");
  FOStructure s;
  for (const auto& e : j["universe"]) {
    if (!e.is_string()) throw ModelError("universe elements must be strings");
    s.universe.insert(e.get<std::string>());
  }
  if (s.universe.empty()) throw ModelError("universe must be non-empty");
  for (const auto& e : j["rel"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ModelError("rel entries must be pairs of strings");
    std::string a = e[0].get<std::string>();
    std::string b = e[1].get<std::string>();
    if (!s.universe.count(a) || !s.universe.count(b))
      throw ModelError("rel mentions an element outside the universe");
    s.rel.emplace(std::move(a), std::move(b));
  }
  return s;
}

FormulaPtr tr_matrix(const FormulaPtr& beta, ReductionTarget target) {
  std::set<std::string> pred_names;
  for (const auto& p : predicates(*beta)) pred_names.insert(p.name);
  const std::string pn = pred_names.count("P") ? "__P" : "P";
  const std::string qn = pred_names.count("Q") ? "__Q" : "Q";

  FreshZ fz;
  for (const auto& v : all_vars(*beta)) fz.avoid.insert(v.name);

  std::function<FormulaPtr(const Formula&)> walk = [&](const Formula& f) -> FormulaPtr {
    if (f.get_if<TopNode>()) return top();
    if (f.get_if<BotNode>()) return bot();
    if (const auto* a = f.get_if<AtomNode>()) {
      if (a->args.size() != 2)
        throw std::invalid_argument("tr_matrix: matrix atoms must be binary");
      FormulaPtr pq = land(atom(pn, {a->args[0]}), atom(qn, {a->args[1]}));
      if (target == ReductionTarget::ForallBox)
        return bundle(BundleKind::ExistsDia, {fz.one()}, std::move(pq));
      auto [z, zp] = fz.two();
      return bundle(BundleKind::DiaForall, {z, zp}, std::move(pq));
    }
    if (const auto* a = f.get_if<NegAtomNode>())
      return lnot(walk(*atom(a->pred.name, a->args)));
    if (const auto* n = f.get_if<NotNode>()) return lnot(walk(*n->body));
    if (const auto* n = f.get_if<AndNode>()) return land(walk(*n->lhs), walk(*n->rhs));
    if (const auto* n = f.get_if<OrNode>()) return lor(walk(*n->lhs), walk(*n->rhs));
    throw std::invalid_argument("tr_matrix: input is not quantifier-free");
  };
  return to_pnf(walk(*beta));
}

FormulaPtr build_psi(const FOSentence& alpha, ReductionTarget target) {
  FormulaPtr out = tr_matrix(alpha.matrix, target);
  if (target == ReductionTarget::ForallBox) {
    for (auto it = alpha.prefix.rbegin(); it != alpha.prefix.rend(); ++it)
      out = bundle(it->first == FoQuant::Exists ? BundleKind::ExistsDia : BundleKind::ForallBox,
                   {it->second}, std::move(out));
    return out;
  }
  std::set<std::string> avoid;
  for (const auto& v : all_vars(*out)) avoid.insert(v.name);
  for (const auto& [q, v] : alpha.prefix) avoid.insert(v.name);
  for (auto it = alpha.prefix.rbegin(); it != alpha.prefix.rend(); ++it) {
    Variable dummy = primed_fresh(it->second.name, avoid);
    out = bundle(it->first == FoQuant::Exists ? BundleKind::DiaExists : BundleKind::BoxForall,
                 {it->second, dummy}, std::move(out));
  }
  return out;
}

FormulaPtr build_lambda(std::size_t n, ReductionTarget target) {
  std::size_t c = 0;
  auto next = [&] { return Variable("z" + std::to_string(c++)); };
  const bool starred = target == ReductionTarget::BoxExists2;

  FormulaPtr out;
  for (std::size_t j = 0; j <= n; ++j) {
    std::vector<std::vector<Variable>> heads;
    for (std::size_t i = 0; i < j; ++i) {
      Variable z = next();
      if (starred)
        heads.push_back({z, Variable(z.name + "'")});
      else
        heads.push_back({z});
    }
    FormulaPtr conj;
    {
      Variable z = next();
      if (starred)
        conj = bundle(BundleKind::DiaForall, {z, Variable(z.name + "'")}, top());
      else
        conj = bundle(BundleKind::ExistsDia, {z}, top());
    }
    for (auto it = heads.rbegin(); it != heads.rend(); ++it)
      conj = bundle(starred ? BundleKind::BoxExists : BundleKind::ForallBox, *it,
                    std::move(conj));
    out = out ? land(std::move(out), std::move(conj)) : std::move(conj);
  }
  return out;
}

FormulaPtr build_gamma(std::size_t n, ReductionTarget target) {
  Variable z1("z1"), z2("z2");
  std::size_t c = 3;
  auto next = [&] { return Variable("z" + std::to_string(c++)); };
  const bool starred = target == ReductionTarget::BoxExists2;

  FormulaPtr pq = land(atom("P", {z1}), atom("Q", {z2}));

  std::vector<Variable> av;
  for (std::size_t i = 0; i <= n; ++i) av.push_back(next());
  FormulaPtr ant = pq;
  for (auto it = av.rbegin(); it != av.rend(); ++it)
    ant = bundle(starred ? BundleKind::DiaForall : BundleKind::ExistsDia, {*it},
                 std::move(ant));

  std::vector<Variable> cv;
  for (std::size_t i = 0; i <= n; ++i) cv.push_back(next());
  FormulaPtr cons = bundle(starred ? BundleKind::DiaForall : BundleKind::ExistsDia,
                           {cv.back()}, pq);
  for (std::size_t i = n; i-- > 0;)
    cons = bundle(starred ? BundleKind::BoxExists : BundleKind::ForallBox, {cv[i]},
                  std::move(cons));

  FormulaPtr impl = lor(lnot(std::move(ant)), std::move(cons));
  FormulaPtr body;
  if (starred)
    body = bundle(BundleKind::BoxForall, {z1, z2}, std::move(impl));
  else
    body = bundle(BundleKind::ForallBox, {z1},
                  bundle(BundleKind::ForallBox, {z2}, std::move(impl)));
  return to_pnf(body);
}

FormulaPtr translate_forall_box(const FOSentence& alpha) {
  std::size_t n = alpha.prefix.size();
  FormulaPtr psi = build_psi(alpha, ReductionTarget::ForallBox);

  std::set<Variable> reserved = prefix_vars(alpha);
  FreshZ fz;
  for (const auto& v : reserved) fz.avoid.insert(v.name);
  Variable h1 = fz.one(), h2 = fz.one();
  FormulaPtr head = bundle(BundleKind::ForallBox, {h1},
                           bundle(BundleKind::ForallBox, {h2}, std::move(psi)));

  FormulaPtr raw = land(land(std::move(head), build_lambda(n + 2, ReductionTarget::ForallBox)),
                        build_gamma(n, ReductionTarget::ForallBox));
  return make_clean(raw, reserved);
}

FormulaPtr translate_box_exists2(const FOSentence& alpha) {
  std::size_t n = alpha.prefix.size();
  FormulaPtr psi = build_psi(alpha, ReductionTarget::BoxExists2);

  std::set<Variable> reserved = prefix_vars(alpha);
  FreshZ fz;
  for (const auto& v : reserved) fz.avoid.insert(v.name);
  auto [h1, h2] = fz.two();
  FormulaPtr head = bundle(BundleKind::BoxExists, {h1, h2}, std::move(psi));

  FormulaPtr raw =
      land(land(std::move(head), build_lambda(n + 1, ReductionTarget::BoxExists2)),
           build_gamma(n, ReductionTarget::BoxExists2));
  return make_clean(raw, reserved);
}

FormulaPtr translate(const FOSentence& alpha, ReductionTarget target) {
  return target == ReductionTarget::ForallBox ? translate_forall_box(alpha)
                                              : translate_box_exists2(alpha);
}

}  // namespace bfoml
