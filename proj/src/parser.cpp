#include "bfoml/parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "bfoml/errors.hpp"

namespace bfoml {

namespace {

enum class Tok {
  LParen,
  RParen,
  Comma,
  Amp,
  Pipe,
  Bang,
  Tilde,
  Arrow,
  Var,
  Pred,
  KwTop,
  KwBot,
  KwExists,
  KwForall,
  KwBox,
  KwDia,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t pos = i;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", pos}); ++i; continue;
      case ')': out.push_back({Tok::RParen, ")", pos}); ++i; continue;
      case ',': out.push_back({Tok::Comma, ",", pos}); ++i; continue;
      case '&': out.push_back({Tok::Amp, "&", pos}); ++i; continue;
      case '|': out.push_back({Tok::Pipe, "|", pos}); ++i; continue;
      case '!': out.push_back({Tok::Bang, "!", pos}); ++i; continue;
      case '~': out.push_back({Tok::Tilde, "~", pos}); ++i; continue;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", pos});
          i += 2;
          continue;
        }
        throw ParseError("parse error at " + std::to_string(pos) + ": stray '-'", pos);
      default: break;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      i = j;
      if (word == "top") out.push_back({Tok::KwTop, word, pos});
      else if (word == "bot") out.push_back({Tok::KwBot, word, pos});
      else if (word == "exists") out.push_back({Tok::KwExists, word, pos});
      else if (word == "forall") out.push_back({Tok::KwForall, word, pos});
      else if (word == "box") out.push_back({Tok::KwBox, word, pos});
      else if (word == "dia") out.push_back({Tok::KwDia, word, pos});
      else if (is_predicate_name(word)) out.push_back({Tok::Pred, word, pos});
      else out.push_back({Tok::Var, word, pos});
      continue;
    }
    throw ParseError("parse error at " + std::to_string(pos) + ": unexpected character '" +
                         std::string(1, c) + "'",
                     pos);
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  FormulaPtr run() {
    FormulaPtr f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  std::map<std::string, std::size_t> arities_;

  const Token& peek() const { return toks_[at_]; }
  Token take() { return toks_[at_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& wanted) {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("parse error at " + std::to_string(t.pos) + ": expected " + wanted +
                         ", found " + got,
                     t.pos);
  }

  Token expect(Tok kind, const std::string& wanted) {
    if (peek().kind != kind) fail(peek(), wanted);
    return take();
  }

  bool starts_bundle() const {
    Tok k = peek().kind;
    return k == Tok::KwExists || k == Tok::KwForall || k == Tok::KwBox || k == Tok::KwDia;
  }

  // formula := or_expr ('->' formula)?        right-associative, desugared
  FormulaPtr formula() {
    FormulaPtr lhs = or_expr();
    if (peek().kind == Tok::Arrow) {
      take();
      return lor(lnot(std::move(lhs)), formula());
    }
    return lhs;
  }

  FormulaPtr or_expr() {
    FormulaPtr lhs = and_expr();
    while (peek().kind == Tok::Pipe) {
      take();
      lhs = lor(std::move(lhs), and_expr());
    }
    return lhs;
  }

  FormulaPtr and_expr() {
    FormulaPtr lhs = unary();
    while (peek().kind == Tok::Amp) {
      take();
      lhs = land(std::move(lhs), unary());
    }
    return lhs;
  }

  FormulaPtr unary() {
    if (starts_bundle()) return bundle_expr();
    if (peek().kind == Tok::Bang) {
      take();
      return lnot(unary());
    }
    if (peek().kind == Tok::Tilde) {
      take();
      if (peek().kind != Tok::Pred) fail(peek(), "a predicate after '~'");
      auto [name, args] = atom_tail();
      return neg_atom(name, std::move(args));
    }
    return primary();
  }

  FormulaPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwTop: take(); return top();
      case Tok::KwBot: take(); return bot();
      case Tok::LParen: {
        take();
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Pred: {
        auto [name, args] = atom_tail();
        return atom(name, std::move(args));
      }
      default: fail(t, "a formula");
    }
  }

  Variable binder() {
    Token t = expect(Tok::Var, "a binder variable");
    return Variable(t.text);
  }

  // The body is a full formula, so bundles reach maximally to the right.
  FormulaPtr bundle_expr() {
    Token head = take();
    if (head.kind == Tok::KwExists || head.kind == Tok::KwForall) {
      Variable v = binder();
      if (peek().kind == Tok::Var)
        throw ParseError("parse error at " + std::to_string(peek().pos) +
                             ": two binders are only allowed on modality-first bundles",
                         peek().pos);
      Tok mod = peek().kind;
      if (mod != Tok::KwBox && mod != Tok::KwDia) fail(peek(), "'box' or 'dia'");
      take();
      BundleKind kind =
          head.kind == Tok::KwExists
              ? (mod == Tok::KwBox ? BundleKind::ExistsBox : BundleKind::ExistsDia)
              : (mod == Tok::KwBox ? BundleKind::ForallBox : BundleKind::ForallDia);
      return bundle(kind, {v}, formula());
    }
    // box/dia first
    Tok quant = peek().kind;
    if (quant != Tok::KwExists && quant != Tok::KwForall) fail(peek(), "'exists' or 'forall'");
    take();
    std::vector<Variable> binders{binder()};
    if (peek().kind == Tok::Var) binders.push_back(binder());
    if (peek().kind == Tok::Var)
      throw ParseError("parse error at " + std::to_string(peek().pos) +
                           ": a bundle binds at most two variables",
                       peek().pos);
    if (binders.size() == 2 && binders[0] == binders[1])
      throw ParseError("parse error at " + std::to_string(head.pos) + ": duplicate binder '" +
                           binders[0].name + "'",
                       head.pos);
    BundleKind kind =
        head.kind == Tok::KwBox
            ? (quant == Tok::KwExists ? BundleKind::BoxExists : BundleKind::BoxForall)
            : (quant == Tok::KwExists ? BundleKind::DiaExists : BundleKind::DiaForall);
    return bundle(kind, std::move(binders), formula());
  }

  std::pair<std::string, std::vector<Variable>> atom_tail() {
    Token name = expect(Tok::Pred, "a predicate");
    std::vector<Variable> args;
    if (peek().kind == Tok::LParen) {
      take();
      if (peek().kind != Tok::RParen) {
        args.push_back(Variable(expect(Tok::Var, "a variable").text));
        while (peek().kind == Tok::Comma) {
          take();
          args.push_back(Variable(expect(Tok::Var, "a variable").text));
        }
      }
      expect(Tok::RParen, "')'");
    }
    auto [it, fresh] = arities_.emplace(name.text, args.size());
    if (!fresh && it->second != args.size())
      throw ParseError("parse error at " + std::to_string(name.pos) + ": predicate '" +
                           name.text + "' used with arity " + std::to_string(args.size()) +
                           " but earlier with arity " + std::to_string(it->second),
                       name.pos);
    return {name.text, std::move(args)};
  }
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void render_args(const std::vector<Variable>& args, std::string& out) {
  if (args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    out += args[i].name;
  }
  out += ')';
}

void render_to(const Formula& f, std::string& out);

// A bundle rendered bare would swallow a following connective, so wrap it in
// parentheses when more tokens follow on the right.
void render_closed(const Formula& f, std::string& out) {
  if (f.is_bundle()) {
    out += '(';
    render_to(f, out);
    out += ')';
  } else {
    render_to(f, out);
  }
}

void render_to(const Formula& f, std::string& out) {
  std::visit(overloaded{
                 [&](const TopNode&) { out += "top"; },
                 [&](const BotNode&) { out += "bot"; },
                 [&](const AtomNode& n) {
                   out += n.pred.name;
                   render_args(n.args, out);
                 },
                 [&](const NegAtomNode& n) {
                   out += '~';
                   out += n.pred.name;
                   render_args(n.args, out);
                 },
                 [&](const NotNode& n) {
                   out += '!';
                   if (n.body->is_literal()) {
                     render_to(*n.body, out);
                   } else {
                     out += '(';
                     render_to(*n.body, out);
                     out += ')';
                   }
                 },
                 [&](const AndNode& n) {
                   out += '(';
                   render_closed(*n.lhs, out);
                   out += " & ";
                   render_to(*n.rhs, out);
                   out += ')';
                 },
                 [&](const OrNode& n) {
                   out += '(';
                   render_closed(*n.lhs, out);
                   out += " | ";
                   render_to(*n.rhs, out);
                   out += ')';
                 },
                 [&](const BundleNode& n) {
                   auto word = [&](std::string_view w) {
                     out += w;
                     out += ' ';
                   };
                   auto vars = [&] {
                     for (const auto& v : n.binders) {
                       out += v.name;
                       out += ' ';
                     }
                   };
                   switch (n.kind) {
                     case BundleKind::ExistsBox: word("exists"); vars(); word("box"); break;
                     case BundleKind::ExistsDia: word("exists"); vars(); word("dia"); break;
                     case BundleKind::ForallBox: word("forall"); vars(); word("box"); break;
                     case BundleKind::ForallDia: word("forall"); vars(); word("dia"); break;
                     case BundleKind::BoxExists: word("box"); word("exists"); vars(); break;
                     case BundleKind::BoxForall: word("box"); word("forall"); vars(); break;
                     case BundleKind::DiaExists: word("dia"); word("exists"); vars(); break;
                     case BundleKind::DiaForall: word("dia"); word("forall"); vars(); break;
                   }
                   render_to(*n.body, out);
                 },
             },
             f.node());
}

}  // namespace

FormulaPtr parse(std::string_view text) { return Parser(text).run(); }

std::string render(const Formula& f) {
  std::string out;
  render_to(f, out);
  return out;
}

}  // namespace bfoml
