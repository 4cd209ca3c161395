#pragma once

#include <string>
#include <string_view>

#include "bfoml/formula.hpp"

namespace bfoml {

/// Parse the concrete syntax:
///
///   atoms        P, P(x,y)        negated atoms  ~P(x)
///   constants    top, bot
///   connectives  &  |  !          a -> b is sugar for !a | b
///   bundles      exists x box f, forall x dia f, box exists x f,
///                dia forall x f, box exists x y f, ...
///
/// `&` binds tighter than `|`, `->` is weakest and right-associative, and a
/// bundle extends as far right as possible. Binder lists of length two are
/// accepted only on modality-first bundles. Throws ParseError (with a byte
/// offset) on lexical or syntax errors and on predicate arity mismatches.
FormulaPtr parse(std::string_view text);

/// Deterministic text form; parse(render(f)) is structurally equal to f.
/// Binary connectives are fully parenthesized, implication is never printed.
std::string render(const Formula& f);
inline std::string render(const FormulaPtr& f) { return render(*f); }

}  // namespace bfoml
