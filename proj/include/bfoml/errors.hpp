#pragma once

#include <stdexcept>
#include <string>

namespace bfoml {

// Malformed concrete syntax. `position` is a 0-based byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Substitution would capture a free variable under a binder.
class CaptureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Formula lies outside the fragment an operation supports.
class FragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model checking against an ill-posed query (unknown world, unbound variable,
// variable mapped outside the local domain).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally malformed Kripke model input.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken internal invariant; always indicates a bug, never bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bfoml
