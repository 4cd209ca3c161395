#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bfoml/formula.hpp"

namespace bfoml {

enum class DomainPolicy { Increasing, Constant };

std::string to_string(DomainPolicy p);
DomainPolicy policy_from_string(const std::string& s);  // throws ModelError

using Tuple = std::vector<std::string>;

// Relational structure over named worlds and named domain elements. delta
// gives each world its local domain; valuation gives each world the extension
// of each predicate. Ordered containers keep every serialization sorted.
struct KripkeModel {
  std::set<std::string> worlds;
  std::set<std::pair<std::string, std::string>> relation;
  std::set<std::string> domain;
  std::map<std::string, std::set<std::string>> delta;
  std::map<std::string, std::map<std::string, std::set<Tuple>>> valuation;
};

using Valuation = std::map<Variable, std::string>;

// nullopt when the model is well formed under the policy; otherwise a message
// naming the first violated constraint (checks run in a fixed order: worlds,
// domain, relation endpoints, delta shape, policy, valuation shape).
// Increasing requires delta(w) ⊆ delta(v) along every edge; Constant requires
// delta(w) = domain everywhere. Local domains must be non-empty.
std::optional<std::string> validate(const KripkeModel& m, DomainPolicy policy);

// Truth of f at world w under valuation sigma. sigma must bind every free
// variable of f to an element of delta(w), else EvalError. Quantifier-first
// bundles range their binder over delta(w) before the modal step;
// modality-first bundles step to a successor v first and range over delta(v),
// two binders ranging independently over the same delta(v). Predicates or
// worlds absent from the valuation map have empty extensions.
bool evaluate(const KripkeModel& m, const std::string& w, const Valuation& sigma,
              const Formula& f);

nlohmann::json model_to_json(const KripkeModel& m, DomainPolicy policy);

// Parses the JSON form; throws ModelError on shape errors. Does not run
// validate; callers decide how strict to be.
std::pair<KripkeModel, DomainPolicy> model_from_json(const nlohmann::json& j);

}  // namespace bfoml
