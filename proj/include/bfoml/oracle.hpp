#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bfoml/kripke.hpp"

namespace bfoml {

// Streams every model with |W| <= max_worlds, |D| <= max_domain under the
// policy, canonically named w0..w_{k-1} / d0..d_{m-1}, ordered by (|W|, |D|,
// relation bitmask, local-domain odometer, valuation bitmask). Relation bit
// i*k+j is the edge (wi, wj); local domains run through non-empty subsets
// with w0 the fastest digit; valuation bits are world-major, then predicate
// (sorted by name), then tuple index with the first argument most
// significant. Only true atoms are materialized. Return false from the
// visitor to stop early.
void enumerate_models(const std::vector<PredicateSymbol>& signature,
                      std::size_t max_worlds, std::size_t max_domain, DomainPolicy policy,
                      const std::function<bool(const KripkeModel&)>& visit);

struct OracleWitness {
  KripkeModel model;
  std::string world;
  Valuation sigma;
};

// Brute-force bounded satisfiability: returns the first (model, world,
// valuation) triple in enumeration order that makes f true, with worlds
// scanned in name order and valuations of the sorted free variables run as an
// odometer (last variable fastest) over delta(w), or nullopt when no model
// within the bounds works. A nullopt is not an unsatisfiability proof. The
// search skips isomorphic duplicates of refuted frames and decides each frame
// by branching only on the predicate bits the evaluation actually touches,
// but the reported witness is exactly the one naive enumeration would find,
// and it is re-checked through validate and evaluate before being returned.
std::optional<OracleWitness> bounded_sat(const FormulaPtr& f, std::size_t max_worlds,
                                         std::size_t max_domain, DomainPolicy policy);

// True iff evaluate(M,w,sigma,f) == evaluate(M,w,sigma,g) (or its complement)
// for EVERY valuation of the predicates of f and g over the frame of the
// given model (worlds, relation, local domains; any valuation entries in
// `frame` are ignored). sigma must bind the free variables of both formulas
// to elements of delta(world). Decided by the same branching search the
// oracle uses, so it is exact without enumerating all valuations.
bool agree_on_frame(const KripkeModel& frame, const std::string& world,
                    const Valuation& sigma, const FormulaPtr& f, const FormulaPtr& g,
                    bool complement = false);

}  // namespace bfoml
