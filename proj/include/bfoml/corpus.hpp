#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bfoml/formula.hpp"

namespace bfoml {

// Shape constraints for seeded random formula generation.
struct CorpusProfile {
  std::vector<PredicateSymbol> preds;
  std::vector<std::string> free_pool;
  std::size_t max_modal_depth = 3;
  std::size_t max_connectives = 10;
  bool modality_first_only = false;
  bool allow_not = false;
  bool allow_two_binders = false;
  bool allow_unclean = false;

  // Clean PNF formulas inside the tableau fragment.
  static CorpusProfile tableau();
  // Pre-normal-form shapes: general negation, every bundle kind, reused
  // binder names. Exercises to_pnf and make_clean.
  static CorpusProfile preservation();
};

inline constexpr std::uint64_t kTableauCorpusSeed = 1729;
inline constexpr std::size_t kTableauCorpusCount = 500;
inline constexpr std::uint64_t kPreservationSeed = 271;
inline constexpr std::size_t kPreservationCount = 100;

// Deterministic for a fixed (profile, seed, count).
std::vector<FormulaPtr> generate_corpus(const CorpusProfile& profile, std::uint64_t seed,
                                        std::size_t count);

}  // namespace bfoml
