#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mrgen/aligner.hpp"
#include "mrgen/mr.hpp"

namespace mrgen {

struct SplitConfig {
  std::vector<std::string> pronouns = default_pronouns();
  std::string position_slot_name = "position";
  bool keep_unalignable = true;
};

struct PermutationConfig {
  int k = 5;
  unsigned long long seed = 0;
};

// One sub-sample per sentence: its MR holds the slots aligned to that
// sentence, plus the name slot when the sentence corefers with the name, plus
// a position slot ("outer" for the first sentence, "inner" otherwise).
// Sentences realizing no slots at all yield no sub-sample.
std::vector<Sample> split_sample(const Sample& sample, const Gazetteer& gaz,
                                 const SplitConfig& cfg);

// Removes the report's unaligned slots from the MR; the reference stays.
// Returns nullopt when every slot is unaligned (empty MRs are never emitted).
std::optional<Sample> handle_unaligned(const Sample& sample, const AlignmentReport& report);

// Up to k distinct random orderings plus the original, all sharing one
// reference. Duplicate orderings collapse.
std::vector<Sample> permute_slots(const Sample& sample, const PermutationConfig& cfg,
                                  std::mt19937_64& rng);

// Original samples (unaligned slots removed) plus split sub-samples;
// sub-samples identical to their parent collapse into it. Permutation is
// applied when perm.k > 0. Deterministic given the seed.
Dataset expand_dataset(const Dataset& dataset, const Gazetteer& gaz, const SplitConfig& split_cfg,
                       const PermutationConfig& perm_cfg, bool do_split = true);

}  // namespace mrgen
