#pragma once

#include <map>
#include <string>
#include <vector>

#include "mrgen/mr.hpp"

namespace mrgen {

struct DatasetStats {
  std::size_t sample_count = 0;
  std::size_t unique_mr_count = 0;
  double avg_refs_per_unique_mr = 0.0;
  std::map<int, double> slot_count_histogram;        // slot count -> proportion
  std::map<int, double> avg_sentences_by_slot_count; // slot count -> mean sentences
  std::map<std::string, double> da_distribution;     // DA -> proportion
  std::size_t slot_type_count = 0;
  std::size_t da_type_count = 0;
};

// Slots imputed into valueless ?request MRs of the TV dataset, copied from
// the Laptop ?request schema (the TV files ship those MRs with no slots).
using RequestImputation = std::map<std::string, std::vector<std::string>>;
const RequestImputation& default_request_imputation();

// E2E dialect: CSV with header "mr,ref", quoted fields, UTF-8.
// RNNLG dialect: JSON array of entries, each an array whose first element is
// the DA string and second the reference; trailing elements are ignored.
// Sample ids are row indices ("0", "1", ...).
Dataset load_dataset(const std::string& path, Dialect dialect, Split split);
Dataset load_dataset(const std::string& path, Dialect dialect, Split split, Domain domain);
Dataset load_dataset(const std::string& path, Dialect dialect, Split split, Domain domain,
                     const RequestImputation& imputation);

DatasetStats compute_stats(const Dataset& dataset);

}  // namespace mrgen
