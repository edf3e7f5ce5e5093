#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mrgen/mr.hpp"

namespace mrgen {

// Token table with reserved ids 0..2. Lookup of unknown tokens yields UNK.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);  // from checkpoint

  int add(const std::string& token);           // idempotent
  int id(const std::string& token) const;      // UNK when absent
  const std::string& token(int id) const;      // "<unk>" for out of range
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// "da_type slot1 value-tokens... slot2 value-tokens..." — the linearized MR
// fed to the encoder. Values run through the tokenizer; placeholder values
// stay single tokens.
std::vector<std::string> linearize_mr(const MeaningRepresentation& mr);

std::vector<int> to_ids(const std::vector<std::string>& tokens, const Vocabulary& vocab);

}  // namespace mrgen
