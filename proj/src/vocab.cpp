#include "mrgen/vocab.hpp"

#include "mrgen/error.hpp"
#include "mrgen/text.hpp"

namespace mrgen {

Vocabulary::Vocabulary() {
  tokens_ = {"<unk>", "<bos>", "<eos>"};
  for (int i = 0; i < 3; ++i) index_[tokens_[i]] = i;
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  if (tokens.size() < 3 || tokens[0] != "<unk>" || tokens[1] != "<bos>" || tokens[2] != "<eos>")
    throw ShapeMismatch("vocabulary array is missing the reserved tokens");
  tokens_ = tokens;
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = static_cast<int>(i);
}

int Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_[token] = id;
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) return tokens_[kUnk];
  return tokens_[id];
}

std::vector<std::string> linearize_mr(const MeaningRepresentation& mr) {
  std::vector<std::string> out;
  out.push_back(to_lower(mr.da_type));
  for (const auto& sv : mr.slots) {
    out.push_back(sv.slot);
    for (const auto& t : tokenize(sv.value).tokens) out.push_back(t);
  }
  return out;
}

std::vector<int> to_ids(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

}  // namespace mrgen
