#pragma once

#include <string>

#include "mrgen/nn/model.hpp"
#include "mrgen/vocab.hpp"

namespace mrgen::nn {

struct Checkpoint {
  ModelParams params;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
};

inline constexpr int kCheckpointFormatVersion = 1;

// Writes <dir>/manifest.json (format version, hyperparams, vocabulary
// arrays, tensor index with name/shape/byte offset) and <dir>/params.bin
// (concatenated little-endian float32 in index order, column-major).
void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);

// Round trip is bit-exact at storage precision. Throws VersionMismatch for
// unknown format versions, ShapeMismatch for inconsistent tensor shapes,
// IoError for missing or truncated files.
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace mrgen::nn
