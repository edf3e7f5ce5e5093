#include "mrgen/nn/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace mrgen::nn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json hyper_to_json(const Hyperparams& h) {
  return json{{"src_vocab", h.src_vocab},
              {"tgt_vocab", h.tgt_vocab},
              {"embed_dim", h.embed_dim},
              {"encoder", to_string(h.encoder)},
              {"enc_hidden", h.enc_hidden},
              {"dec_layers", h.dec_layers},
              {"dec_hidden", h.dec_hidden},
              {"att_dim", h.att_dim},
              {"cnn_window", h.cnn_window},
              {"cnn_max_pos", h.cnn_max_pos},
              {"beam_width", h.beam_width},
              {"length_alpha", h.length_alpha},
              {"max_decode_len", h.max_decode_len},
              {"learning_rate", h.learning_rate},
              {"epochs", h.epochs},
              {"batch_size", h.batch_size},
              {"optimizer", h.optimizer == OptimizerKind::adam ? "adam" : "sgd"},
              {"seed", h.seed}};
}

Hyperparams hyper_from_json(const json& j) {
  Hyperparams h;
  h.src_vocab = j.at("src_vocab").get<int>();
  h.tgt_vocab = j.at("tgt_vocab").get<int>();
  h.embed_dim = j.at("embed_dim").get<int>();
  h.encoder = encoder_kind_from_string(j.at("encoder").get<std::string>());
  h.enc_hidden = j.at("enc_hidden").get<int>();
  h.dec_layers = j.at("dec_layers").get<int>();
  h.dec_hidden = j.at("dec_hidden").get<int>();
  h.att_dim = j.at("att_dim").get<int>();
  h.cnn_window = j.value("cnn_window", 3);
  h.cnn_max_pos = j.value("cnn_max_pos", 64);
  h.beam_width = j.value("beam_width", 10);
  h.length_alpha = j.value("length_alpha", 0.6);
  h.max_decode_len = j.value("max_decode_len", 60);
  h.learning_rate = j.value("learning_rate", 1e-3);
  h.epochs = j.value("epochs", 12);
  h.batch_size = j.value("batch_size", 16);
  h.optimizer = j.value("optimizer", std::string("adam")) == "sgd" ? OptimizerKind::sgd
                                                                   : OptimizerKind::adam;
  h.seed = j.value("seed", 1ULL);
  return h;
}

template <typename T>
std::vector<long long> tensor_shape(const T& t) {
  if constexpr (std::is_same_v<std::decay_t<T>, Mat>)
    return {static_cast<long long>(t.rows()), static_cast<long long>(t.cols())};
  else
    return {static_cast<long long>(t.size())};
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create checkpoint directory " + dir);

  json index = json::array();
  std::ofstream bin(dir + "/params.bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot write " + dir + "/params.bin");

  long long offset = 0;
  ckpt.params.for_each_tensor([&](const std::string& name, const auto& t) {
    auto shape = tensor_shape(t);
    index.push_back({{"name", name}, {"shape", shape}, {"offset", offset}});
    const double* data = t.data();
    for (long long i = 0; i < t.size(); ++i) {
      float v = static_cast<float>(data[i]);
      bin.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
    offset += static_cast<long long>(t.size()) * static_cast<long long>(sizeof(float));
  });
  bin.close();
  if (!bin) throw IoError("failed writing " + dir + "/params.bin");

  json manifest = {{"format_version", kCheckpointFormatVersion},
                   {"hyperparams", hyper_to_json(ckpt.params.hyper)},
                   {"source_vocab", ckpt.src_vocab.tokens()},
                   {"target_vocab", ckpt.tgt_vocab.tokens()},
                   {"tensors", index}};
  std::ofstream mf(dir + "/manifest.json", std::ios::trunc);
  if (!mf) throw IoError("cannot write " + dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw IoError("cannot open " + dir + "/manifest.json");
  json manifest;
  try {
    mf >> manifest;
  } catch (const std::exception& e) {
    throw IoError(dir + "/manifest.json: " + e.what());
  }
  int version = manifest.value("format_version", -1);
  if (version != kCheckpointFormatVersion)
    throw VersionMismatch("checkpoint format version " + std::to_string(version) +
                          " is not supported");

  Hyperparams hyper = hyper_from_json(manifest.at("hyperparams"));
  Checkpoint ckpt{ModelParams::zeros(hyper),
                  Vocabulary(manifest.at("source_vocab").get<std::vector<std::string>>()),
                  Vocabulary(manifest.at("target_vocab").get<std::vector<std::string>>())};
  if (ckpt.src_vocab.size() != hyper.src_vocab || ckpt.tgt_vocab.size() != hyper.tgt_vocab)
    throw ShapeMismatch("vocabulary sizes disagree with hyperparams");

  std::ifstream bin(dir + "/params.bin", std::ios::binary);
  if (!bin) throw IoError("cannot open " + dir + "/params.bin");
  bin.seekg(0, std::ios::end);
  long long file_size = bin.tellg();
  bin.seekg(0);

  const auto& tensors = manifest.at("tensors");
  std::size_t entry = 0;
  ckpt.params.for_each_tensor([&](const std::string& name, auto& t) {
    if (entry >= tensors.size()) throw ShapeMismatch("tensor index is missing " + name);
    const auto& node = tensors[entry++];
    if (node.at("name").get<std::string>() != name)
      throw ShapeMismatch("tensor index order mismatch at " + name);
    auto shape = node.at("shape").get<std::vector<long long>>();
    auto expect = tensor_shape(t);
    if (shape != expect)
      throw ShapeMismatch("tensor " + name + " has an unexpected shape");
    long long offset = node.at("offset").get<long long>();
    long long bytes = static_cast<long long>(t.size()) * static_cast<long long>(sizeof(float));
    if (offset < 0 || offset + bytes > file_size)
      throw IoError("params.bin is truncated at tensor " + name);
    bin.seekg(offset);
    double* data = t.data();
    for (long long i = 0; i < t.size(); ++i) {
      float v;
      bin.read(reinterpret_cast<char*>(&v), sizeof(float));
      if (!bin) throw IoError("params.bin is truncated at tensor " + name);
      data[i] = static_cast<double>(v);
    }
  });
  if (entry != tensors.size()) throw ShapeMismatch("tensor index has extra entries");
  return ckpt;
}

}  // namespace mrgen::nn
