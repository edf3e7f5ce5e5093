#include "mrgen/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "mrgen/error.hpp"

#ifndef MRGEN_DATA_DIR
#define MRGEN_DATA_DIR "data"
#endif

namespace mrgen {

namespace fs = std::filesystem;
using nlohmann::json;

std::string default_data_root() {
  if (const char* env = std::getenv("MRGEN_DATA_ROOT"); env && *env) return env;
  return MRGEN_DATA_DIR;
}

DelexPolicy RunConfig::resolve_policy() const {
  if (delex_policy_path) return load_delex_policy(*delex_policy_path);
  return default_e2e_policy();
}

namespace {

void reject_unknown(const json& node, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : node.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

void require_exists(const std::optional<std::string>& path, const std::string& key) {
  if (path && !fs::exists(*path))
    throw ConfigError("config: " + key + " refers to a missing file: " + *path);
}

json hyper_overrides_to_json(const nn::Hyperparams& h) {
  return json{{"embed_dim", h.embed_dim},
              {"encoder", nn::to_string(h.encoder)},
              {"enc_hidden", h.enc_hidden},
              {"dec_layers", h.dec_layers},
              {"dec_hidden", h.dec_hidden},
              {"att_dim", h.att_dim},
              {"beam_width", h.beam_width},
              {"length_alpha", h.length_alpha},
              {"max_decode_len", h.max_decode_len},
              {"learning_rate", h.learning_rate},
              {"epochs", h.epochs},
              {"batch_size", h.batch_size},
              {"optimizer", h.optimizer == nn::OptimizerKind::adam ? "adam" : "sgd"}};
}

}  // namespace

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  reject_unknown(doc, {"version", "seed", "paths", "hyperparams", "delex_policy", "rules",
                       "synonyms", "grammar", "ensemble", "split", "permutation", "selection"},
                 origin);
  RunConfig cfg;
  if (!doc.contains("version")) throw ConfigError(origin + ": missing version field");
  cfg.version = doc.at("version").get<int>();
  if (cfg.version != 1) throw ConfigError(origin + ": unsupported config version");
  cfg.seed = doc.value("seed", 42ULL);
  cfg.data_root = default_data_root();
  cfg.checkpoint_root = "checkpoints";

  if (doc.contains("paths")) {
    const auto& p = doc.at("paths");
    reject_unknown(p, {"data_root", "checkpoint_root"}, origin + ".paths");
    cfg.data_root = p.value("data_root", cfg.data_root);
    cfg.checkpoint_root = p.value("checkpoint_root", cfg.checkpoint_root);
  }
  if (doc.contains("hyperparams")) {
    const auto& h = doc.at("hyperparams");
    reject_unknown(h,
                   {"embed_dim", "encoder", "enc_hidden", "dec_layers", "dec_hidden", "att_dim",
                    "beam_width", "length_alpha", "max_decode_len", "learning_rate", "epochs",
                    "batch_size", "optimizer"},
                   origin + ".hyperparams");
    cfg.hyper.embed_dim = h.value("embed_dim", cfg.hyper.embed_dim);
    if (h.contains("encoder"))
      cfg.hyper.encoder = nn::encoder_kind_from_string(h.at("encoder").get<std::string>());
    cfg.hyper.enc_hidden = h.value("enc_hidden", cfg.hyper.enc_hidden);
    cfg.hyper.dec_layers = h.value("dec_layers", cfg.hyper.dec_layers);
    cfg.hyper.dec_hidden = h.value("dec_hidden", cfg.hyper.dec_hidden);
    cfg.hyper.att_dim = h.value("att_dim", cfg.hyper.att_dim);
    cfg.hyper.beam_width = h.value("beam_width", cfg.hyper.beam_width);
    cfg.hyper.length_alpha = h.value("length_alpha", cfg.hyper.length_alpha);
    cfg.hyper.max_decode_len = h.value("max_decode_len", cfg.hyper.max_decode_len);
    cfg.hyper.learning_rate = h.value("learning_rate", cfg.hyper.learning_rate);
    cfg.hyper.epochs = h.value("epochs", cfg.hyper.epochs);
    cfg.hyper.batch_size = h.value("batch_size", cfg.hyper.batch_size);
    if (h.contains("optimizer"))
      cfg.hyper.optimizer = h.at("optimizer").get<std::string>() == "sgd"
                                ? nn::OptimizerKind::sgd
                                : nn::OptimizerKind::adam;
  }
  cfg.hyper.seed = cfg.seed;
  if (doc.contains("delex_policy")) cfg.delex_policy_path = doc.at("delex_policy").get<std::string>();
  if (doc.contains("rules")) cfg.rules_path = doc.at("rules").get<std::string>();
  if (doc.contains("synonyms")) cfg.synonyms_path = doc.at("synonyms").get<std::string>();
  if (doc.contains("grammar")) cfg.grammar_path = doc.at("grammar").get<std::string>();
  if (doc.contains("ensemble")) cfg.ensemble_path = doc.at("ensemble").get<std::string>();

  if (doc.contains("split")) {
    const auto& s = doc.at("split");
    reject_unknown(s, {"pronouns", "position_slot_name", "keep_unalignable"}, origin + ".split");
    if (s.contains("pronouns"))
      cfg.split.pronouns = s.at("pronouns").get<std::vector<std::string>>();
    if (cfg.split.pronouns.empty()) throw ConfigError(origin + ": pronoun list must be non-empty");
    cfg.split.position_slot_name = s.value("position_slot_name", cfg.split.position_slot_name);
    cfg.split.keep_unalignable = s.value("keep_unalignable", cfg.split.keep_unalignable);
  }
  if (doc.contains("permutation")) {
    const auto& p = doc.at("permutation");
    reject_unknown(p, {"k", "seed"}, origin + ".permutation");
    cfg.permutation.k = p.value("k", cfg.permutation.k);
    if (cfg.permutation.k < 0) throw ConfigError(origin + ": permutation k must be >= 0");
    cfg.permutation.seed = p.value("seed", cfg.seed);
  }
  if (doc.contains("selection")) {
    const auto& s = doc.at("selection");
    reject_unknown(s,
                   {"contrastive_weight", "apposition_weight", "subordinate_weight",
                    "aggregation_weight", "sentence_penalty", "mode", "top_n", "threshold"},
                   origin + ".selection");
    cfg.selection.contrastive_weight = s.value("contrastive_weight", 2.0);
    cfg.selection.apposition_weight = s.value("apposition_weight", 2.0);
    cfg.selection.subordinate_weight = s.value("subordinate_weight", 1.5);
    cfg.selection.aggregation_weight = s.value("aggregation_weight", 1.0);
    cfg.selection.sentence_penalty = s.value("sentence_penalty", 1.0);
    if (cfg.selection.sentence_penalty < 0.0)
      throw ConfigError(origin + ": sentence_penalty must be >= 0");
    std::string mode = s.value("mode", std::string("top_per_mr"));
    if (mode == "top_per_mr")
      cfg.selection.mode = SelectionPolicy::Mode::top_per_mr;
    else if (mode == "threshold")
      cfg.selection.mode = SelectionPolicy::Mode::threshold;
    else
      throw ConfigError(origin + ": unknown selection mode '" + mode + "'");
    cfg.selection.top_n = s.value("top_n", 4);
    cfg.selection.threshold = s.value("threshold", 0.0);
  }

  require_exists(cfg.delex_policy_path, "delex_policy");
  require_exists(cfg.rules_path, "rules");
  require_exists(cfg.synonyms_path, "synonyms");
  require_exists(cfg.grammar_path, "grammar");
  require_exists(cfg.ensemble_path, "ensemble");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config_text(text, path);
}

std::string serialize_run_config(const RunConfig& cfg) {
  json doc;
  doc["version"] = cfg.version;
  doc["seed"] = cfg.seed;
  doc["paths"] = {{"data_root", cfg.data_root}, {"checkpoint_root", cfg.checkpoint_root}};
  doc["hyperparams"] = hyper_overrides_to_json(cfg.hyper);
  if (cfg.delex_policy_path) doc["delex_policy"] = *cfg.delex_policy_path;
  if (cfg.rules_path) doc["rules"] = *cfg.rules_path;
  if (cfg.synonyms_path) doc["synonyms"] = *cfg.synonyms_path;
  if (cfg.grammar_path) doc["grammar"] = *cfg.grammar_path;
  if (cfg.ensemble_path) doc["ensemble"] = *cfg.ensemble_path;
  doc["split"] = {{"pronouns", cfg.split.pronouns},
                  {"position_slot_name", cfg.split.position_slot_name},
                  {"keep_unalignable", cfg.split.keep_unalignable}};
  doc["permutation"] = {{"k", cfg.permutation.k}, {"seed", cfg.permutation.seed}};
  doc["selection"] = {
      {"contrastive_weight", cfg.selection.contrastive_weight},
      {"apposition_weight", cfg.selection.apposition_weight},
      {"subordinate_weight", cfg.selection.subordinate_weight},
      {"aggregation_weight", cfg.selection.aggregation_weight},
      {"sentence_penalty", cfg.selection.sentence_penalty},
      {"mode", cfg.selection.mode == SelectionPolicy::Mode::top_per_mr ? "top_per_mr"
                                                                       : "threshold"},
      {"top_n", cfg.selection.top_n},
      {"threshold", cfg.selection.threshold}};
  return doc.dump(2) + "\n";
}

}  // namespace mrgen
