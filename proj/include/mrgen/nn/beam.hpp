#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrgen/nn/core.hpp"

namespace mrgen::nn {

// Length penalty from Wu et al.: lp(Y) = (5 + |Y|)^alpha / 6^alpha.
inline double length_penalty(std::size_t length, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(5.0 + static_cast<double>(length), alpha) / std::pow(6.0, alpha);
}

struct BeamHypothesis {
  std::vector<int> tokens;  // excludes BOS, includes EOS when produced
  double log_prob = 0.0;
  double normalized_score = 0.0;
};

// Scorer concept:
//   State initial_state() const;
//   void step(const State&, int prev_token, Vec& log_probs, State& next) const;
//
// Breadth-limited best-first search; finished hypotheses retire from the
// beam. Candidates come back sorted by normalized score, at most `width`.
template <typename Scorer>
std::vector<BeamHypothesis> beam_search(const Scorer& scorer, int bos, int eos, int width,
                                        double alpha, int max_len) {
  using State = decltype(scorer.initial_state());
  struct Live {
    std::vector<int> tokens;
    double log_prob;
    State state;
  };
  struct Expansion {
    double log_prob;
    std::size_t parent;
    int token;
  };

  std::vector<Live> live;
  live.push_back({{}, 0.0, scorer.initial_state()});
  std::vector<BeamHypothesis> done;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    std::vector<Expansion> expansions;
    std::vector<State> next_states(live.size());
    Vec log_probs;
    for (std::size_t i = 0; i < live.size(); ++i) {
      int prev = live[i].tokens.empty() ? bos : live[i].tokens.back();
      scorer.step(live[i].state, prev, log_probs, next_states[i]);
      for (int v = 0; v < log_probs.size(); ++v)
        expansions.push_back({live[i].log_prob + log_probs(v), i, v});
    }
    std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(width), expansions.size());
    std::partial_sort(expansions.begin(), expansions.begin() + keep, expansions.end(),
                      [](const Expansion& a, const Expansion& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Live> next_live;
    for (std::size_t k = 0; k < keep; ++k) {
      const auto& e = expansions[k];
      std::vector<int> tokens = live[e.parent].tokens;
      tokens.push_back(e.token);
      if (e.token == eos) {
        double norm = e.log_prob / length_penalty(tokens.size(), alpha);
        done.push_back({std::move(tokens), e.log_prob, norm});
      } else {
        next_live.push_back({std::move(tokens), e.log_prob, next_states[e.parent]});
      }
    }
    live = std::move(next_live);
  }
  // Unterminated hypotheses at max_len still compete.
  for (auto& l : live) {
    double norm = l.log_prob / length_penalty(l.tokens.size(), alpha);
    done.push_back({std::move(l.tokens), l.log_prob, norm});
  }
  std::stable_sort(done.begin(), done.end(), [](const BeamHypothesis& a, const BeamHypothesis& b) {
    return a.normalized_score > b.normalized_score;
  });
  if (done.size() > static_cast<std::size_t>(width)) done.resize(width);
  return done;
}

}  // namespace mrgen::nn
