#pragma once

#include <Eigen/Dense>
#include <random>

namespace mrgen::nn {

// Training and gradient checks run in 64-bit reals; checkpoints store 32-bit.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Vec softmax(const Vec& z) {
  Vec shifted = z.array() - z.maxCoeff();
  Vec e = shifted.array().exp();
  return e / e.sum();
}

inline Vec log_softmax(const Vec& z) {
  double m = z.maxCoeff();
  double lse = m + std::log((z.array() - m).exp().sum());
  return z.array() - lse;
}

inline void uniform_init(Mat& m, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

inline void uniform_init(Vec& v, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
}

}  // namespace mrgen::nn
