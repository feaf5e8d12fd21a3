#pragma once

// Least-squares conditional expectation E[Y | F_{t_k}] on Hermite polynomials
// of the standardized state W_{t_k} / sqrt(t_k). The design matrix depends only
// on the bundle and the node, so each node's normal equations are factored once.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "svito/stochastic.hpp"

namespace svito {

struct RegressionConfig {
  int degree = 3;
  double ridge = 1e-8;
};

class DiscreteFiltration {
 public:
  DiscreteFiltration(const BrownianBundle& bundle, RegressionConfig cfg = {}) : bundle_(&bundle), cfg_(cfg) {
    if (cfg.degree < 0 || cfg.degree > 8) throw UsageError("basis degree must be in [0, 8]");
    if (!(cfg.ridge >= 0)) throw UsageError("ridge factor must be non-negative");
    if (bundle.dims() != 1) throw UnsupportedOperation("conditional expectations are implemented for one Brownian dimension");
    const auto& grid = bundle.grid();
    nodes_.resize(grid.nodes());
    for (std::size_t k = 0; k < grid.nodes(); ++k) factor(k);
  }

  const BrownianBundle& bundle() const noexcept { return *bundle_; }
  const RegressionConfig& config() const noexcept { return cfg_; }
  std::size_t basis_size(std::size_t k) const { return nodes_[k].size; }
  /// True when some node's normal equations needed the ridge to be solvable.
  bool ridge_fallback() const noexcept { return fallback_; }

  /// Features at node k for path p; they depend on W_{t_k} only.
  void features(std::size_t k, std::size_t p, std::span<double> out) const {
    const std::size_t size = nodes_[k].size;
    const double t = bundle_->grid().t(k);
    const double x = t > 0 ? bundle_->W(p, k) / std::sqrt(t) : 0.0;
    // Probabilists' Hermite recursion He_{n+1} = x He_n - n He_{n-1}.
    out[0] = 1.0;
    if (size > 1) out[1] = x;
    for (std::size_t n = 1; n + 1 < size; ++n) out[n + 1] = x * out[n] - static_cast<double>(n) * out[n - 1];
  }

  /// Fitted z with dy ~ z(W_{t_k}) dW_k: least squares of dy on the features times dW_k.
  /// Its population version is E[dy dW_k | F_{t_k}] / dt, with dW^2 in place of dt.
  std::vector<double> loading(std::size_t k, std::span<const double> dy) const {
    const auto& node = nodes_[k];
    const std::size_t M = bundle_->paths();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(node.size);
    std::vector<double> phi(node.size);
    for (std::size_t p = 0; p < M; ++p) {
      features(k, p, phi);
      const double w = bundle_->dW(p, k) * dy[p];
      for (std::size_t i = 0; i < node.size; ++i) rhs[i] += phi[i] * w;
    }
    rhs /= static_cast<double>(M);
    const Eigen::VectorXd beta = node.weighted.solve(rhs);
    std::vector<double> out(M);
    for (std::size_t p = 0; p < M; ++p) {
      features(k, p, phi);
      double v = 0.0;
      for (std::size_t i = 0; i < node.size; ++i) v += beta[i] * phi[i];
      out[p] = v;
    }
    return out;
  }

  /// Fitted E[y | F_{t_k}] on every path.
  std::vector<double> expect(std::size_t k, std::span<const double> y) const {
    const auto& node = nodes_[k];
    const std::size_t M = bundle_->paths();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(node.size);
    std::vector<double> phi(node.size);
    for (std::size_t p = 0; p < M; ++p) {
      features(k, p, phi);
      for (std::size_t i = 0; i < node.size; ++i) rhs[i] += phi[i] * y[p];
    }
    rhs /= static_cast<double>(M);
    const Eigen::VectorXd beta = node.solver.solve(rhs);
    std::vector<double> out(M);
    for (std::size_t p = 0; p < M; ++p) {
      features(k, p, phi);
      double v = 0.0;
      for (std::size_t i = 0; i < node.size; ++i) v += beta[i] * phi[i];
      out[p] = v;
    }
    return out;
  }

 private:
  struct Node {
    std::size_t size = 1;
    Eigen::LDLT<Eigen::MatrixXd> solver;
    Eigen::LDLT<Eigen::MatrixXd> weighted;  // gram of features * dW_k, for loadings
  };

  void factor(std::size_t k) {
    auto& node = nodes_[k];
    // At t = 0 the state is deterministic; only the intercept is identifiable.
    node.size = bundle_->grid().t(k) > 0 ? static_cast<std::size_t>(cfg_.degree) + 1 : 1;
    const std::size_t M = bundle_->paths();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(node.size, node.size);
    std::vector<double> phi(node.size);
    for (std::size_t p = 0; p < M; ++p) {
      features(k, p, phi);
      for (std::size_t i = 0; i < node.size; ++i)
        for (std::size_t j = 0; j < node.size; ++j) gram(i, j) += phi[i] * phi[j];
    }
    gram /= static_cast<double>(M);
    if (k < bundle_->grid().steps()) {
      Eigen::MatrixXd wg = Eigen::MatrixXd::Zero(node.size, node.size);
      for (std::size_t p = 0; p < M; ++p) {
        features(k, p, phi);
        const double w = bundle_->dW(p, k) * bundle_->dW(p, k);
        for (std::size_t i = 0; i < node.size; ++i)
          for (std::size_t j = 0; j < node.size; ++j) wg(i, j) += phi[i] * phi[j] * w;
      }
      wg /= static_cast<double>(M);
      const double scale = bundle_->grid().dt();
      for (std::size_t i = 1; i < node.size; ++i) wg(i, i) += cfg_.ridge * scale;
      node.weighted.compute(wg);
      if (node.weighted.info() != Eigen::Success || node.weighted.vectorD().minCoeff() <= 1e-12 * scale) {
        fallback_ = true;
        for (std::size_t i = 0; i < node.size; ++i) wg(i, i) += std::max(cfg_.ridge, 1e-8) * scale;
        node.weighted.compute(wg);
      }
    }
    // Ridge on the non-intercept coefficients, so constants are reproduced exactly.
    for (std::size_t i = 1; i < node.size; ++i) gram(i, i) += cfg_.ridge;
    node.solver.compute(gram);
    const double floor = 1e-12 * std::max(1.0, gram.diagonal().maxCoeff());
    if (node.solver.info() != Eigen::Success || node.solver.vectorD().minCoeff() <= floor) {
      fallback_ = true;
      for (std::size_t i = 0; i < node.size; ++i) gram(i, i) += std::max(cfg_.ridge, 1e-8);
      node.solver.compute(gram);
    }
  }

  const BrownianBundle* bundle_;
  RegressionConfig cfg_;
  std::vector<Node> nodes_;
  bool fallback_ = false;
};

}  // namespace svito
