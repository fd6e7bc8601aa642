#pragma once

#include "lvcheck/gcn.hpp"
#include "lvcheck/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace lvtest {

struct WeightedEdge {
  std::size_t a, b;
  double w;
};

/// Tensors for an explicit undirected graph over the first `n_real` of `n`
/// rows. Rows in `containers` are structural: zero features, no label.
inline lvcheck::GraphTensors make_tensors(std::size_t n, std::size_t n_real, const std::vector<WeightedEdge>& edges,
                                          const lvcheck::Matrix& real_features, const std::vector<int>& labels,
                                          const std::vector<std::size_t>& containers = {}) {
  lvcheck::GraphTensors t;
  t.adjacency = lvcheck::Matrix(n, n);
  for (const auto& e : edges) {
    t.adjacency(e.a, e.b) = e.w;
    t.adjacency(e.b, e.a) = e.w;
  }
  t.renormalized = lvcheck::renormalize(t.adjacency);
  t.features = lvcheck::Matrix(n, real_features.cols());
  t.labels.assign(n, -1);
  t.real_mask.assign(n, false);
  t.component_mask.assign(n, false);
  for (std::size_t i = 0; i < n_real; ++i) {
    t.real_mask[i] = true;
    const bool container = std::find(containers.begin(), containers.end(), i) != containers.end();
    t.component_mask[i] = !container;
    if (container) continue;
    for (std::size_t k = 0; k < real_features.cols(); ++k) t.features(i, k) = real_features(i, k);
    t.labels[i] = labels[i];
  }
  return t;
}

/// Random connected graph: a spanning tree plus extra edges, weights in (0, 1].
inline lvcheck::GraphTensors random_tensors(std::mt19937_64& rng, std::size_t n, std::size_t n_real,
                                            std::size_t in_dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 1; i < n_real; ++i) edges.push_back({rng() % i, i, 0.1 + 0.9 * u(rng)});
  for (std::size_t k = 0; k < n_real; ++k) {
    const std::size_t a = rng() % n_real, b = rng() % n_real;
    if (a != b) edges.push_back({a, b, 0.1 + 0.9 * u(rng)});
  }
  lvcheck::Matrix x(n_real, in_dim);
  for (auto& v : x.data()) v = u(rng);
  std::vector<int> labels(n_real);
  for (auto& l : labels) l = static_cast<int>(rng() % lvcheck::kNumClasses);
  std::vector<std::size_t> containers;
  if (n_real > 2) containers.push_back(n_real - 1);
  return make_tensors(n, n_real, edges, x, labels, containers);
}

inline std::vector<double*> parameters(lvcheck::GcnModel& m) {
  std::vector<double*> out;
  for (auto& w : m.conv_weights) {
    for (auto& v : w.data()) out.push_back(&v);
  }
  for (auto& v : m.fc_weight.data()) out.push_back(&v);
  for (auto& v : m.fc_bias) out.push_back(&v);
  return out;
}

inline std::vector<double> flatten(const lvcheck::Gradients& g) {
  std::vector<double> out;
  for (const auto& w : g.conv_weights) out.insert(out.end(), w.data().begin(), w.data().end());
  out.insert(out.end(), g.fc_weight.data().begin(), g.fc_weight.data().end());
  out.insert(out.end(), g.fc_bias.begin(), g.fc_bias.end());
  return out;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Central differences against backward() on every scalar parameter.
/// Relative error uses a floor of 1e-6 on the denominator.
inline GradCheck check_gradients(lvcheck::GcnModel model, const lvcheck::GraphTensors& t, double eps = 1e-5) {
  lvcheck::ForwardCache cache;
  lvcheck::forward(model, t, &cache);
  const std::vector<double> analytic = flatten(lvcheck::backward(model, cache, t));
  auto params = parameters(model);
  GradCheck r;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double orig = *params[k];
    *params[k] = orig + eps;
    const double lp = lvcheck::loss(lvcheck::predict(model, t), t.labels);
    *params[k] = orig - eps;
    const double lm = lvcheck::loss(lvcheck::predict(model, t), t.labels);
    *params[k] = orig;
    const double numeric = (lp - lm) / (2.0 * eps);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
    r.max_rel_error = std::max(r.max_rel_error, std::abs(numeric - analytic[k]) / scale);
    ++r.checked;
  }
  return r;
}

}  // namespace lvtest
