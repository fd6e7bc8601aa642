#include "lvcheck/gcn.hpp"
#include "lvcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace lvcheck {

namespace {

using SparseRows = std::vector<std::vector<std::pair<std::size_t, double>>>;

SparseRows sparse_rows(const Matrix& a) {
  SparseRows rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) rows[i].emplace_back(j, a(i, j));
    }
  }
  return rows;
}

// out = h * w
Matrix matmul(const Matrix& h, const Matrix& w) {
  Matrix out(h.rows(), w.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    auto o = out.row(i);
    const auto hi = h.row(i);
    for (std::size_t k = 0; k < h.cols(); ++k) {
      const double x = hi[k];
      if (x == 0.0) continue;
      const auto wk = w.row(k);
      for (std::size_t c = 0; c < w.cols(); ++c) o[c] += x * wk[c];
    }
  }
  return out;
}

// out = A_hat * t using the sparse rows of A_hat.
Matrix propagate(const SparseRows& a, const Matrix& t) {
  Matrix out(t.rows(), t.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto o = out.row(i);
    for (const auto& [j, v] : a[i]) {
      const auto tj = t.row(j);
      for (std::size_t c = 0; c < t.cols(); ++c) o[c] += v * tj[c];
    }
  }
  return out;
}

// out = A_hat^T * g
Matrix propagate_transpose(const SparseRows& a, const Matrix& g) {
  Matrix out(g.rows(), g.cols());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto gi = g.row(i);
    if (std::all_of(gi.begin(), gi.end(), [](double x) { return x == 0.0; })) continue;
    for (const auto& [j, v] : a[i]) {
      auto o = out.row(j);
      for (std::size_t c = 0; c < g.cols(); ++c) o[c] += v * gi[c];
    }
  }
  return out;
}

Matrix relu(const Matrix& z) {
  Matrix out = z;
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix neighborhood_max(const SparseRows& a, const Matrix& h, std::vector<std::size_t>& argmax) {
  Matrix out(h.rows(), h.cols());
  argmax.assign(h.rows() * h.cols(), 0);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t c = 0; c < h.cols(); ++c) {
      double best = -std::numeric_limits<double>::infinity();
      std::size_t arg = i;
      for (const auto& [j, v] : a[i]) {
        if (h(j, c) > best) {
          best = h(j, c);
          arg = j;
        }
      }
      if (a[i].empty()) best = h(i, c);
      out(i, c) = best;
      argmax[i * h.cols() + c] = arg;
    }
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto l = logits.row(i);
    const double m = *std::max_element(l.begin(), l.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < l.size(); ++c) {
      p(i, c) = std::exp(l[c] - m);
      sum += p(i, c);
    }
    for (std::size_t c = 0; c < l.size(); ++c) p(i, c) /= sum;
  }
  return p;
}

// Uniform in [-1, 1) from the top 53 bits; avoids distribution objects whose
// output is library-specific.
double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

void fail_config(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

}  // namespace

std::string_view to_string(Pooling p) {
  return p == Pooling::NeighborhoodMax ? "neighborhood-max" : "none";
}

Pooling parse_pooling(std::string_view s) {
  if (s == "neighborhood-max") return Pooling::NeighborhoodMax;
  if (s == "none") return Pooling::None;
  throw Error(ErrorCode::BadConfig, "unknown pooling \"" + std::string(s) + "\"");
}

void GcnConfig::validate() const {
  if (n_classes != kNumClasses) fail_config("n_classes must be 5");
  if (hidden_dims.empty()) fail_config("at least one conv layer is required");
  if (n_blocks == 0 || n_conv_per_block == 0) fail_config("n_blocks and n_conv_per_block must be positive");
  if (hidden_dims.size() != n_blocks * n_conv_per_block) {
    fail_config("hidden_dims has " + std::to_string(hidden_dims.size()) + " entries, expected n_blocks * " +
                "n_conv_per_block = " + std::to_string(n_blocks * n_conv_per_block));
  }
  if (std::find(hidden_dims.begin(), hidden_dims.end(), 0u) != hidden_dims.end()) fail_config("zero-width layer");
  if (use_fc && fc_dim != hidden_dims.back()) fail_config("fc_dim must equal the last hidden width");
  if (in_dim == 0 || n_nodes == 0) fail_config("in_dim and n_nodes must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail_config("learning_rate must be >= 0");
}

std::vector<std::size_t> GcnConfig::conv_out_dims() const {
  auto dims = hidden_dims;
  if (!use_fc) dims.back() = n_classes;
  return dims;
}

GcnModel init_model(const GcnConfig& config) {
  config.validate();
  GcnModel m;
  m.config = config;
  std::mt19937_64 rng(config.seed);
  auto glorot = [&](std::size_t fan_in, std::size_t fan_out) {
    Matrix w(fan_in, fan_out);
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : w.data()) v = s * uniform_pm1(rng);
    return w;
  };
  std::size_t in = config.in_dim;
  for (std::size_t out : config.conv_out_dims()) {
    m.conv_weights.push_back(glorot(in, out));
    in = out;
  }
  if (config.use_fc) {
    m.fc_weight = glorot(in, config.n_classes);
    m.fc_bias.assign(config.n_classes, 0.0);
  }
  return m;
}

Gradients zero_gradients(const GcnModel& model) {
  Gradients g;
  for (const auto& w : model.conv_weights) g.conv_weights.emplace_back(w.rows(), w.cols());
  g.fc_weight = Matrix(model.fc_weight.rows(), model.fc_weight.cols());
  g.fc_bias.assign(model.fc_bias.size(), 0.0);
  return g;
}

Prediction forward(const GcnModel& model, const GraphTensors& t, ForwardCache* cache) {
  const auto& cfg = model.config;
  const std::size_t n = t.n();
  if (n != cfg.n_nodes || t.renormalized.rows() != n || t.renormalized.cols() != n || t.features.rows() != n ||
      t.features.cols() != cfg.in_dim || t.component_mask.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "tensors are " + std::to_string(t.features.rows()) + "x" +
                                              std::to_string(t.features.cols()) + ", model expects " +
                                              std::to_string(cfg.n_nodes) + "x" + std::to_string(cfg.in_dim));
  }
  if (model.conv_weights.size() != cfg.hidden_dims.size()) throw Error(ErrorCode::ShapeMismatch, "conv layer count");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.neighbors = sparse_rows(t.renormalized);

  Matrix h = t.features;
  std::size_t layer = 0;
  auto pool = [&] {
    ForwardCache::PoolStage ps;
    ps.width = h.cols();
    h = neighborhood_max(c.neighbors, h, ps.argmax);
    c.stages.push_back({ForwardCache::Stage::Kind::Pool, c.pools.size()});
    if (cache) c.pools.push_back(std::move(ps));
    else c.pools.emplace_back();
  };
  for (std::size_t b = 0; b < cfg.n_blocks; ++b) {
    for (std::size_t k = 0; k < cfg.n_conv_per_block; ++k, ++layer) {
      const Matrix& w = model.conv_weights[layer];
      if (w.rows() != h.cols()) throw Error(ErrorCode::ShapeMismatch, "conv weight " + std::to_string(layer));
      Matrix pre = propagate(c.neighbors, matmul(h, w));
      Matrix next = relu(pre);
      c.stages.push_back({ForwardCache::Stage::Kind::Conv, c.convs.size()});
      if (cache) c.convs.push_back({layer, std::move(h), std::move(pre)});
      else c.convs.emplace_back();
      h = std::move(next);
    }
    const bool last = b + 1 == cfg.n_blocks;
    if (cfg.pooling == Pooling::NeighborhoodMax && (!last || !cfg.use_fc)) pool();
  }

  Matrix logits;
  if (cfg.use_fc) {
    if (model.fc_weight.rows() != h.cols() || model.fc_weight.cols() != cfg.n_classes) {
      throw Error(ErrorCode::ShapeMismatch, "fc weight");
    }
    logits = matmul(h, model.fc_weight);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < cfg.n_classes; ++k) logits(i, k) += model.fc_bias[k];
    }
    c.fc_input = std::move(h);
  } else {
    logits = std::move(h);
  }

  Prediction p;
  p.probs = softmax_rows(logits);
  p.class_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = p.probs.row(i);
    p.class_of[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  p.mask = t.component_mask;
  if (cache) c.probs = p.probs;
  return p;
}

Prediction predict(const GcnModel& model, const GraphTensors& tensors) { return forward(model, tensors, nullptr); }

double loss(const Prediction& pred, std::span<const int> labels) {
  if (labels.size() != pred.probs.rows()) throw Error(ErrorCode::ShapeMismatch, "label vector length");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || !pred.mask[i]) continue;
    total -= std::log(pred.probs(i, static_cast<std::size_t>(labels[i])));
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::NoLabeledNodes, "no labeled component rows");
  return total / static_cast<double>(count);
}

std::size_t labeled_count(const GraphTensors& t) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.labels.size(); ++i) n += (t.labels[i] >= 0 && t.component_mask[i]) ? 1 : 0;
  return n;
}

void backward(const GcnModel& model, const ForwardCache& c, std::span<const int> labels,
              const std::vector<bool>& component_mask, double scale, Gradients& g) {
  const auto& cfg = model.config;
  const std::size_t n = c.probs.rows();

  // d(scale * CE)/d(logits) = scale * (p - onehot) on labeled rows.
  Matrix grad(n, cfg.n_classes);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || !component_mask[i]) continue;
    for (std::size_t k = 0; k < cfg.n_classes; ++k) {
      const double y = static_cast<int>(k) == labels[i] ? 1.0 : 0.0;
      grad(i, k) = scale * (c.probs(i, k) - y);
    }
  }

  if (cfg.use_fc) {
    const Matrix& h = c.fc_input;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < cfg.n_classes; ++k) g.fc_bias[k] += grad(i, k);
      for (std::size_t d = 0; d < h.cols(); ++d) {
        const double x = h(i, d);
        if (x == 0.0) continue;
        for (std::size_t k = 0; k < cfg.n_classes; ++k) g.fc_weight(d, k) += x * grad(i, k);
      }
    }
    Matrix dh(n, h.cols());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < h.cols(); ++d) {
        double s = 0.0;
        for (std::size_t k = 0; k < cfg.n_classes; ++k) s += grad(i, k) * model.fc_weight(d, k);
        dh(i, d) = s;
      }
    }
    grad = std::move(dh);
  }

  for (auto it = c.stages.rbegin(); it != c.stages.rend(); ++it) {
    if (it->kind == ForwardCache::Stage::Kind::Pool) {
      const auto& ps = c.pools[it->index];
      Matrix dh(n, ps.width);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < ps.width; ++d) dh(ps.argmax[i * ps.width + d], d) += grad(i, d);
      }
      grad = std::move(dh);
      continue;
    }
    const auto& cs = c.convs[it->index];
    const Matrix& w = model.conv_weights[cs.layer];
    // ReLU gate, then back through A_hat.
    for (std::size_t k = 0; k < grad.size(); ++k) {
      if (!(cs.pre.data()[k] > 0.0)) grad.data()[k] = 0.0;
    }
    const Matrix dt = propagate_transpose(c.neighbors, grad);
    Matrix& dw = g.conv_weights[cs.layer];
    for (std::size_t i = 0; i < n; ++i) {
      const auto dti = dt.row(i);
      for (std::size_t d = 0; d < cs.input.cols(); ++d) {
        const double x = cs.input(i, d);
        if (x == 0.0) continue;
        auto row = dw.row(d);
        for (std::size_t k = 0; k < dti.size(); ++k) row[k] += x * dti[k];
      }
    }
    if (cs.layer == 0) break;  // no gradient needed w.r.t. the input features
    Matrix dh(n, w.rows());
    for (std::size_t i = 0; i < n; ++i) {
      const auto dti = dt.row(i);
      if (std::all_of(dti.begin(), dti.end(), [](double x) { return x == 0.0; })) continue;
      for (std::size_t d = 0; d < w.rows(); ++d) {
        const auto wd = w.row(d);
        double s = 0.0;
        for (std::size_t k = 0; k < wd.size(); ++k) s += dti[k] * wd[k];
        dh(i, d) = s;
      }
    }
    grad = std::move(dh);
  }
}

Gradients backward(const GcnModel& model, const ForwardCache& cache, const GraphTensors& tensors) {
  const std::size_t count = labeled_count(tensors);
  if (count == 0) throw Error(ErrorCode::NoLabeledNodes, "no labeled component rows");
  Gradients g = zero_gradients(model);
  backward(model, cache, tensors.labels, tensors.component_mask, 1.0 / static_cast<double>(count), g);
  return g;
}

double accuracy(const GcnModel& model, const std::vector<GraphTensors>& dataset) {
  std::size_t hit = 0, total = 0;
  for (const auto& t : dataset) {
    const Prediction p = predict(model, t);
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
      if (t.labels[i] < 0 || !t.component_mask[i]) continue;
      ++total;
      hit += p.class_of[i] == t.labels[i] ? 1 : 0;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

TrainResult train(GcnModel model, const std::vector<GraphTensors>& dataset,
                  const std::vector<GraphTensors>& validation, const EpochCallback& on_epoch) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyCorpus, "training set is empty");
  std::size_t total = 0;
  for (const auto& t : dataset) {
    const std::size_t k = labeled_count(t);
    if (k == 0) throw Error(ErrorCode::NoLabeledNodes, "training graph without labeled components");
    total += k;
  }
  const auto& cfg = model.config;
  const double scale = 1.0 / static_cast<double>(total);

  TrainResult result;
  ForwardCache cache;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Gradients g = zero_gradients(model);
    double sum_loss = 0.0;
    for (std::size_t d = 0; d < dataset.size(); ++d) {
      const auto& t = dataset[d];
      const Prediction p = forward(model, t, &cache);
      for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (t.labels[i] >= 0 && t.component_mask[i]) {
          sum_loss -= std::log(p.probs(i, static_cast<std::size_t>(t.labels[i])));
        }
      }
      backward(model, cache, t.labels, t.component_mask, scale, g);
    }
    const double epoch_loss = sum_loss * scale;
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch));
    }

    const double lr = cfg.learning_rate;
    for (std::size_t l = 0; l < model.conv_weights.size(); ++l) {
      auto& w = model.conv_weights[l].data();
      const auto& dw = g.conv_weights[l].data();
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * dw[k];
    }
    for (std::size_t k = 0; k < model.fc_weight.size(); ++k) model.fc_weight.data()[k] -= lr * g.fc_weight.data()[k];
    for (std::size_t k = 0; k < model.fc_bias.size(); ++k) model.fc_bias[k] -= lr * g.fc_bias[k];

    EpochRecord rec{epoch, epoch_loss, -1.0};
    const bool eval_now = !validation.empty() && cfg.eval_every > 0 &&
                          (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (eval_now) rec.val_accuracy = accuracy(model, validation);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.model = std::move(model);
  return result;
}

std::string training_log_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "epoch,loss,val_accuracy\n";
  char buf[64];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%.9f", r.loss);
    os << r.epoch << ',' << buf << ',';
    if (r.val_accuracy >= 0.0) {
      std::snprintf(buf, sizeof buf, "%.6f", r.val_accuracy);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lvcheck
