#pragma once

#include "lvcheck/features.hpp"
#include "lvcheck/graph.hpp"
#include "lvcheck/matrix.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lvcheck {

enum class Pooling { NeighborhoodMax, None };

std::string_view to_string(Pooling p);
Pooling parse_pooling(std::string_view s);  // throws BadConfig

struct GcnConfig {
  std::size_t n_nodes = kDefaultThreshold;
  std::size_t in_dim = kFeatureDim;
  std::vector<std::size_t> hidden_dims{64, 32};  // one entry per conv layer
  std::size_t n_conv_per_block = 1;
  std::size_t n_blocks = 2;
  std::size_t fc_dim = 32;  // FC input width, equals hidden_dims.back()
  std::size_t n_classes = kNumClasses;
  double learning_rate = 1.0;
  std::size_t epochs = 2000;
  std::uint64_t seed = 7;
  Pooling pooling = Pooling::NeighborhoodMax;
  bool use_fc = true;
  std::size_t eval_every = 10;  // validation cadence in epochs, 0 disables

  /// Throws BadConfig on inconsistent layer counts or dimensions.
  void validate() const;
  /// Output width of every conv layer. Without the FC layer the last conv
  /// layer emits class scores directly.
  std::vector<std::size_t> conv_out_dims() const;
};

struct GcnModel {
  GcnConfig config;
  std::vector<Matrix> conv_weights;  // W^l, in x out
  Matrix fc_weight;                  // fc_dim x n_classes (empty when !use_fc)
  std::vector<double> fc_bias;       // n_classes (empty when !use_fc)

  bool operator==(const GcnModel& o) const {
    return conv_weights == o.conv_weights && fc_weight == o.fc_weight && fc_bias == o.fc_bias;
  }
};

/// Glorot-uniform weights from a seeded 64-bit Mersenne twister; FC bias zero.
GcnModel init_model(const GcnConfig& config);

struct Prediction {
  Matrix probs;               // N x 5
  std::vector<int> class_of;  // argmax per row, lowest index on ties
  std::vector<bool> mask;     // real component rows
};

/// Everything backward() needs from one forward pass.
struct ForwardCache {
  struct ConvStage {
    std::size_t layer = 0;
    Matrix input;  // H^l
    Matrix pre;    // A_hat H^l W^l, before ReLU
  };
  struct PoolStage {
    std::vector<std::size_t> argmax;  // N x width, row-major
    std::size_t width = 0;
  };
  struct Stage {
    enum class Kind { Conv, Pool } kind;
    std::size_t index;  // into convs or pools
  };

  std::vector<Stage> stages;
  std::vector<ConvStage> convs;
  std::vector<PoolStage> pools;
  Matrix fc_input;
  Matrix probs;
  // Sparse rows of A_hat (column index, value), ascending column.
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
};

struct Gradients {
  std::vector<Matrix> conv_weights;
  Matrix fc_weight;
  std::vector<double> fc_bias;
};

Gradients zero_gradients(const GcnModel& model);

/// Throws ShapeMismatch when the tensors do not fit the model.
Prediction forward(const GcnModel& model, const GraphTensors& tensors, ForwardCache* cache = nullptr);
Prediction predict(const GcnModel& model, const GraphTensors& tensors);

/// Mean over labeled component rows of -log p(true class). Throws NoLabeledNodes.
double loss(const Prediction& pred, std::span<const int> labels);

std::size_t labeled_count(const GraphTensors& tensors);

/// Gradients of `scale * sum_i -log p_i(y_i)` over labeled component rows,
/// accumulated into `grads`. With scale = 1 / labeled_count this is the
/// gradient of loss().
void backward(const GcnModel& model, const ForwardCache& cache, std::span<const int> labels,
              const std::vector<bool>& component_mask, double scale, Gradients& grads);

Gradients backward(const GcnModel& model, const ForwardCache& cache, const GraphTensors& tensors);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double val_accuracy = -1.0;  // negative when not evaluated this epoch
};

struct TrainResult {
  GcnModel model;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Full-batch gradient descent on the mean loss over every labeled component
/// in `dataset`. Deterministic for a fixed model and dataset.
/// Throws EmptyCorpus, NoLabeledNodes, NonFiniteLoss.
TrainResult train(GcnModel model, const std::vector<GraphTensors>& dataset,
                  const std::vector<GraphTensors>& validation = {}, const EpochCallback& on_epoch = {});

/// Fraction of labeled component rows whose argmax matches the label.
double accuracy(const GcnModel& model, const std::vector<GraphTensors>& dataset);

std::string training_log_csv(const std::vector<EpochRecord>& history);

}  // namespace lvcheck
