#include "lvcheck/gcn.hpp"

#include "gcn_support.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace lvcheck;
using lvtest::error_code_of;
using lvtest::make_tensors;

namespace {

GcnConfig small_config(std::size_t n, std::size_t in_dim, std::vector<std::size_t> hidden, std::size_t blocks) {
  GcnConfig c;
  c.n_nodes = n;
  c.in_dim = in_dim;
  c.hidden_dims = std::move(hidden);
  c.n_blocks = blocks;
  c.n_conv_per_block = c.hidden_dims.size() / blocks;
  c.fc_dim = c.hidden_dims.back();
  c.eval_every = 0;
  return c;
}

Matrix from_rows(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// 0 - 1 - 2 with unit weights.
GraphTensors path3() {
  return make_tensors(3, 3, {{0, 1, 1.0}, {1, 2, 1.0}}, from_rows({{1, 0}, {0, 1}, {1, 1}}), {0, 1, 2});
}

// Two clusters whose features separate the labels.
GraphTensors separable6() {
  return make_tensors(6, 6, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}},
                      from_rows({{1, 0}, {1, 0.1}, {0.9, 0}, {0, 1}, {0.1, 1}, {0, 0.9}}), {0, 0, 0, 4, 4, 4});
}

double relu(double x) { return x > 0 ? x : 0; }

}  // namespace

TEST_SUITE("gcn") {
  TEST_CASE("zero features give a uniform distribution") {
    GcnModel m = init_model(small_config(4, 3, {8, 4}, 2));
    const auto t = make_tensors(4, 3, {{0, 1, 1.0}, {1, 2, 0.5}}, Matrix(3, 3), {0, 1, 2});
    const Prediction p = predict(m, t);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t k = 0; k < 5; ++k) CHECK(p.probs(i, k) == doctest::Approx(0.2).epsilon(1e-15));
      CHECK(p.class_of[i] == 0);  // ties resolve to the lowest index
    }
    CHECK(loss(p, t.labels) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  }

  TEST_CASE("single node graph") {
    GcnConfig cfg = small_config(1, 1, {1}, 1);
    GcnModel m = init_model(cfg);
    m.conv_weights[0](0, 0) = 1.0;
    for (auto& w : m.fc_weight.data()) w = 0.0;
    for (auto& b : m.fc_bias) b = 0.0;
    m.fc_weight(0, 2) = 3.0;
    const auto t = make_tensors(1, 1, {}, from_rows({{0.5}}), {2});
    const Prediction p = predict(m, t);
    double sum = 0;
    for (std::size_t k = 0; k < 5; ++k) sum += p.probs(0, k);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    // A_hat = [1]: H1 = 0.5, logits = (0, 0, 1.5, 0, 0)
    const double e = std::exp(1.5);
    CHECK(p.probs(0, 2) == doctest::Approx(e / (e + 4.0)).epsilon(1e-14));
    CHECK(p.class_of[0] == 2);
  }

  TEST_CASE("saturated softmax gives vanishing gradients") {
    GcnModel m = init_model(small_config(6, 2, {4, 3}, 2));
    auto t = separable6();
    t.labels.assign(6, 1);
    m.fc_bias[1] = std::log(1e9 * 4);  // p(true) ~ 1 - 1e-9 with near-zero logits elsewhere
    for (auto& w : m.fc_weight.data()) w = 0.0;
    ForwardCache cache;
    const Prediction p = forward(m, t, &cache);
    CHECK(p.probs(0, 1) == doctest::Approx(1.0 - 1e-9).epsilon(1e-12));
    for (double g : lvtest::flatten(backward(m, cache, t))) CHECK(std::abs(g) < 1e-8);
  }

  TEST_CASE("one conv layer on a path matches a hand computation") {
    GcnConfig cfg = small_config(3, 2, {2}, 1);
    cfg.pooling = Pooling::None;
    GcnModel m = init_model(cfg);
    m.conv_weights[0] = from_rows({{1, -1}, {0.5, 2}});
    ForwardCache cache;
    forward(m, path3(), &cache);

    const double a = 1.0 / std::sqrt(6.0);
    const double xw[3][2] = {{1, -1}, {0.5, 2}, {1.5, 1}};
    const double ahat[3][3] = {{0.5, a, 0}, {a, 1.0 / 3.0, a}, {0, a, 0.5}};
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) {
        double s = 0;
        for (int j = 0; j < 3; ++j) s += ahat[i][j] * xw[j][c];
        CHECK(std::abs(cache.fc_input(i, c) - relu(s)) < 1e-12);
      }
    }
  }

  TEST_CASE("pooling takes the neighborhood maximum between blocks") {
    GcnConfig cfg = small_config(3, 2, {2, 2}, 2);
    GcnModel m = init_model(cfg);
    m.conv_weights[0] = from_rows({{1, -1}, {0.5, 2}});
    m.conv_weights[1] = from_rows({{1, 0}, {0, 1}});
    ForwardCache cache;
    forward(m, path3(), &cache);

    const double a = 1.0 / std::sqrt(6.0);
    const double ahat[3][3] = {{0.5, a, 0}, {a, 1.0 / 3.0, a}, {0, a, 0.5}};
    const double xw[3][2] = {{1, -1}, {0.5, 2}, {1.5, 1}};
    double h1[3][2], pooled[3][2];
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) {
        double s = 0;
        for (int j = 0; j < 3; ++j) s += ahat[i][j] * xw[j][c];
        h1[i][c] = relu(s);
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) {
        double best = -1;
        for (int j = 0; j < 3; ++j) {
          if (ahat[i][j] != 0) best = std::max(best, h1[j][c]);
        }
        pooled[i][c] = best;
      }
    }
    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 2; ++c) {
        double s = 0;
        for (int j = 0; j < 3; ++j) s += ahat[i][j] * pooled[j][c];
        CHECK(std::abs(cache.fc_input(i, c) - relu(s)) < 1e-12);
      }
    }
  }

  TEST_CASE("loss is the mean cross-entropy over labeled components") {
    std::mt19937_64 rng(11);
    GcnModel m = init_model(small_config(8, 4, {6, 5}, 2));
    const auto t = lvtest::random_tensors(rng, 8, 6, 4);
    const Prediction p = predict(m, t);
    double sum = 0;
    int count = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      if (!t.component_mask[i]) continue;
      double z = 0;
      for (std::size_t k = 0; k < 5; ++k) z += p.probs(i, k);
      CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
      sum -= std::log(p.probs(i, static_cast<std::size_t>(t.labels[i])));
      ++count;
    }
    CHECK(loss(p, t.labels) == doctest::Approx(sum / count).epsilon(1e-14));
    CHECK(count == 5);  // one row is a container
  }

  TEST_CASE("analytic gradients match central differences") {
    std::mt19937_64 rng(5);
    struct Variant {
      bool use_fc;
      Pooling pooling;
      std::vector<std::size_t> hidden;
      std::size_t blocks;
    };
    const std::vector<Variant> variants{
        {true, Pooling::NeighborhoodMax, {6, 5}, 2},
        {true, Pooling::None, {6, 5}, 2},
        {false, Pooling::NeighborhoodMax, {6, 5}, 2},
        {true, Pooling::NeighborhoodMax, {5, 4, 4, 3}, 2},
    };
    for (const auto& v : variants) {
      for (int rep = 0; rep < 3; ++rep) {
        GcnConfig cfg = small_config(8, 4, v.hidden, v.blocks);
        cfg.use_fc = v.use_fc;
        cfg.pooling = v.pooling;
        cfg.seed = rng();
        GcnModel m = init_model(cfg);
        for (auto& b : m.fc_bias) b = 0.1 * static_cast<double>(rng() % 7);
        const auto t = lvtest::random_tensors(rng, 8, 3 + rng() % 6, 4);
        const auto r = lvtest::check_gradients(m, t);
        CHECK(r.max_rel_error < 1e-4);
        CHECK(r.checked > 0);
      }
    }
  }

  TEST_CASE("unlabeled and padded rows contribute nothing") {
    std::mt19937_64 rng(8);
    GcnModel m = init_model(small_config(8, 4, {6, 5}, 2));
    auto t = lvtest::random_tensors(rng, 8, 6, 4);
    ForwardCache cache;
    forward(m, t, &cache);
    const Gradients g1 = backward(m, cache, t);
    auto t2 = t;
    t2.labels[5] = 2;  // container row
    t2.labels[7] = 1;  // padded row
    forward(m, t2, &cache);
    const Gradients g2 = backward(m, cache, t2);
    CHECK(lvtest::flatten(g1) == lvtest::flatten(g2));

    t2.labels[0] = -1;
    forward(m, t2, &cache);
    const Gradients g3 = backward(m, cache, t2);
    CHECK(lvtest::flatten(g1) != lvtest::flatten(g3));
  }

  TEST_CASE("zero learning rate leaves the weights unchanged") {
    GcnConfig cfg = small_config(6, 2, {4, 3}, 2);
    cfg.learning_rate = 0.0;
    cfg.epochs = 5;
    const GcnModel m = init_model(cfg);
    const TrainResult r = train(m, {separable6()});
    CHECK(r.model == m);
    CHECK(r.history.size() == 5);
    CHECK(r.history.front().loss == r.history.back().loss);
  }

  TEST_CASE("training is deterministic and learns a separable fixture") {
    GcnConfig cfg = small_config(6, 2, {8, 4}, 2);
    cfg.learning_rate = 0.5;
    cfg.epochs = 300;
    const TrainResult a = train(init_model(cfg), {separable6()});
    const TrainResult b = train(init_model(cfg), {separable6()});
    CHECK(a.model == b.model);
    for (const auto& e : a.history) CHECK(std::isfinite(e.loss));
    CHECK(a.history.back().loss < a.history.front().loss);
    CHECK(accuracy(a.model, {separable6()}) == 1.0);

    cfg.seed = 99;
    CHECK_FALSE(init_model(cfg) == init_model(small_config(6, 2, {8, 4}, 2)));
  }

  TEST_CASE("validation accuracy is logged at the configured cadence") {
    GcnConfig cfg = small_config(6, 2, {4, 3}, 2);
    cfg.epochs = 10;
    cfg.eval_every = 5;
    std::vector<std::size_t> seen;
    const TrainResult r =
        train(init_model(cfg), {separable6()}, {separable6()}, [&](const EpochRecord& e) { seen.push_back(e.epoch); });
    CHECK(seen.size() == 10);
    CHECK(r.history[4].val_accuracy >= 0.0);
    CHECK(r.history[3].val_accuracy < 0.0);
    const std::string csv = training_log_csv(r.history);
    CHECK(csv.rfind("epoch,loss,val_accuracy\n1,", 0) == 0);
  }

  TEST_CASE("glorot initialization bounds") {
    GcnModel m = init_model(GcnConfig{});
    const double s0 = std::sqrt(6.0 / (14 + 64));
    for (double v : m.conv_weights[0].data()) CHECK(std::abs(v) <= s0);
    for (double v : m.fc_bias) CHECK(v == 0.0);
    CHECK(m.fc_weight.rows() == 32);
    CHECK(m.fc_weight.cols() == 5);
  }

  TEST_CASE("without the FC layer the last conv emits class scores") {
    GcnConfig cfg;
    cfg.use_fc = false;
    GcnModel m = init_model(cfg);
    CHECK(m.conv_weights.back().cols() == 5);
    CHECK(m.fc_weight.empty());
    CHECK(m.fc_bias.empty());
  }

  TEST_CASE("errors") {
    GcnModel m = init_model(small_config(6, 2, {4, 3}, 2));
    const auto t = make_tensors(5, 3, {{0, 1, 1.0}}, Matrix(3, 2), {0, 1, 2});
    CHECK(error_code_of([&] { predict(m, t); }) == ErrorCode::ShapeMismatch);

    GcnConfig bad = small_config(6, 2, {4, 3}, 2);
    bad.hidden_dims = {4, 3, 2};
    CHECK(error_code_of([&] { init_model(bad); }) == ErrorCode::BadConfig);
    bad = small_config(6, 2, {4, 3}, 2);
    bad.fc_dim = 7;
    CHECK(error_code_of([&] { init_model(bad); }) == ErrorCode::BadConfig);
    bad = small_config(6, 2, {4, 3}, 2);
    bad.learning_rate = -1;
    CHECK(error_code_of([&] { init_model(bad); }) == ErrorCode::BadConfig);

    CHECK(error_code_of([&] { train(m, {}); }) == ErrorCode::EmptyCorpus);
    auto unlabeled = separable6();
    unlabeled.labels.assign(6, -1);
    CHECK(error_code_of([&] { train(m, {unlabeled}); }) == ErrorCode::NoLabeledNodes);

    GcnConfig hot = small_config(6, 2, {4, 3}, 2);
    hot.learning_rate = 1e300;
    hot.epochs = 3;
    auto big = separable6();
    for (auto& v : big.features.data()) v *= 1e3;
    CHECK(error_code_of([&] { train(init_model(hot), {big}); }) == ErrorCode::NonFiniteLoss);
  }
}
