#include "lvcheck/checkpoint.hpp"
#include "lvcheck/corpus.hpp"
#include "lvcheck/error.hpp"
#include "lvcheck/features.hpp"
#include "lvcheck/gcn.hpp"
#include "lvcheck/graph.hpp"
#include "lvcheck/layout.hpp"
#include "lvcheck/pipeline.hpp"
#include "lvcheck/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lvcheck;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

ToolConfig load_config(const Common& c) {
  return c.config_path.empty() ? ToolConfig{} : load_tool_config(c.config_path);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + c.out);
  f << text;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
  f << text;
}

void add_common(CLI::App* cmd, Common& c, bool with_seed, bool with_format) {
  cmd->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output path (stdout when omitted)");
  if (with_seed) cmd->add_option("--seed", c.seed, "random seed");
  if (with_format) cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "text"}));
}

Corpus select_split(const Corpus& all, const ToolConfig& cfg, const std::string& which) {
  if (which == "all") return all;
  CorpusSplit s = split(all, cfg.split, cfg.split_seed);
  if (which == "train") return s.train;
  if (which == "val") return s.val;
  return s.test;
}

int run_check(const std::vector<std::string>& layouts, const std::string& model_path, const Common& c,
              const std::string& svg_dir, bool dump_tree) {
  const ToolConfig cfg = load_config(c);
  const GcnModel model = read_model_file(model_path);
  if (!svg_dir.empty()) fs::create_directories(svg_dir);

  ordered_json reports = ordered_json::array();
  ordered_json errors = ordered_json::array();
  std::string text;
  std::size_t failed = 0;
  bool issues = false;
  for (const auto& path : layouts) {
    try {
      const LayoutTree tree = load_layout(path);
      PreparedGui p = prepare(tree, nullptr, cfg.pipeline);
      if (dump_tree) std::cerr << serialize_layout(p.filtered);
      const IssueReport r = build_report(p.graph, predict(model, p.tensors), path);
      issues = issues || !r.clean();
      reports.push_back(report_json(r));
      text += render_report_text(r);
      if (!svg_dir.empty()) {
        Canvas canvas;
        if (tree.root) canvas = {tree.root->bounds.width(), tree.root->bounds.height()};
        write_file(fs::path(svg_dir) / (fs::path(path).stem().string() + ".svg"), overlay_svg(r, canvas));
      }
    } catch (const Error& e) {
      ++failed;
      errors.push_back({{"source", path}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}});
      std::cerr << "lvcheck: " << path << ": " << e.what() << '\n';
    }
  }
  if (c.format == "json") {
    ordered_json doc;
    doc["reports"] = std::move(reports);
    doc["errors"] = std::move(errors);
    emit(c, doc.dump(2) + "\n");
  } else {
    emit(c, text);
  }
  if (failed == layouts.size()) return 2;
  return issues ? 1 : 0;
}

int run_train(const std::string& corpus_dir, const Common& c, const std::string& log_path,
              std::optional<std::size_t> epochs, bool quiet) {
  ToolConfig cfg = load_config(c);
  if (c.seed) cfg.gcn.seed = *c.seed;
  if (epochs) cfg.gcn.epochs = *epochs;
  const Corpus all = read_corpus(corpus_dir);
  const CorpusSplit parts = split(all, cfg.split, cfg.split_seed);
  const CorpusTensors train_set = corpus_tensors(parts.train, cfg.pipeline);
  const CorpusTensors val_set = corpus_tensors(parts.val, cfg.pipeline);

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result = train(init_model(cfg.gcn), train_set.tensors, val_set.tensors, [&](const EpochRecord& r) {
    if (quiet || r.val_accuracy < 0) return;
    std::cerr << "epoch " << r.epoch << "  loss " << r.loss << "  val_accuracy " << r.val_accuracy << '\n';
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  emit(c, save_model(result.model));
  if (!log_path.empty()) write_file(log_path, training_log_csv(result.history));
  if (!quiet) {
    std::cerr << "trained on " << train_set.tensors.size() << " GUIs (" << train_set.skipped.size()
              << " skipped) in " << secs << " s";
    if (!val_set.tensors.empty()) std::cerr << "; validation accuracy " << accuracy(result.model, val_set.tensors);
    std::cerr << '\n';
  }
  return 0;
}

int run_eval(const std::string& corpus_dir, const std::string& model_path, const Common& c,
             const std::string& which, bool per_class) {
  const ToolConfig cfg = load_config(c);
  const GcnModel model = read_model_file(model_path);
  const Corpus part = select_split(read_corpus(corpus_dir), cfg, which);
  const CorpusTensors data = corpus_tensors(part, cfg.pipeline);
  std::vector<int> predicted;
  std::vector<int> gold;
  for (const auto& t : data.tensors) {
    const Prediction p = predict(model, t);
    for (std::size_t i = 0; i < t.n(); ++i) {
      if (!t.component_mask[i] || t.labels[i] < 0) continue;
      predicted.push_back(p.class_of[i]);
      gold.push_back(t.labels[i]);
    }
  }
  const MetricsResult m = evaluate(predicted, gold);
  emit(c, c.format == "json" ? metrics_json(m, per_class).dump(2) + "\n" : render_metrics_text(m, per_class));
  return 0;
}

int run_gen_corpus(const Common& c, std::optional<std::size_t> n) {
  ToolConfig cfg = load_config(c);
  if (c.seed) cfg.corpus.seed = *c.seed;
  if (n) cfg.corpus.n_guis = *n;
  if (c.out.empty()) throw Error(ErrorCode::BadConfig, "gen-corpus needs --out DIR");
  write_corpus(c.out, generate(cfg.corpus), cfg.corpus);
  return 0;
}

PreparedGui prepare_file(const std::string& layout, const std::string& labels_path, const ToolConfig& cfg) {
  const LayoutTree tree = load_layout(layout);
  std::map<std::string, int> labels;
  if (!labels_path.empty()) {
    std::ifstream in(labels_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + labels_path);
    labels = nlohmann::json::parse(in).get<std::map<std::string, int>>();
  }
  return prepare(tree, labels_path.empty() ? nullptr : &labels, cfg.pipeline);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lvcheck: low-vision accessibility checker for mobile GUI layouts"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> layouts;
  std::string model_path, corpus_dir, svg_dir, log_path, labels_path, which = "all";
  bool dump_tree = false, per_class = false, quiet = false;
  std::optional<std::size_t> epochs, n_guis;

  auto* check = app.add_subcommand("check", "report accessibility issues in layout files");
  check->add_option("layouts", layouts, "layout XML files")->required()->check(CLI::ExistingFile);
  check->add_option("--model", model_path, "model checkpoint")->required()->check(CLI::ExistingFile);
  check->add_option("--svg", svg_dir, "write one overlay SVG per layout into this directory");
  check->add_flag("--dump-tree", dump_tree, "print the filtered tree as canonical XML to stderr");
  add_common(check, common, false, true);

  auto* train_cmd = app.add_subcommand("train", "train a model on a generated corpus");
  train_cmd->add_option("--corpus", corpus_dir, "corpus directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--log", log_path, "training log CSV");
  train_cmd->add_option("--epochs", epochs, "override the configured epoch count");
  train_cmd->add_flag("--quiet", quiet, "suppress progress output");
  add_common(train_cmd, common, true, false);

  auto* eval_cmd = app.add_subcommand("eval", "score a model against corpus labels");
  eval_cmd->add_option("--corpus", corpus_dir, "corpus directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--model", model_path, "model checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", which, "corpus part to score")->check(CLI::IsMember({"all", "train", "val", "test"}));
  eval_cmd->add_flag("--per-class", per_class, "include the 5x5 confusion matrix");
  add_common(eval_cmd, common, false, true);

  auto* gen = app.add_subcommand("gen-corpus", "generate a labeled synthetic corpus");
  gen->add_option("--n", n_guis, "number of GUIs");
  add_common(gen, common, true, false);

  auto* info = app.add_subcommand("model-info", "describe a model checkpoint");
  info->add_option("--model", model_path, "model checkpoint")->required()->check(CLI::ExistingFile);
  add_common(info, common, false, false);

  auto* dump_graph = app.add_subcommand("dump-graph", "print the GUI graph of a layout as JSON");
  dump_graph->add_option("layout", layouts, "layout XML file")->required()->expected(1)->check(CLI::ExistingFile);
  add_common(dump_graph, common, false, false);

  auto* dump_features = app.add_subcommand("dump-features", "print the feature matrix of a layout as CSV");
  dump_features->add_option("layout", layouts, "layout XML file")->required()->expected(1)->check(CLI::ExistingFile);
  dump_features->add_option("--labels", labels_path, "labels.json to fill the label column")
      ->check(CLI::ExistingFile);
  add_common(dump_features, common, false, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return run_check(layouts, model_path, common, svg_dir, dump_tree);
    if (*train_cmd) return run_train(corpus_dir, common, log_path, epochs, quiet);
    if (*eval_cmd) return run_eval(corpus_dir, model_path, common, which, per_class);
    if (*gen) return run_gen_corpus(common, n_guis);
    if (*info) {
      emit(common, model_info(read_model_file(model_path)));
      return 0;
    }
    const ToolConfig cfg = load_config(common);
    PreparedGui p = prepare_file(layouts.front(), labels_path, cfg);
    if (*dump_graph) emit(common, dump_graph_json(p.graph));
    else emit(common, dump_features_csv(p.graph, p.tensors.features));
    return 0;
  } catch (const Error& e) {
    std::cerr << "lvcheck: " << to_string(e.code()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "lvcheck: " << e.what() << '\n';
  }
  return 2;
}
