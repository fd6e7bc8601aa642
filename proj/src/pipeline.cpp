#include "lvcheck/pipeline.hpp"
#include "lvcheck/checkpoint.hpp"
#include "lvcheck/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lvcheck {

using nlohmann::json;

ToolConfig parse_tool_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::BadConfig, "config must be a JSON object");
  static const std::set<std::string> sections{"threshold", "adjacency_gap_px", "invisible_classes", "features",
                                              "attribute_mask", "gcn", "corpus", "split"};
  for (const auto& [k, v] : j.items()) {
    if (!sections.contains(k)) throw Error(ErrorCode::BadConfig, "unknown config key \"" + k + "\"");
  }

  ToolConfig cfg;
  try {
    auto& p = cfg.pipeline;
    if (j.contains("threshold")) p.threshold = j["threshold"].get<std::size_t>();
    if (j.contains("adjacency_gap_px")) p.graph.adjacency_gap_px = j["adjacency_gap_px"].get<int>();
    if (j.contains("invisible_classes")) {
      p.visibility.invisible_suffixes = j["invisible_classes"].get<std::vector<std::string>>();
    }
    if (j.contains("attribute_mask")) p.mask = parse_attribute_mask(j["attribute_mask"].get<std::string>());
    if (j.contains("features")) {
      const auto& f = j["features"];
      for (const auto& [k, v] : f.items()) {
        if (k != "size_scale" && k != "x_scale" && k != "y_scale" && k != "contrast_scale") {
          throw Error(ErrorCode::BadConfig, "unknown features key \"" + k + "\"");
        }
      }
      p.features.size_scale = f.value("size_scale", p.features.size_scale);
      p.features.x_scale = f.value("x_scale", p.features.x_scale);
      p.features.y_scale = f.value("y_scale", p.features.y_scale);
      p.features.contrast_scale = f.value("contrast_scale", p.features.contrast_scale);
    }
    if (j.contains("gcn")) cfg.gcn = config_from_json(j["gcn"]);
    if (j.contains("corpus")) cfg.corpus = corpus_spec_from_json(j["corpus"]);
    if (j.contains("split")) {
      const auto& s = j["split"];
      cfg.split.train = s.value("train", cfg.split.train);
      cfg.split.val = s.value("val", cfg.split.val);
      cfg.split.test = s.value("test", cfg.split.test);
      cfg.split_seed = s.value("seed", cfg.split_seed);
      for (const auto& [k, v] : s.items()) {
        if (k != "train" && k != "val" && k != "test" && k != "seed") {
          throw Error(ErrorCode::BadConfig, "unknown split key \"" + k + "\"");
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  // The padding threshold is a single knob shared by tensors and model.
  if (j.contains("threshold") && !(j.contains("gcn") && j["gcn"].contains("n_nodes"))) {
    cfg.gcn.n_nodes = cfg.pipeline.threshold;
  }
  if (cfg.gcn.n_nodes != cfg.pipeline.threshold) {
    throw Error(ErrorCode::BadConfig, "gcn.n_nodes must equal threshold");
  }
  if (cfg.pipeline.features.size_scale <= 0 || cfg.pipeline.features.x_scale <= 0 ||
      cfg.pipeline.features.y_scale <= 0 || cfg.pipeline.features.contrast_scale <= 1) {
    throw Error(ErrorCode::BadConfig, "feature scales must be positive (contrast_scale > 1)");
  }
  return cfg;
}

ToolConfig load_tool_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tool_config(buf.str());
}

PreparedGui prepare(const LayoutTree& tree, const std::map<std::string, int>* labels, const PipelineOptions& opts) {
  PreparedGui out;
  out.filtered = filter_visible(tree, opts.visibility);
  out.graph = build_graph(out.filtered, opts.graph);
  if (labels) {
    for (auto& c : out.graph.components) {
      if (auto it = labels->find(c.resource_id); it != labels->end()) {
        to_issue_class(it->second);  // validates the index
        c.label = it->second;
      }
    }
  }
  Matrix x = feature_matrix(out.graph, opts.mask, opts.features, opts.threshold);
  out.tensors = to_tensors(out.graph, std::move(x), opts.threshold);
  return out;
}

CorpusTensors corpus_tensors(const Corpus& corpus, const PipelineOptions& opts) {
  CorpusTensors out;
  for (const auto& gui : corpus) {
    try {
      const LayoutTree tree = parse_layout(gui.xml, gui.name);
      PreparedGui p = prepare(tree, &gui.labels, opts);
      out.tensors.push_back(std::move(p.tensors));
      out.names.push_back(gui.name);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyGui) throw;
      out.skipped.push_back(gui.name);
    }
  }
  return out;
}

}  // namespace lvcheck
