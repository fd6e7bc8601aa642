#pragma once

#include "lvcheck/corpus.hpp"
#include "lvcheck/features.hpp"
#include "lvcheck/gcn.hpp"
#include "lvcheck/graph.hpp"
#include "lvcheck/layout.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lvcheck {

struct PipelineOptions {
  VisibilityRules visibility;
  GraphOptions graph;
  FeatureConfig features;
  AttributeMask mask = AttributeMask::None;
  std::size_t threshold = kDefaultThreshold;
};

/// Everything the CLI reads from --config: pipeline knobs, model
/// hyperparameters and the corpus spec. JSON only.
struct ToolConfig {
  PipelineOptions pipeline;
  GcnConfig gcn;
  CorpusSpec corpus;
  SplitRatios split;
  std::uint64_t split_seed = 1;
};

/// Throws BadConfig on unknown keys or wrongly typed values.
ToolConfig parse_tool_config(const std::string& json_text);
ToolConfig load_tool_config(const std::string& path);

struct PreparedGui {
  LayoutTree filtered;
  GuiGraph graph;
  GraphTensors tensors;
};

/// filter -> graph -> labels -> features -> padded tensors.
PreparedGui prepare(const LayoutTree& tree, const std::map<std::string, int>* labels,
                    const PipelineOptions& opts = {});

struct CorpusTensors {
  std::vector<GraphTensors> tensors;
  std::vector<std::string> names;  // GUI name per tensor
  std::vector<std::string> skipped;  // GUIs without component-nodes
};

/// Parses and prepares every labeled GUI. EmptyGui files are skipped and
/// listed; other errors propagate.
CorpusTensors corpus_tensors(const Corpus& corpus, const PipelineOptions& opts = {});

}  // namespace lvcheck
