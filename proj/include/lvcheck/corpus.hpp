#pragma once

#include "lvcheck/layout.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lvcheck {

/// Labeling predicates; the first rule that fires wins, in this order:
/// low contrast, small size, narrow interval, unclear alert.
struct OracleRules {
  int size_floor_px = 24;         // min(width, height) below this is "small size"
  int interval_floor_px = 5;      // any other component closer than this is "narrow interval"
  double contrast_floor = 4.5;    // fg/bg ratio below this is "low color contrast"
};

struct CorpusSpec {
  std::size_t n_guis = 100;
  std::size_t min_components = 3;
  std::size_t max_components = 32;
  std::size_t min_groups = 1;
  std::size_t max_groups = 5;
  // small size, narrow interval, low contrast, unclear alert; remainder is accessible.
  std::array<double, 4> issue_rates{0.1, 0.1, 0.1, 0.1};
  std::uint64_t seed = 1;
  int device_width = 1440;
  int device_height = 2560;
  std::size_t node_budget = 37;  // components + containers per GUI
  double nav_bar_rate = 0.0;     // probability that a GUI ends with a bottom navigation bar
  double nav_share = 0.0;        // probability a nav item copies its left neighbour's issue
  double similar_share = 0.8;    // probability a group item repeats the previous item's issue and style
  OracleRules rules;

  /// Throws InfeasibleSpec on inconsistent ranges or rates.
  void validate() const;
};

nlohmann::ordered_json corpus_spec_to_json(const CorpusSpec& spec);
/// Missing keys keep the values from `base`; unknown keys throw BadConfig.
CorpusSpec corpus_spec_from_json(const nlohmann::json& j, CorpusSpec base = {});

struct SyntheticGui {
  std::string name;                   // directory name, e.g. "gui_00042"
  std::string xml;
  std::map<std::string, int> labels;  // resource_id -> class index
};

using Corpus = std::vector<SyntheticGui>;

/// Deterministic: GUI i is drawn from a generator seeded by (seed, i).
/// Throws InfeasibleSpec when a GUI cannot be placed within the device.
Corpus generate(const CorpusSpec& spec);
SyntheticGui generate_gui(const CorpusSpec& spec, std::size_t index);

/// Re-derives a component label from the serialized XML alone.
/// Throws UnknownComponent.
int oracle_label(std::string_view xml, std::string_view resource_id, const OracleRules& rules = {});
std::map<std::string, int> oracle_labels(std::string_view xml, const OracleRules& rules = {});
int oracle_label(const LayoutTree& tree, std::string_view resource_id, const OracleRules& rules = {});

struct SplitRatios {
  double train = 0.8;
  double val = 0.2;
  double test = 0.0;
};

struct CorpusSplit {
  Corpus train;
  Corpus val;
  Corpus test;
};

/// GUI-level seeded shuffle, then contiguous cuts. Throws EmptyCorpus, BadConfig.
CorpusSplit split(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed);

/// Directory per GUI with layout.xml and labels.json, plus manifest.json.
void write_corpus(const std::string& dir, const Corpus& corpus, const CorpusSpec& spec);
Corpus read_corpus(const std::string& dir);

}  // namespace lvcheck
