#pragma once

#include "lvcheck/gcn.hpp"
#include "lvcheck/graph.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lvcheck {

/// Fixed remediation text for classes 0-3. Throws InvalidClass otherwise.
std::string_view recommend(int class_index);

struct Finding {
  int node_id = 0;
  std::string resource_id;
  ComponentKind component_type = ComponentKind::Button;
  int issue_class = 0;
  Rect bounds;
};

struct IssueReport {
  std::string source;
  std::vector<Finding> findings;   // node_id order, classes 0-3 only
  std::array<std::size_t, 4> counts{};  // findings per issue class
  std::size_t components = 0;      // components examined

  bool clean() const { return findings.empty(); }
};

IssueReport build_report(const GuiGraph& graph, const Prediction& pred, std::string source = {});

nlohmann::ordered_json report_json(const IssueReport& report);
std::string render_report_text(const IssueReport& report);

struct Canvas {
  int width = 1440;
  int height = 2560;
};

/// Device-sized SVG: frame, one rectangle per finding, and a legend entry per
/// class present. Deterministic.
std::string overlay_svg(const IssueReport& report, const Canvas& canvas = {});

/// Binarized counts: positive means an issue (classes 0-3), negative means
/// accessible (class 4).
struct MetricsResult {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};  // [gold][pred]
  std::size_t total = 0;

  double accuracy() const;  // exact-class accuracy from the confusion matrix
};

/// Throws LengthMismatch when the vectors differ in length and InvalidClass on
/// out-of-range entries.
MetricsResult evaluate(std::span<const int> predicted, std::span<const int> gold);

/// Three decimals, "n/a" for undefined ratios.
std::string format_metric(const std::optional<double>& v);
nlohmann::ordered_json metrics_json(const MetricsResult& m, bool per_class = false);
std::string render_metrics_text(const MetricsResult& m, bool per_class = false);

}  // namespace lvcheck
