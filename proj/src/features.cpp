#include "lvcheck/features.hpp"
#include "lvcheck/error.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace lvcheck {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
double bit(bool b) { return b ? 1.0 : 0.0; }

void check_class(int c) {
  if (c < 0 || c >= kNumClasses) throw Error(ErrorCode::InvalidClass, "class index " + std::to_string(c));
}

}  // namespace

std::string_view class_name(int class_index) {
  check_class(class_index);
  static constexpr std::array<std::string_view, kNumClasses> names{
      "small size", "narrow interval", "low color contrast", "unclear alert information", "accessible"};
  return names[static_cast<std::size_t>(class_index)];
}

IssueClass to_issue_class(int class_index) {
  check_class(class_index);
  return static_cast<IssueClass>(class_index);
}

ReservedBits encode_labels(std::optional<int> class_index) {
  if (!class_index) return std::nullopt;
  check_class(*class_index);
  std::array<bool, 4> bits{};
  if (*class_index < 4) bits[static_cast<std::size_t>(*class_index)] = true;
  return bits;
}

std::optional<int> decode_labels(const ReservedBits& bits) {
  if (!bits) return std::nullopt;
  const auto set = std::count(bits->begin(), bits->end(), true);
  if (set > 1) throw Error(ErrorCode::InvalidClass, "more than one reserved bit set");
  if (set == 0) return static_cast<int>(IssueClass::Accessible);
  return static_cast<int>(std::find(bits->begin(), bits->end(), true) - bits->begin());
}

const std::array<std::string_view, kFeatureDim>& feature_names() {
  static constexpr std::array<std::string_view, kFeatureDim> names{
      "text_size", "component_size", "text_resizable", "auxiliary_technology", "text_alternative",
      "intuitive", "focusable",      "focused",        "selected",             "bounds_x1",
      "bounds_y1", "bounds_x2",      "bounds_y2",      "clickable"};
  return names;
}

FeatureVector encode_component(const ComponentNode& node) {
  const RawView& v = node.raw;
  FeatureVector f;
  f.width = node.bounds.width();
  f.height = node.bounds.height();
  // Layout files carry no font metrics; the text box height stands in.
  f.text_size = node.kind == ComponentKind::Text ? f.height : 0.0;
  f.text_resizable = v.text_resizable;
  f.auxiliary_technology = v.auxiliary_technology;
  f.text_alternative = v.text_alternative;
  f.intuitive = contrast_ratio(v.fg_color.value_or(kDefaultForeground), v.bg_color.value_or(kDefaultBackground));
  f.focusable = v.focusable;
  f.focused = v.focused;
  f.selected = v.selected;
  f.bounds = node.bounds;
  f.clickable = v.clickable;
  f.reserved = encode_labels(node.label);
  return f;
}

std::array<double, kFeatureDim> scale_features(const FeatureVector& f, const FeatureConfig& cfg) {
  return {
      clamp01(f.text_size / cfg.size_scale),
      clamp01(std::min(f.width, f.height) / cfg.size_scale),
      bit(f.text_resizable),
      bit(f.auxiliary_technology),
      bit(f.text_alternative),
      clamp01((f.intuitive - 1.0) / (cfg.contrast_scale - 1.0)),
      bit(f.focusable),
      bit(f.focused),
      bit(f.selected),
      clamp01(f.bounds.x1 / cfg.x_scale),
      clamp01(f.bounds.y1 / cfg.y_scale),
      clamp01(f.bounds.x2 / cfg.x_scale),
      clamp01(f.bounds.y2 / cfg.y_scale),
      bit(f.clickable),
  };
}

std::string_view to_string(AttributeMask m) {
  switch (m) {
    case AttributeMask::None: return "none";
    case AttributeMask::Accessibility: return "accessibility";
    case AttributeMask::Inherent: return "inherent";
  }
  return "none";
}

AttributeMask parse_attribute_mask(std::string_view s) {
  if (s == "none") return AttributeMask::None;
  if (s == "accessibility") return AttributeMask::Accessibility;
  if (s == "inherent") return AttributeMask::Inherent;
  throw Error(ErrorCode::BadConfig, "unknown attribute mask \"" + std::string(s) + "\"");
}

Matrix feature_matrix(const GuiGraph& graph, AttributeMask mask, const FeatureConfig& cfg, std::size_t threshold) {
  if (graph.n_real() > threshold) {
    throw Error(ErrorCode::TooManyNodes, std::to_string(graph.n_real()) + " nodes exceed threshold " +
                                             std::to_string(threshold));
  }
  Matrix x(threshold, kFeatureDim);
  for (const auto& c : graph.components) {
    const auto row = scale_features(encode_component(c), cfg);
    auto out = x.row(static_cast<std::size_t>(c.node_id));
    for (std::size_t k = 0; k < kFeatureDim; ++k) {
      const bool accessibility = k < kAccessibilityColumns;
      const bool masked = (mask == AttributeMask::Accessibility && accessibility) ||
                          (mask == AttributeMask::Inherent && !accessibility);
      out[k] = masked ? 0.0 : row[k];
    }
  }
  return x;
}

std::string dump_features_csv(const GuiGraph& graph, const Matrix& features) {
  std::vector<int> labels(graph.n_real(), -1);
  for (const auto& c : graph.components) {
    if (c.label) labels[static_cast<std::size_t>(c.node_id)] = *c.label;
  }
  std::ostringstream os;
  os << "node_id";
  for (auto name : feature_names()) os << ',' << name;
  os << ",label\n";
  char buf[32];
  for (std::size_t i = 0; i < graph.n_real(); ++i) {
    os << i;
    for (std::size_t k = 0; k < features.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.6f", features(i, k));
      os << ',' << buf;
    }
    os << ',' << labels[i] << '\n';
  }
  return os.str();
}

}  // namespace lvcheck
