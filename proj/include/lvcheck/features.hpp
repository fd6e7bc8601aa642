#pragma once

#include "lvcheck/graph.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace lvcheck {

enum class IssueClass : int {
  SmallSize = 0,
  NarrowInterval = 1,
  LowContrast = 2,
  UnclearAlert = 3,
  Accessible = 4,
};

inline constexpr int kNumClasses = 5;

std::string_view class_name(int class_index);  // throws InvalidClass
IssueClass to_issue_class(int class_index);     // throws InvalidClass

/// Four label-storage bits: small size, narrow interval, low contrast,
/// unclear alert. All clear = accessible; nullopt = unlabeled.
using ReservedBits = std::optional<std::array<bool, 4>>;

ReservedBits encode_labels(std::optional<int> class_index);
std::optional<int> decode_labels(const ReservedBits& bits);

struct FeatureConfig {
  double size_scale = 240.0;      // px divisor for text_size / component_size, larger sizes clamp to 1
  double x_scale = 1440.0;        // device width
  double y_scale = 2560.0;        // device height
  double contrast_scale = 21.0;   // maximum contrast ratio
};

struct FeatureVector {
  double text_size = 0.0;  // px
  int width = 0;
  int height = 0;
  bool text_resizable = false;
  bool auxiliary_technology = false;
  bool text_alternative = false;
  double intuitive = 1.0;  // contrast ratio, [1, 21]
  bool focusable = false;
  bool focused = false;
  bool selected = false;
  Rect bounds;
  bool clickable = false;
  ReservedBits reserved;
};

inline constexpr std::size_t kFeatureDim = 14;
inline constexpr std::size_t kAccessibilityColumns = 9;  // columns [0, 9); the rest are inherent

const std::array<std::string_view, kFeatureDim>& feature_names();

FeatureVector encode_component(const ComponentNode& node);

/// Scales one feature vector into the 14 model columns, each in [0, 1].
std::array<double, kFeatureDim> scale_features(const FeatureVector& f, const FeatureConfig& cfg = {});

enum class AttributeMask { None, Accessibility, Inherent };

std::string_view to_string(AttributeMask m);
AttributeMask parse_attribute_mask(std::string_view s);  // throws BadConfig

/// threshold x 14; container and padded rows are zero.
Matrix feature_matrix(const GuiGraph& graph, AttributeMask mask = AttributeMask::None,
                      const FeatureConfig& cfg = {}, std::size_t threshold = kDefaultThreshold);

/// CSV: node_id, the 14 scaled columns (6 decimals), label index; one row per
/// real node in node_id order.
std::string dump_features_csv(const GuiGraph& graph, const Matrix& features);

}  // namespace lvcheck
