#pragma once

#include "lvcheck/color.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lvcheck {

struct Rect {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  int width() const noexcept { return x2 - x1; }
  int height() const noexcept { return y2 - y1; }
  bool operator==(const Rect&) const = default;
  auto operator<=>(const Rect&) const = default;
};

/// Parses the uiautomator wire format "[x1,y1][x2,y2]". Throws BadBounds.
Rect parse_bounds(std::string_view text);
std::string format_bounds(const Rect& r);

/// Chebyshev clearance between two rectangles: the larger of the horizontal
/// and vertical separations, 0 when they touch or overlap.
int rect_gap(const Rect& a, const Rect& b);

/// One `<node>` element. The last four booleans belong to the extended
/// dialect written by the corpus generator; plain uiautomator dumps leave
/// them unset (false).
struct RawView {
  std::string view_class;
  std::optional<std::string> resource_id;
  Rect bounds;
  std::optional<std::string> text;
  bool clickable = false;
  bool focusable = false;
  bool focused = false;
  bool selected = false;
  std::optional<Rgb> fg_color;
  std::optional<Rgb> bg_color;
  bool text_resizable = false;
  bool auxiliary_technology = false;
  bool text_alternative = false;
  bool alert = false;
  std::map<std::string, std::string> extra;
  std::vector<RawView> children;

  bool operator==(const RawView&) const = default;
};

struct LayoutTree {
  std::optional<RawView> root;
  std::string source_path;

  bool empty() const noexcept { return !root.has_value(); }
  std::size_t view_count() const;
  /// Pre-order (document order) list of every view.
  std::vector<const RawView*> preorder() const;
};

LayoutTree parse_layout(std::string_view xml_bytes, std::string source_path = {});
LayoutTree load_layout(const std::string& path);

/// Canonical form: two-space indent, attributes sorted by name.
std::string serialize_layout(const LayoutTree& tree);

/// Class-name suffixes dropped as invisible; matched case-insensitively.
struct VisibilityRules {
  std::vector<std::string> invisible_suffixes{"RecyclerView", "DrawerLayout", "ViewPager"};
};

LayoutTree filter_visible(const LayoutTree& tree, const VisibilityRules& rules = {});

/// True when `view_class` ends with `suffix`, ignoring ASCII case.
bool class_has_suffix(std::string_view view_class, std::string_view suffix);

enum class ComponentKind { Button, Text, Image, List, Search };

std::string_view to_string(ComponentKind kind);

/// Maps a view class onto one of the five component kinds by suffix
/// (Button, TextView, ImageView, ListView, SearchView). Anything else is
/// structural or ignored.
std::optional<ComponentKind> component_kind(std::string_view view_class);

}  // namespace lvcheck
