#include "lvcheck/layout.hpp"
#include "lvcheck/error.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

namespace lvcheck {

namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool parse_uint(std::string_view text, std::size_t& pos, int& out) {
  const char* begin = text.data() + pos;
  const char* end = text.data() + text.size();
  if (begin == end || *begin < '0' || *begin > '9') return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{}) return false;
  pos += static_cast<std::size_t>(ptr - begin);
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

bool parse_bool_attr(std::string_view name, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw Error(ErrorCode::BadAttribute,
              std::string(name) + " must be \"true\" or \"false\", got \"" + std::string(value) + "\"");
}

Rgb parse_color_attr(std::string_view name, std::string_view value) {
  auto c = parse_hex_color(value);
  if (!c) {
    throw Error(ErrorCode::BadAttribute,
                std::string(name) + " must be #RRGGBB, got \"" + std::string(value) + "\"");
  }
  return *c;
}

RawView view_from_attributes(const XML_Char** attrs) {
  RawView v;
  bool have_bounds = false;
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    const std::string_view key = attrs[i];
    const std::string_view value = attrs[i + 1];
    if (key == "class") {
      v.view_class = value;
    } else if (key == "resource-id") {
      if (!value.empty()) v.resource_id = std::string(value);
    } else if (key == "bounds") {
      v.bounds = parse_bounds(value);
      have_bounds = true;
    } else if (key == "text") {
      if (!value.empty()) v.text = std::string(value);
    } else if (key == "clickable") {
      v.clickable = parse_bool_attr(key, value);
    } else if (key == "focusable") {
      v.focusable = parse_bool_attr(key, value);
    } else if (key == "focused") {
      v.focused = parse_bool_attr(key, value);
    } else if (key == "selected") {
      v.selected = parse_bool_attr(key, value);
    } else if (key == "fg-color") {
      v.fg_color = parse_color_attr(key, value);
    } else if (key == "bg-color") {
      v.bg_color = parse_color_attr(key, value);
    } else if (key == "text-resizable") {
      v.text_resizable = parse_bool_attr(key, value);
    } else if (key == "auxiliary-technology") {
      v.auxiliary_technology = parse_bool_attr(key, value);
    } else if (key == "text-alternative") {
      v.text_alternative = parse_bool_attr(key, value);
    } else if (key == "alert") {
      v.alert = parse_bool_attr(key, value);
    } else {
      v.extra.emplace(std::string(key), std::string(value));
    }
  }
  if (!have_bounds) throw Error(ErrorCode::BadBounds, "node without bounds attribute");
  return v;
}

struct ParseState {
  XML_Parser parser = nullptr;
  // Element stack; nullptr entries stand for elements that are not <node>.
  std::vector<RawView*> stack;
  std::unique_ptr<RawView> root;
  bool saw_document_element = false;
  bool wrapped = false;
  int skip_depth = 0;
  std::optional<Error> failure;

  void fail(Error e) {
    if (!failure) failure = std::move(e);
    XML_StopParser(parser, XML_FALSE);
  }
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<ParseState*>(user);
  if (st.failure) return;
  const std::string_view tag = name;
  if (!st.saw_document_element) {
    st.saw_document_element = true;
    if (tag == "hierarchy") {
      st.wrapped = true;
      return;
    }
    if (tag != "node") {
      st.fail(Error(ErrorCode::MissingRoot, "document element is <" + std::string(tag) + ">"));
      return;
    }
  }
  if (st.skip_depth > 0 || tag != "node") {
    ++st.skip_depth;
    return;
  }
  try {
    RawView v = view_from_attributes(attrs);
    if (st.stack.empty()) {
      if (st.root) {
        st.fail(Error(ErrorCode::MalformedXml, "more than one root <node>"));
        return;
      }
      st.root = std::make_unique<RawView>(std::move(v));
      st.stack.push_back(st.root.get());
    } else {
      auto& siblings = st.stack.back()->children;
      siblings.push_back(std::move(v));
      st.stack.push_back(&siblings.back());
    }
  } catch (const Error& e) {
    st.fail(e);
  }
}

void on_end(void* user, const XML_Char* name) {
  auto& st = *static_cast<ParseState*>(user);
  if (st.failure) return;
  if (st.skip_depth > 0) {
    --st.skip_depth;
    return;
  }
  if (std::string_view(name) == "node" && !st.stack.empty()) st.stack.pop_back();
}

void count_views(const RawView& v, std::size_t& n) {
  ++n;
  for (const auto& c : v.children) count_views(c, n);
}

void collect_preorder(const RawView& v, std::vector<const RawView*>& out) {
  out.push_back(&v);
  for (const auto& c : v.children) collect_preorder(c, out);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\t': out += "&#9;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::map<std::string, std::string> attributes_of(const RawView& v) {
  std::map<std::string, std::string> a = v.extra;
  const auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  a["class"] = v.view_class;
  a["bounds"] = format_bounds(v.bounds);
  if (v.resource_id) a["resource-id"] = *v.resource_id;
  if (v.text) a["text"] = *v.text;
  a["clickable"] = b(v.clickable);
  a["focusable"] = b(v.focusable);
  a["focused"] = b(v.focused);
  a["selected"] = b(v.selected);
  if (v.fg_color) a["fg-color"] = to_hex(*v.fg_color);
  if (v.bg_color) a["bg-color"] = to_hex(*v.bg_color);
  if (v.text_resizable) a["text-resizable"] = "true";
  if (v.auxiliary_technology) a["auxiliary-technology"] = "true";
  if (v.text_alternative) a["text-alternative"] = "true";
  if (v.alert) a["alert"] = "true";
  return a;
}

void write_view(const RawView& v, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "<node";
  for (const auto& [k, val] : attributes_of(v)) {
    out += ' ';
    out += k;
    out += "=\"";
    out += xml_escape(val);
    out += '"';
  }
  if (v.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const auto& c : v.children) write_view(c, depth + 1, out);
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</node>\n";
}

// --- visibility filtering -------------------------------------------------

bool is_invisible(const RawView& v, const VisibilityRules& rules) {
  if (v.bounds.width() == 0 || v.bounds.height() == 0) return true;
  return std::any_of(rules.invisible_suffixes.begin(), rules.invisible_suffixes.end(),
                     [&](const std::string& s) { return class_has_suffix(v.view_class, s); });
}

// Replaces each invisible view by its (filtered) children, in place.
std::vector<RawView> drop_invisible(const RawView& v, const VisibilityRules& rules) {
  std::vector<RawView> kids;
  for (const auto& c : v.children) {
    auto sub = drop_invisible(c, rules);
    std::move(sub.begin(), sub.end(), std::back_inserter(kids));
  }
  if (is_invisible(v, rules)) return kids;
  RawView copy = v;
  copy.children = std::move(kids);
  std::vector<RawView> out;
  out.push_back(std::move(copy));
  return out;
}

void merge_overlay(RawView& keep, const RawView& top) {
  keep.view_class = top.view_class;
  if (!keep.resource_id && top.resource_id) keep.resource_id = top.resource_id;
  if (!keep.text && top.text) keep.text = top.text;
  keep.clickable = keep.clickable || top.clickable;
  keep.focusable = keep.focusable || top.focusable;
  keep.focused = keep.focused || top.focused;
  keep.selected = keep.selected || top.selected;
  keep.text_resizable = keep.text_resizable || top.text_resizable;
  keep.auxiliary_technology = keep.auxiliary_technology || top.auxiliary_technology;
  keep.text_alternative = keep.text_alternative || top.text_alternative;
  keep.alert = keep.alert || top.alert;
  if (top.fg_color) keep.fg_color = top.fg_color;
  if (top.bg_color) keep.bg_color = top.bg_color;
  for (const auto& [k, val] : top.extra) keep.extra.emplace(k, val);
}

struct OverlayPlan {
  // Pre-order index of every component view -> index of the view it folds into.
  std::map<std::size_t, std::size_t> folded_into;
  std::map<std::size_t, RawView> merged;  // keeper index -> merged attributes
};

void plan_overlays(const RawView& v, std::size_t& counter, std::map<Rect, std::size_t>& first_at,
                   OverlayPlan& plan) {
  const std::size_t idx = counter++;
  if (component_kind(v.view_class)) {
    auto [it, inserted] = first_at.emplace(v.bounds, idx);
    if (inserted) {
      RawView shell = v;
      shell.children.clear();
      plan.merged.emplace(idx, std::move(shell));
    } else {
      plan.folded_into.emplace(idx, it->second);
      merge_overlay(plan.merged.at(it->second), v);
    }
  }
  for (const auto& c : v.children) plan_overlays(c, counter, first_at, plan);
}

std::vector<RawView> apply_overlays(const RawView& v, std::size_t& counter, const OverlayPlan& plan) {
  const std::size_t idx = counter++;
  std::vector<RawView> kids;
  for (const auto& c : v.children) {
    auto sub = apply_overlays(c, counter, plan);
    std::move(sub.begin(), sub.end(), std::back_inserter(kids));
  }
  if (plan.folded_into.contains(idx)) return kids;
  RawView copy = v;
  if (auto it = plan.merged.find(idx); it != plan.merged.end()) copy = it->second;
  copy.children = std::move(kids);
  std::vector<RawView> out;
  out.push_back(std::move(copy));
  return out;
}

}  // namespace

Rect parse_bounds(std::string_view text) {
  Rect r;
  std::size_t pos = 0;
  const bool ok = expect(text, pos, '[') && parse_uint(text, pos, r.x1) && expect(text, pos, ',') &&
                  parse_uint(text, pos, r.y1) && expect(text, pos, ']') && expect(text, pos, '[') &&
                  parse_uint(text, pos, r.x2) && expect(text, pos, ',') && parse_uint(text, pos, r.y2) &&
                  expect(text, pos, ']') && pos == text.size();
  if (!ok) throw Error(ErrorCode::BadBounds, "cannot parse \"" + std::string(text) + "\"");
  if (r.x1 > r.x2 || r.y1 > r.y2) {
    throw Error(ErrorCode::BadBounds, "inverted rectangle \"" + std::string(text) + "\"");
  }
  return r;
}

std::string format_bounds(const Rect& r) {
  std::ostringstream os;
  os << '[' << r.x1 << ',' << r.y1 << "][" << r.x2 << ',' << r.y2 << ']';
  return os.str();
}

int rect_gap(const Rect& a, const Rect& b) {
  const int dx = std::max({0, b.x1 - a.x2, a.x1 - b.x2});
  const int dy = std::max({0, b.y1 - a.y2, a.y1 - b.y2});
  return std::max(dx, dy);
}

bool class_has_suffix(std::string_view view_class, std::string_view suffix) {
  if (suffix.size() > view_class.size()) return false;
  const auto tail = view_class.substr(view_class.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(), suffix.end(),
                    [](char a, char b) { return ascii_lower(a) == ascii_lower(b); });
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Button: return "button";
    case ComponentKind::Text: return "text";
    case ComponentKind::Image: return "image";
    case ComponentKind::List: return "list";
    case ComponentKind::Search: return "search";
  }
  return "unknown";
}

std::optional<ComponentKind> component_kind(std::string_view view_class) {
  static constexpr std::array<std::pair<std::string_view, ComponentKind>, 5> table{{
      {"Button", ComponentKind::Button},
      {"TextView", ComponentKind::Text},
      {"ImageView", ComponentKind::Image},
      {"ListView", ComponentKind::List},
      {"SearchView", ComponentKind::Search},
  }};
  for (const auto& [suffix, kind] : table) {
    if (class_has_suffix(view_class, suffix)) return kind;
  }
  return std::nullopt;
}

std::size_t LayoutTree::view_count() const {
  std::size_t n = 0;
  if (root) count_views(*root, n);
  return n;
}

std::vector<const RawView*> LayoutTree::preorder() const {
  std::vector<const RawView*> out;
  if (root) collect_preorder(*root, out);
  return out;
}

LayoutTree parse_layout(std::string_view xml_bytes, std::string source_path) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw Error(ErrorCode::MalformedXml, "cannot allocate XML parser");

  ParseState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);

  const auto status = XML_Parse(parser.get(), xml_bytes.data(), static_cast<int>(xml_bytes.size()), XML_TRUE);
  if (st.failure) throw *st.failure;
  if (status != XML_STATUS_OK) {
    std::ostringstream os;
    os << XML_ErrorString(XML_GetErrorCode(parser.get())) << " at line "
       << XML_GetCurrentLineNumber(parser.get());
    throw Error(ErrorCode::MalformedXml, os.str());
  }
  if (!st.root) throw Error(ErrorCode::MissingRoot, "no <node> element");

  LayoutTree tree;
  tree.root = std::move(*st.root);
  tree.source_path = std::move(source_path);
  return tree;
}

LayoutTree load_layout(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str(), path);
}

std::string serialize_layout(const LayoutTree& tree) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (tree.root) write_view(*tree.root, 0, out);
  return out;
}

LayoutTree filter_visible(const LayoutTree& tree, const VisibilityRules& rules) {
  LayoutTree out;
  out.source_path = tree.source_path;
  if (!tree.root) return out;

  // The root anchors the hierarchy: it is only dropped when at most one view
  // would remain to take its place.
  auto survivors = drop_invisible(*tree.root, rules);
  RawView root;
  if (survivors.empty()) return out;
  if (survivors.size() == 1) {
    root = std::move(survivors.front());
  } else {
    root = *tree.root;
    root.children = std::move(survivors);
  }

  OverlayPlan plan;
  std::size_t counter = 0;
  std::map<Rect, std::size_t> first_at;
  plan_overlays(root, counter, first_at, plan);
  counter = 0;
  auto collapsed = apply_overlays(root, counter, plan);
  // The root is never folded away: it is visited first so it is always a keeper.
  out.root = std::move(collapsed.front());
  return out;
}

}  // namespace lvcheck
