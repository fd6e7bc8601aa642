#include "lvcheck/corpus.hpp"
#include "lvcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace lvcheck {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kSmall = 0;
constexpr int kNarrow = 1;
constexpr int kContrast = 2;
constexpr int kAlert = 3;
constexpr int kAccessible = 4;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Library-independent draws so corpora are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int range(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  bool chance(double p) { return unit() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

int pick(Rng& rng, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.unit() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return static_cast<int>(i);
    u -= weights[i];
  }
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

struct Item {
  int intent = kAccessible;
  ComponentKind kind = ComponentKind::Text;
  int w = 0;
  int h = 0;
  Rgb fg;
  bool glue_next = false;  // place the next item 1-4 px away
  bool like_prev = false;  // copy kind, size and colors from the previous item
};

const char* class_for(ComponentKind k, bool nav) {
  switch (k) {
    case ComponentKind::Button: return nav ? "android.widget.ImageButton" : "android.widget.Button";
    case ComponentKind::Text: return "android.widget.TextView";
    case ComponentKind::Image: return "android.widget.ImageView";
    case ComponentKind::List: return "android.widget.ListView";
    case ComponentKind::Search: return "android.widget.SearchView";
  }
  return "android.view.View";
}

ComponentKind sample_kind(Rng& rng, int intent) {
  if (intent == kAlert) return ComponentKind::Text;
  static constexpr std::array<ComponentKind, 5> kinds{ComponentKind::Button, ComponentKind::Text,
                                                       ComponentKind::Image, ComponentKind::List,
                                                       ComponentKind::Search};
  if (intent == kSmall || intent == kNarrow) {
    return kinds[static_cast<std::size_t>(pick(rng, {0.4, 0.3, 0.3, 0.0, 0.0}))];
  }
  return kinds[static_cast<std::size_t>(pick(rng, {0.3, 0.3, 0.25, 0.05, 0.1}))];
}

void sample_size(Rng& rng, Item& it, const OracleRules& rules) {
  const int floor = rules.size_floor_px;
  if (it.intent == kSmall) {
    if (it.kind == ComponentKind::Text) {
      it.w = rng.range(60, 400);
      it.h = rng.range(std::max(6, floor / 3), floor - 4);
    } else {
      it.w = rng.range(std::max(6, floor / 3), floor - 4);
      it.h = rng.range(std::max(6, floor / 3), floor - 4);
    }
    return;
  }
  if (it.intent == kNarrow) {
    // Crowded targets are compact icons: above the size floor, below regular controls.
    const int lo = floor + 4, hi = floor * 2 - 8;
    it.h = rng.range(lo, hi);
    it.w = it.kind == ComponentKind::Text ? rng.range(60, 240) : rng.range(lo, hi);
    return;
  }
  switch (it.kind) {
    case ComponentKind::Button: it.w = rng.range(144, 400); it.h = rng.range(72, 144); break;
    case ComponentKind::Text: it.w = rng.range(160, 720); it.h = rng.range(40, 96); break;
    case ComponentKind::Image: it.w = rng.range(72, 240); it.h = rng.range(72, 240); break;
    case ComponentKind::List: it.w = rng.range(400, 1000); it.h = rng.range(160, 360); break;
    case ComponentKind::Search: it.w = rng.range(400, 1000); it.h = rng.range(72, 120); break;
  }
  it.w = std::max(it.w, floor * 2);
  it.h = std::max(it.h, floor * 2);
}

Rgb random_rgb(Rng& rng) {
  return {static_cast<std::uint8_t>(rng.range(0, 255)), static_cast<std::uint8_t>(rng.range(0, 255)),
          static_cast<std::uint8_t>(rng.range(0, 255))};
}

Rgb sample_background(Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Rgb bg = random_rgb(rng);
    if (std::max(contrast_ratio(bg, Rgb{0, 0, 0}), contrast_ratio(bg, Rgb{255, 255, 255})) >= 10.0) return bg;
  }
  return Rgb{255, 255, 255};
}

Rgb sample_foreground(Rng& rng, Rgb bg, bool low_contrast, double floor) {
  if (low_contrast) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto jitter = [&](std::uint8_t ch) {
        return static_cast<std::uint8_t>(std::clamp(static_cast<int>(ch) + rng.range(-40, 40), 0, 255));
      };
      const Rgb fg{jitter(bg.r), jitter(bg.g), jitter(bg.b)};
      if (contrast_ratio(fg, bg) < std::min(3.0, floor)) return fg;
    }
    return bg;
  }
  const double target = std::max(7.0, floor + 1.0);
  for (int attempt = 0; attempt < 32; ++attempt) {
    const Rgb fg = random_rgb(rng);
    if (contrast_ratio(fg, bg) >= target) return fg;
  }
  const Rgb black{0, 0, 0}, white{255, 255, 255};
  return contrast_ratio(black, bg) >= contrast_ratio(white, bg) ? black : white;
}

// Splits `count` components into single items and glued narrow pairs so the
// expected fraction of each intent equals its issue rate.
std::vector<Item> sample_group_items(Rng& rng, std::size_t count, const CorpusSpec& spec) {
  const auto& r = spec.issue_rates;
  const double accessible = std::max(0.0, 1.0 - (r[0] + r[1] + r[2] + r[3]));
  const double pair = r[1] / (2.0 - r[1]);
  const double inflate = 1.0 + pair;
  std::vector<double> singles{r[0] * inflate, pair, r[2] * inflate, r[3] * inflate, accessible * inflate};
  std::vector<Item> items;
  int prev = -1;
  while (items.size() < count) {
    const bool fits_pair = items.size() + 2 <= count;
    const bool copy = prev >= 0 && (prev != kNarrow || fits_pair) && rng.chance(spec.similar_share);
    int intent = copy ? prev : pick(rng, singles);
    if (intent == kNarrow && !fits_pair) {
      auto w = singles;
      w[kNarrow] = 0.0;
      intent = pick(rng, w);
    }
    if (intent == kNarrow) {
      Item a, b;
      a.intent = b.intent = kNarrow;
      a.glue_next = true;
      a.like_prev = copy;
      b.like_prev = true;
      items.push_back(a);
      items.push_back(b);
    } else {
      Item a;
      a.intent = intent;
      a.like_prev = copy;
      items.push_back(a);
    }
    prev = intent;
  }
  return items;
}

struct PlacedGroup {
  RawView view;
  int bottom = 0;
};

RawView make_component(const Item& it, const Rect& r, Rgb bg, const std::string& id, bool nav, Rng& rng) {
  RawView v;
  v.view_class = class_for(it.kind, nav);
  v.resource_id = id;
  v.bounds = r;
  const bool interactive = it.kind == ComponentKind::Button || it.kind == ComponentKind::Image ||
                           it.kind == ComponentKind::Search;
  v.clickable = interactive && (it.kind != ComponentKind::Image || rng.chance(0.6));
  v.focusable = v.clickable || it.kind == ComponentKind::List;
  v.focused = v.focusable && rng.chance(0.03);
  v.selected = rng.chance(0.05);
  if (it.kind == ComponentKind::Text || it.kind == ComponentKind::Button) {
    v.text = it.intent == kAlert ? "!" : "Label";
  }
  v.fg_color = it.fg;
  v.bg_color = bg;
  v.text_resizable = it.kind == ComponentKind::Text ? rng.chance(0.8) : rng.chance(0.2);
  v.auxiliary_technology = rng.chance(0.5);
  v.text_alternative = it.intent != kAlert;
  v.alert = it.intent == kAlert;
  return v;
}

RawView make_viewgroup(const char* cls, const std::vector<RawView>& kids, int pad) {
  RawView g;
  g.view_class = cls;
  Rect box = kids.front().bounds;
  for (const auto& k : kids) {
    box.x1 = std::min(box.x1, k.bounds.x1);
    box.y1 = std::min(box.y1, k.bounds.y1);
    box.x2 = std::max(box.x2, k.bounds.x2);
    box.y2 = std::max(box.y2, k.bounds.y2);
  }
  g.bounds = {std::max(0, box.x1 - pad), std::max(0, box.y1 - pad), box.x2 + pad, box.y2 + pad};
  g.children = kids;
  return g;
}

// Flows items into rows starting at y; returns nullopt if the group overflows the device width.
std::optional<PlacedGroup> place_group(Rng& rng, std::vector<Item>& items, int y, std::size_t g,
                                       const CorpusSpec& spec) {
  const int margin = rng.range(32, 64);
  const int right = spec.device_width - margin;
  const int per_row = rng.range(1, 5);
  const Rgb bg = sample_background(rng);
  for (std::size_t k = 0; k < items.size(); ++k) {
    auto& it = items[k];
    if (it.like_prev && k > 0) {
      it.kind = items[k - 1].kind;
      it.w = items[k - 1].w;
      it.h = items[k - 1].h;
      it.fg = items[k - 1].fg;
      continue;
    }
    it.kind = sample_kind(rng, it.intent);
    sample_size(rng, it, spec.rules);
    it.fg = sample_foreground(rng, bg, it.intent == kContrast, spec.rules.contrast_floor);
  }

  const int wide_min = spec.rules.interval_floor_px + 12;
  std::vector<RawView> rows;
  std::vector<RawView> row;
  int x = margin;
  int row_h = 0;
  std::size_t k = 0;
  std::size_t in_row = 0;
  auto flush = [&] {
    if (row.empty()) return;
    rows.push_back(make_viewgroup("android.widget.LinearLayout", row, 0));
    y += row_h + rng.range(wide_min, 48);
    row.clear();
    x = margin;
    row_h = 0;
    in_row = 0;
  };
  while (k < items.size()) {
    const bool pair = items[k].glue_next && k + 1 < items.size();
    const int tight = pair ? rng.range(1, spec.rules.interval_floor_px - 1) : 0;
    const int width = pair ? items[k].w + tight + items[k + 1].w : items[k].w;
    if (width > right - margin) return std::nullopt;
    if (!row.empty() && (x + width > right || in_row >= static_cast<std::size_t>(per_row))) flush();
    const std::size_t n_here = pair ? 2 : 1;
    for (std::size_t j = 0; j < n_here; ++j) {
      const Item& it = items[k + j];
      const Rect r{x, y, x + it.w, y + it.h};
      const std::string id = "com.synth.app:id/g" + std::to_string(g) + "_c" + std::to_string(k + j);
      row.push_back(make_component(it, r, bg, id, false, rng));
      row_h = std::max(row_h, it.h);
      x += it.w + (j + 1 < n_here ? tight : 0);
    }
    x += rng.range(wide_min, 64);
    k += n_here;
    ++in_row;
  }
  flush();
  PlacedGroup out;
  out.view = make_viewgroup("android.widget.LinearLayout", rows, 8);
  out.bottom = out.view.bounds.y2;
  return out;
}

std::optional<PlacedGroup> place_nav_bar(Rng& rng, std::size_t m, int y, const CorpusSpec& spec) {
  const auto& r = spec.issue_rates;
  const std::vector<double> weights{r[0], r[1], r[2], r[3], std::max(0.0, 1.0 - (r[0] + r[1] + r[2] + r[3]))};
  std::vector<Item> items(m);
  for (std::size_t k = 0; k < m; ++k) {
    items[k].intent = (k > 0 && rng.chance(spec.nav_share)) ? items[k - 1].intent : pick(rng, weights);
  }
  const Rgb bg = sample_background(rng);
  const int side = rng.range(std::max(96, spec.rules.size_floor_px * 2), 160);
  const int small_side = rng.range(std::max(6, spec.rules.size_floor_px / 3), spec.rules.size_floor_px - 4);
  const int margin = 48;
  const int spread = rng.range(spec.rules.interval_floor_px + 24, 120);
  for (std::size_t k = 0; k < m; ++k) {
    auto& it = items[k];
    it.kind = it.intent == kAlert ? ComponentKind::Text : ComponentKind::Button;
    it.w = it.h = it.intent == kSmall ? small_side : side;
    it.fg = sample_foreground(rng, bg, it.intent == kContrast, spec.rules.contrast_floor);
  }
  for (std::size_t k = 0; k + 1 < m; ++k) {
    items[k].glue_next = items[k].intent == kNarrow || items[k + 1].intent == kNarrow;
  }
  std::vector<RawView> row;
  int x = margin;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& it = items[k];
    const int top = y + (side - it.h) / 2;
    const Rect rect{x, top, x + it.w, top + it.h};
    row.push_back(make_component(it, rect, bg, "com.synth.app:id/nav_" + std::to_string(k), true, rng));
    x += it.w + (it.glue_next ? rng.range(1, spec.rules.interval_floor_px - 1) : spread);
  }
  if (x > spec.device_width) return std::nullopt;
  PlacedGroup out;
  out.view = make_viewgroup("android.widget.LinearLayout", {make_viewgroup("android.widget.LinearLayout", row, 0)},
                            8);
  out.view.extra["content-desc"] = "navigation";
  out.bottom = out.view.bounds.y2;
  return out;
}

std::optional<RawView> try_layout(Rng& rng, const CorpusSpec& spec) {
  const bool nav = spec.nav_bar_rate > 0.0 && rng.chance(spec.nav_bar_rate);
  std::size_t n_groups = static_cast<std::size_t>(
      rng.range(static_cast<int>(spec.min_groups), static_cast<int>(spec.max_groups)));
  std::size_t nav_items = nav ? static_cast<std::size_t>(rng.range(3, 5)) : 0;
  if (nav) n_groups = std::max<std::size_t>(n_groups, 2);

  const std::size_t regular_groups = nav ? n_groups - 1 : n_groups;
  const std::size_t hi = std::min(spec.max_components, spec.node_budget - n_groups);
  const std::size_t lo = std::max(spec.min_components, regular_groups + nav_items);
  if (lo > hi) return std::nullopt;
  const std::size_t n_components = static_cast<std::size_t>(rng.range(static_cast<int>(lo), static_cast<int>(hi)));

  std::vector<std::size_t> sizes(regular_groups, 1);
  for (std::size_t k = regular_groups + nav_items; k < n_components; ++k) {
    sizes[static_cast<std::size_t>(rng.range(0, static_cast<int>(regular_groups) - 1))]++;
  }

  RawView root;
  root.view_class = "android.widget.FrameLayout";
  root.bounds = {0, 0, spec.device_width, spec.device_height};
  int y = rng.range(48, 96);
  for (std::size_t g = 0; g < regular_groups; ++g) {
    auto items = sample_group_items(rng, sizes[g], spec);
    auto placed = place_group(rng, items, y, g, spec);
    if (!placed) return std::nullopt;
    y = placed->bottom + rng.range(48, 96);
    root.children.push_back(std::move(placed->view));
  }
  if (nav) {
    auto placed = place_nav_bar(rng, nav_items, y, spec);
    if (!placed) return std::nullopt;
    y = placed->bottom;
    root.children.push_back(std::move(placed->view));
  }
  if (y > spec.device_height - 16) return std::nullopt;
  // Glued pairs can overshoot the sampled count; reject layouts past the budget.
  std::size_t count = 0;
  for (const auto& grp : root.children) {
    for (const auto& row : grp.children) count += row.children.size();
  }
  if (count + root.children.size() > spec.node_budget || count > spec.max_components) return std::nullopt;
  return root;
}

bool is_component_view(const RawView& v) { return component_kind(v.view_class).has_value(); }

}  // namespace

void CorpusSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InfeasibleSpec, what); };
  double total = 0.0;
  for (double r : issue_rates) {
    if (!(r >= 0.0 && r <= 1.0)) bad("issue rates must lie in [0, 1]");
    total += r;
  }
  if (total > 1.0 + 1e-12) bad("issue rates sum above 1");
  if (issue_rates[1] >= 1.0) bad("narrow-interval rate must be below 1");
  if (min_components == 0 || min_components > max_components) bad("component range is empty");
  if (max_components > 37) bad("at most 37 components per GUI");
  if (min_groups == 0 || min_groups > max_groups) bad("group range is empty");
  if (min_components < min_groups) bad("every group needs at least one component");
  if (min_components + min_groups > node_budget) bad("node budget too small for the smallest GUI");
  if (device_width <= 0 || device_height <= 0) bad("device size must be positive");
  if (rules.size_floor_px < 8 || rules.interval_floor_px < 2) bad("rule thresholds too small to realize");
  if (!(nav_bar_rate >= 0.0 && nav_bar_rate <= 1.0) || !(nav_share >= 0.0 && nav_share <= 1.0) ||
      !(similar_share >= 0.0 && similar_share <= 1.0)) {
    bad("share probabilities must lie in [0, 1]");
  }
}

ordered_json corpus_spec_to_json(const CorpusSpec& s) {
  return {
      {"n_guis", s.n_guis},
      {"min_components", s.min_components},
      {"max_components", s.max_components},
      {"min_groups", s.min_groups},
      {"max_groups", s.max_groups},
      {"issue_rates", s.issue_rates},
      {"seed", s.seed},
      {"device_width", s.device_width},
      {"device_height", s.device_height},
      {"node_budget", s.node_budget},
      {"nav_bar_rate", s.nav_bar_rate},
      {"nav_share", s.nav_share},
      {"similar_share", s.similar_share},
      {"size_floor_px", s.rules.size_floor_px},
      {"interval_floor_px", s.rules.interval_floor_px},
      {"contrast_floor", s.rules.contrast_floor},
  };
}

CorpusSpec corpus_spec_from_json(const json& j, CorpusSpec s) {
  if (!j.is_object()) throw Error(ErrorCode::BadConfig, "corpus spec must be an object");
  const auto known = corpus_spec_to_json(s);
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw Error(ErrorCode::BadConfig, "unknown corpus key \"" + k + "\"");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("n_guis", s.n_guis);
    get("min_components", s.min_components);
    get("max_components", s.max_components);
    get("min_groups", s.min_groups);
    get("max_groups", s.max_groups);
    get("issue_rates", s.issue_rates);
    get("seed", s.seed);
    get("device_width", s.device_width);
    get("device_height", s.device_height);
    get("node_budget", s.node_budget);
    get("nav_bar_rate", s.nav_bar_rate);
    get("nav_share", s.nav_share);
    get("similar_share", s.similar_share);
    get("size_floor_px", s.rules.size_floor_px);
    get("interval_floor_px", s.rules.interval_floor_px);
    get("contrast_floor", s.rules.contrast_floor);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  }
  return s;
}

SyntheticGui generate_gui(const CorpusSpec& spec, std::size_t index) {
  spec.validate();
  Rng rng(splitmix(spec.seed ^ splitmix(index)));
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto root = try_layout(rng, spec);
    if (!root) continue;
    LayoutTree tree;
    tree.root = std::move(*root);
    SyntheticGui gui;
    char name[32];
    std::snprintf(name, sizeof name, "gui_%05zu", index);
    gui.name = name;
    gui.xml = serialize_layout(tree);
    gui.labels = oracle_labels(gui.xml, spec.rules);
    return gui;
  }
  throw Error(ErrorCode::InfeasibleSpec, "cannot place GUI " + std::to_string(index) + " within " +
                                             std::to_string(spec.device_width) + "x" +
                                             std::to_string(spec.device_height));
}

Corpus generate(const CorpusSpec& spec) {
  spec.validate();
  Corpus out;
  out.reserve(spec.n_guis);
  for (std::size_t i = 0; i < spec.n_guis; ++i) out.push_back(generate_gui(spec, i));
  return out;
}

int oracle_label(const LayoutTree& tree, std::string_view resource_id, const OracleRules& rules) {
  std::vector<const RawView*> components;
  for (const RawView* v : tree.preorder()) {
    if (is_component_view(*v)) components.push_back(v);
  }
  const auto target = std::find_if(components.begin(), components.end(),
                                   [&](const RawView* v) { return v->resource_id == resource_id; });
  if (target == components.end()) {
    throw Error(ErrorCode::UnknownComponent, "no component with resource-id " + std::string(resource_id));
  }
  const RawView& v = **target;
  const double ratio = contrast_ratio(v.fg_color.value_or(kDefaultForeground), v.bg_color.value_or(kDefaultBackground));
  if (ratio < rules.contrast_floor) return kContrast;
  if (std::min(v.bounds.width(), v.bounds.height()) < rules.size_floor_px) return kSmall;
  for (const RawView* other : components) {
    if (other != &v && rect_gap(v.bounds, other->bounds) < rules.interval_floor_px) return kNarrow;
  }
  if (v.alert && component_kind(v.view_class) == ComponentKind::Text) return kAlert;
  return kAccessible;
}

int oracle_label(std::string_view xml, std::string_view resource_id, const OracleRules& rules) {
  return oracle_label(parse_layout(xml), resource_id, rules);
}

std::map<std::string, int> oracle_labels(std::string_view xml, const OracleRules& rules) {
  const LayoutTree tree = parse_layout(xml);
  std::map<std::string, int> out;
  for (const RawView* v : tree.preorder()) {
    if (is_component_view(*v) && v->resource_id) out.emplace(*v->resource_id, oracle_label(tree, *v->resource_id, rules));
  }
  return out;
}

CorpusSplit split(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot split an empty corpus");
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadConfig, "split ratios must be non-negative and sum to 1");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(splitmix(seed));
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto n = corpus.size();
  const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n))));
  const auto n_val =
      std::min(n - n_train, static_cast<std::size_t>(std::llround(ratios.val * static_cast<double>(n))));
  CorpusSplit out;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& g = corpus[order[k]];
    if (k < n_train) out.train.push_back(g);
    else if (k < n_train + n_val) out.val.push_back(g);
    else out.test.push_back(g);
  }
  return out;
}

void write_corpus(const std::string& dir, const Corpus& corpus, const CorpusSpec& spec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
  ordered_json manifest;
  manifest["format"] = "lvcheck-corpus";
  manifest["version"] = 1;
  manifest["seed"] = spec.seed;
  manifest["spec"] = corpus_spec_to_json(spec);
  ordered_json names = ordered_json::array();
  for (const auto& g : corpus) {
    const fs::path sub = fs::path(dir) / g.name;
    fs::create_directories(sub, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + sub.string());
    std::ofstream(sub / "layout.xml", std::ios::binary) << g.xml;
    ordered_json labels(g.labels);
    std::ofstream(sub / "labels.json", std::ios::binary) << labels.dump(2) << '\n';
    names.push_back(g.name);
  }
  manifest["guis"] = std::move(names);
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

Corpus read_corpus(const std::string& dir) {
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  std::vector<std::string> names;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    const json manifest = json::parse(slurp(manifest_path));
    names = manifest.at("guis").get<std::vector<std::string>>();
  } else {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir + " is not a directory");
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && fs::exists(e.path() / "layout.xml")) names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
  }
  Corpus out;
  for (const auto& name : names) {
    SyntheticGui g;
    g.name = name;
    g.xml = slurp(fs::path(dir) / name / "layout.xml");
    const fs::path lp = fs::path(dir) / name / "labels.json";
    if (fs::exists(lp)) g.labels = json::parse(slurp(lp)).get<std::map<std::string, int>>();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace lvcheck
