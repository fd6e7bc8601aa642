#include "lvcheck/corpus.hpp"

#include "support.hpp"

#include <set>

using namespace lvcheck;
using lvtest::error_code_of;

namespace {

std::string frame(const std::string& body) {
  return "<hierarchy><node class=\"android.widget.FrameLayout\" bounds=\"[0,0][1440,2560]\">" + body +
         "</node></hierarchy>";
}

std::string view(const std::string& cls, const std::string& id, const std::string& bounds,
                 const std::string& extra = "fg-color=\"#000000\" bg-color=\"#FFFFFF\"") {
  return "<node class=\"android.widget." + cls + "\" resource-id=\"" + id + "\" bounds=\"" + bounds + "\" " + extra +
         "/>";
}

CorpusSpec small_spec(std::size_t n) {
  CorpusSpec s;
  s.n_guis = n;
  s.seed = 77;
  return s;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("oracle rules on hand-built layouts") {
    const std::string xml = frame(view("Button", "small", "[100,100][120,120]") +
                                  view("Button", "left", "[100,400][200,480]") +
                                  view("Button", "right", "[203,400][303,480]") +
                                  view("TextView", "grey", "[100,700][500,760]",
                                       "fg-color=\"#777777\" bg-color=\"#888888\"") +
                                  view("TextView", "warn", "[100,1000][500,1060]",
                                       "alert=\"true\" fg-color=\"#000000\" bg-color=\"#FFFFFF\"") +
                                  view("ImageView", "ok", "[100,1300][130,1330]") +
                                  view("ImageView", "ok2", "[140,1300][170,1330]"));
    CHECK(oracle_label(xml, "small") == 0);
    CHECK(oracle_label(xml, "left") == 1);
    CHECK(oracle_label(xml, "right") == 1);
    CHECK(oracle_label(xml, "grey") == 2);
    CHECK(oracle_label(xml, "warn") == 3);
    CHECK(oracle_label(xml, "ok") == 4);
    CHECK(oracle_label(xml, "ok2") == 4);
    CHECK(oracle_labels(xml).size() == 7);
    CHECK(error_code_of([&] { oracle_label(xml, "missing"); }) == ErrorCode::UnknownComponent);
  }

  TEST_CASE("oracle priority: contrast, then size, then interval, then alert") {
    const std::string xml =
        frame(view("TextView", "a", "[0,0][10,10]", "alert=\"true\" fg-color=\"#777777\" bg-color=\"#888888\"") +
              view("TextView", "b", "[12,0][22,10]", "alert=\"true\"") +
              view("TextView", "c", "[24,0][64,40]", "alert=\"true\"") +
              view("Button", "d", "[0,500][100,600]", "alert=\"true\""));
    CHECK(oracle_label(xml, "a") == 2);
    CHECK(oracle_label(xml, "b") == 0);
    CHECK(oracle_label(xml, "c") == 1);
    CHECK(oracle_label(xml, "d") == 4);  // the alert marker only counts on text
  }

  TEST_CASE("oracle rule parameters are configurable") {
    const std::string xml = frame(view("Button", "b", "[0,0][30,30]") + view("Button", "c", "[36,0][66,30]"));
    CHECK(oracle_label(xml, "b") == 4);
    OracleRules strict;
    strict.size_floor_px = 32;
    CHECK(oracle_label(xml, "b", strict) == 0);
    strict = {};
    strict.interval_floor_px = 7;
    CHECK(oracle_label(xml, "b", strict) == 1);
  }

  TEST_CASE("oracle closure over generated GUIs") {
    CorpusSpec s = small_spec(60);
    s.nav_bar_rate = 0.5;
    s.nav_share = 0.9;
    s.similar_share = 0.5;
    for (const auto& gui : generate(s)) {
      REQUIRE_FALSE(gui.labels.empty());
      for (const auto& [id, label] : gui.labels) CHECK(oracle_label(gui.xml, id) == label);
      const LayoutTree tree = parse_layout(gui.xml);
      const LayoutTree kept = filter_visible(tree);
      std::size_t components = 0;
      for (const RawView* v : kept.preorder()) {
        if (component_kind(v->view_class)) {
          ++components;
          CHECK(v->resource_id.has_value());
          if (gui.labels.at(*v->resource_id) == 3) {
            CHECK(v->alert);
            CHECK(*component_kind(v->view_class) == ComponentKind::Text);
          }
        }
      }
      CHECK(components == gui.labels.size());
      CHECK(components <= 37);
    }
  }

  TEST_CASE("zero issue rates give an accessible corpus") {
    CorpusSpec s = small_spec(40);
    s.issue_rates = {0, 0, 0, 0};
    for (const auto& gui : generate(s)) {
      for (const auto& [id, label] : gui.labels) CHECK(label == 4);
    }
  }

  TEST_CASE("class balance tracks the issue rates") {
    CorpusSpec s = small_spec(500);
    s.issue_rates = {0.12, 0.1, 0.15, 0.08};
    std::array<double, 5> counts{};
    double total = 0;
    for (const auto& gui : generate(s)) {
      for (const auto& [id, label] : gui.labels) {
        counts[static_cast<std::size_t>(label)] += 1;
        total += 1;
      }
    }
    const std::array<double, 5> expected{0.12, 0.1, 0.15, 0.08, 0.55};
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(counts[k] / total - expected[k]) <= 0.03);
  }

  TEST_CASE("generation is deterministic per seed and GUI index") {
    const CorpusSpec s = small_spec(10);
    const Corpus a = generate(s);
    const Corpus b = generate(s);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].xml == b[i].xml);
      CHECK(a[i].labels == b[i].labels);
      CHECK(generate_gui(s, i).xml == a[i].xml);
    }
    CHECK(a[3].name == "gui_00003");
    CorpusSpec other = s;
    other.seed = 78;
    CHECK(generate(other)[0].xml != a[0].xml);
  }

  TEST_CASE("corpus round-trips through the directory format") {
    const CorpusSpec s = small_spec(5);
    const Corpus c = generate(s);
    const auto dir = lvtest::scratch_dir("corpus");
    write_corpus(dir.string(), c, s);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "gui_00000" / "layout.xml"));
    CHECK(std::filesystem::exists(dir / "gui_00000" / "labels.json"));
    const Corpus back = read_corpus(dir.string());
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(back[i].name == c[i].name);
      CHECK(back[i].xml == c[i].xml);
      CHECK(back[i].labels == c[i].labels);
    }
    CHECK(error_code_of([] { read_corpus("/nonexistent/corpus"); }) == ErrorCode::Io);
  }

  TEST_CASE("split") {
    const Corpus c = generate(small_spec(100));
    const CorpusSplit s = split(c, {0.8, 0.2, 0.0}, 3);
    CHECK(s.train.size() == 80);
    CHECK(s.val.size() == 20);
    CHECK(s.test.empty());
    std::set<std::string> names;
    for (const auto* part : {&s.train, &s.val}) {
      for (const auto& g : *part) names.insert(g.name);
    }
    CHECK(names.size() == 100);

    const CorpusSplit again = split(c, {0.8, 0.2, 0.0}, 3);
    for (std::size_t i = 0; i < 80; ++i) CHECK(again.train[i].name == s.train[i].name);
    CHECK(split(c, {0.8, 0.2, 0.0}, 4).train[0].name != s.train[0].name);

    CHECK(split(c, {1, 0, 0}, 3).train.size() == 100);
    CHECK(error_code_of([&] { split(Corpus{}, {0.8, 0.2, 0}, 1); }) == ErrorCode::EmptyCorpus);
    CHECK(error_code_of([&] { split(c, {0.8, 0.3, 0}, 1); }) == ErrorCode::BadConfig);
  }

  TEST_CASE("spec validation") {
    CorpusSpec s;
    s.issue_rates = {0.5, 0.3, 0.3, 0};
    CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::InfeasibleSpec);
    s = {};
    s.max_components = 40;
    CHECK(error_code_of([&] { s.validate(); }) == ErrorCode::InfeasibleSpec);
    s = {};
    s.device_width = 200;
    s.min_components = 30;
    s.max_components = 30;
    s.n_guis = 1;
    CHECK(error_code_of([&] { generate(s); }) == ErrorCode::InfeasibleSpec);
  }

  TEST_CASE("spec json") {
    CorpusSpec s;
    s.similar_share = 0.25;
    s.rules.size_floor_px = 30;
    const CorpusSpec back = corpus_spec_from_json(corpus_spec_to_json(s));
    CHECK(back.similar_share == 0.25);
    CHECK(back.rules.size_floor_px == 30);
    CHECK(corpus_spec_to_json(back) == corpus_spec_to_json(s));
    CHECK(error_code_of([] { corpus_spec_from_json({{"colour", 1}}); }) == ErrorCode::BadConfig);
  }
}
