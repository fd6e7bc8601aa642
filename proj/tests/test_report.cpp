#include "lvcheck/report.hpp"

#include "support.hpp"

#include <random>

using namespace lvcheck;
using lvtest::error_code_of;

namespace {

std::vector<int> repeat(std::initializer_list<std::pair<int, std::size_t>> runs) {
  std::vector<int> out;
  for (const auto& [v, n] : runs) out.insert(out.end(), n, v);
  return out;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Finding finding(int cls, Rect r, std::string id) {
  Finding f;
  f.issue_class = cls;
  f.bounds = r;
  f.resource_id = std::move(id);
  return f;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("remediation table") {
    CHECK(recommend(0) == "increase touch target to \xE2\x89\xA5" "24\xC3\x97" "24 px");
    CHECK(recommend(1) == "increase spacing between adjacent targets");
    CHECK(recommend(2) == "raise foreground/background contrast to \xE2\x89\xA5" "4.5:1");
    CHECK(recommend(3) == "make alert text explicit and visually prominent");
    CHECK(error_code_of([] { recommend(4); }) == ErrorCode::InvalidClass);
    CHECK(error_code_of([] { recommend(-1); }) == ErrorCode::InvalidClass);
  }

  TEST_CASE("binarized metrics from known counts") {
    // tp 8, tn 27, fp 4, fn 3
    const auto pred = repeat({{0, 8}, {4, 27}, {2, 4}, {4, 3}});
    const auto gold = repeat({{1, 8}, {4, 27}, {4, 4}, {3, 3}});
    const MetricsResult m = evaluate(pred, gold);
    CHECK(m.tp == 8);
    CHECK(m.tn == 27);
    CHECK(m.fp == 4);
    CHECK(m.fn == 3);
    CHECK(format_metric(m.precision) == "0.667");
    CHECK(format_metric(m.recall) == "0.727");
    CHECK(format_metric(m.f1) == "0.696");
    CHECK(m.total == 42);
    CHECK(m.confusion[1][0] == 8);
    CHECK(m.accuracy() == doctest::Approx(27.0 / 42.0));
  }

  TEST_CASE("perfect and degenerate metrics") {
    const std::vector<int> v{0, 1, 2, 3, 4, 4};
    const MetricsResult perfect = evaluate(v, v);
    CHECK(*perfect.precision == 1.0);
    CHECK(*perfect.recall == 1.0);
    CHECK(*perfect.f1 == 1.0);
    CHECK(perfect.accuracy() == 1.0);

    const std::vector<int> none{4, 4, 4};
    const MetricsResult m = evaluate(none, none);
    CHECK_FALSE(m.precision.has_value());
    CHECK_FALSE(m.recall.has_value());
    CHECK(format_metric(m.precision) == "n/a");
    CHECK(metrics_json(m)["precision"] == "n/a");
    CHECK(metrics_json(m)["f1"] == "n/a");

    const std::vector<int> miss_p{4, 4}, miss_g{0, 4};
    const MetricsResult z = evaluate(miss_p, miss_g);
    CHECK_FALSE(z.precision.has_value());
    CHECK(*z.recall == 0.0);

    const std::vector<int> short_v{1};
    CHECK(error_code_of([&] { evaluate(v, short_v); }) == ErrorCode::LengthMismatch);
    const std::vector<int> bad{5, 0, 0, 0, 0, 0};
    CHECK(error_code_of([&] { evaluate(bad, v); }) == ErrorCode::InvalidClass);
  }

  TEST_CASE("evaluate matches a brute-force recount") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = rng() % 60;
      std::vector<int> p(n), g(n);
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = static_cast<int>(rng() % 5);
        g[i] = static_cast<int>(rng() % 5);
      }
      const MetricsResult m = evaluate(p, g);
      std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool a = p[i] < 4, b = g[i] < 4;
        tp += a && b;
        tn += !a && !b;
        fp += a && !b;
        fn += !a && b;
        CHECK(m.confusion[static_cast<std::size_t>(g[i])][static_cast<std::size_t>(p[i])] > 0);
      }
      CHECK(m.tp == tp);
      CHECK(m.tn == tn);
      CHECK(m.fp == fp);
      CHECK(m.fn == fn);
    }
  }

  TEST_CASE("metrics json and text") {
    const std::vector<int> p{0, 4, 2}, g{0, 1, 4};
    const auto j = metrics_json(evaluate(p, g), true);
    CHECK(j["tp"] == 1);
    CHECK(j["precision"] == 0.5);
    CHECK(j["confusion"][1][4] == 1);
    CHECK(j["classes"][3] == "unclear alert information");
    const std::string text = render_metrics_text(evaluate(p, g), true);
    CHECK(text.find("precision 0.500  recall 0.500  f1 0.500") != std::string::npos);
    CHECK(text.find("confusion (rows gold, columns predicted):") != std::string::npos);
  }

  TEST_CASE("overlay svg") {
    IssueReport empty;
    const std::string frame_only = overlay_svg(empty);
    CHECK(count_of(frame_only, "<rect") == 1);
    CHECK(count_of(frame_only, "class=\"frame\"") == 1);
    CHECK(frame_only.find("width=\"1440\" height=\"2560\"") != std::string::npos);
    CHECK(count_of(frame_only, "class=\"legend\"") == 0);

    IssueReport one;
    one.findings.push_back(finding(0, Rect{0, 0, 23, 48}, "app:id/b"));
    one.counts[0] = 1;
    const std::string svg = overlay_svg(one);
    CHECK(count_of(svg, "class=\"issue\"") == 1);
    CHECK(svg.find("x=\"0\" y=\"0\" width=\"23\" height=\"48\"") != std::string::npos);
    CHECK(count_of(svg, "class=\"legend\"") == 1);

    IssueReport two = one;
    two.findings.push_back(finding(2, Rect{100, 100, 300, 160}, "app:id/<t>"));
    two.counts[2] = 1;
    const std::string svg2 = overlay_svg(two);
    CHECK(count_of(svg2, "class=\"issue\"") == 2);
    CHECK(count_of(svg2, "class=\"legend\"") == 2);
    CHECK(svg2.find("data-class=\"0\"") != std::string::npos);
    CHECK(svg2.find("data-class=\"2\"") != std::string::npos);
    CHECK(svg2.find("#E53935") != std::string::npos);
    CHECK(svg2.find("#8E24AA") != std::string::npos);
    CHECK(svg2.find("app:id/&lt;t&gt;") != std::string::npos);
    CHECK(overlay_svg(two) == svg2);
  }

  TEST_CASE("report from predictions skips accessible components") {
    GuiGraph g = build_graph(filter_visible(load_layout(lvtest::fixture("two_branches.xml"))));
    Prediction p;
    p.class_of.assign(37, 4);
    p.class_of[1] = 0;
    p.class_of[4] = 2;
    p.class_of[6] = 1;  // container row
    const IssueReport r = build_report(g, p, "two_branches.xml");
    CHECK(r.components == 6);
    REQUIRE(r.findings.size() == 2);
    CHECK(r.findings[0].node_id == 1);
    CHECK(r.findings[1].issue_class == 2);
    CHECK(r.counts == std::array<std::size_t, 4>{1, 0, 1, 0});
    CHECK_FALSE(r.clean());

    const auto j = report_json(r);
    CHECK(j["source"] == "two_branches.xml");
    CHECK(j["summary"]["small size"] == 1);
    CHECK(j["summary"]["narrow interval"] == 0);
    CHECK(j["findings"][0]["issue"] == "small size");
    CHECK(j["findings"][0]["component_type"] == "text");
    CHECK(j["findings"][0]["recommendation"] == std::string(recommend(0)));
    CHECK(j["findings"][1]["class"] == 2);
    const std::string text = render_report_text(r);
    CHECK(text.rfind("two_branches.xml: 2 issue(s) in 6 component(s)\n", 0) == 0);

    p.class_of.assign(37, 4);
    CHECK(build_report(g, p).clean());
  }
}
