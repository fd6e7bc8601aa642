#include "lvcheck/report.hpp"
#include "lvcheck/error.hpp"
#include "lvcheck/features.hpp"

#include <cstdio>
#include <sstream>

namespace lvcheck {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kRemediation{
    "increase touch target to \xE2\x89\xA5" "24\xC3\x97" "24 px",
    "increase spacing between adjacent targets",
    "raise foreground/background contrast to \xE2\x89\xA5" "4.5:1",
    "make alert text explicit and visually prominent",
};

constexpr std::array<std::string_view, 4> kClassColor{"#E53935", "#FB8C00", "#8E24AA", "#1E88E5"};

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

ordered_json metric_value(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return ordered_json::parse(buf);
}

}  // namespace

std::string_view recommend(int class_index) {
  if (class_index < 0 || class_index > 3) {
    throw Error(ErrorCode::InvalidClass, "no remediation for class " + std::to_string(class_index));
  }
  return kRemediation[static_cast<std::size_t>(class_index)];
}

IssueReport build_report(const GuiGraph& graph, const Prediction& pred, std::string source) {
  IssueReport r;
  r.source = std::move(source);
  r.components = graph.components.size();
  for (const auto& c : graph.components) {
    const int cls = pred.class_of.at(static_cast<std::size_t>(c.node_id));
    if (cls == static_cast<int>(IssueClass::Accessible)) continue;
    r.findings.push_back({c.node_id, c.resource_id, c.kind, cls, c.bounds});
    ++r.counts[static_cast<std::size_t>(cls)];
  }
  return r;
}

ordered_json report_json(const IssueReport& r) {
  ordered_json j;
  j["source"] = r.source;
  j["components"] = r.components;
  ordered_json summary;
  for (int k = 0; k < 4; ++k) summary[std::string(class_name(k))] = r.counts[static_cast<std::size_t>(k)];
  j["summary"] = std::move(summary);
  ordered_json findings = ordered_json::array();
  for (const auto& f : r.findings) {
    findings.push_back({
        {"resource_id", f.resource_id},
        {"component_type", std::string(to_string(f.component_type))},
        {"issue", std::string(class_name(f.issue_class))},
        {"class", f.issue_class},
        {"recommendation", std::string(recommend(f.issue_class))},
        {"bounds", format_bounds(f.bounds)},
    });
  }
  j["findings"] = std::move(findings);
  return j;
}

std::string render_report_text(const IssueReport& r) {
  std::ostringstream os;
  os << (r.source.empty() ? std::string("<layout>") : r.source) << ": " << r.findings.size() << " issue(s) in "
     << r.components << " component(s)\n";
  for (const auto& f : r.findings) {
    os << "  " << (f.resource_id.empty() ? std::string("<no id>") : f.resource_id) << " ["
       << to_string(f.component_type) << "] " << format_bounds(f.bounds) << '\n';
    os << "    issue: " << class_name(f.issue_class) << '\n';
    os << "    fix:   " << recommend(f.issue_class) << '\n';
  }
  return os.str();
}

std::string overlay_svg(const IssueReport& r, const Canvas& canvas) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas.width << "\" height=\"" << canvas.height
     << "\" viewBox=\"0 0 " << canvas.width << ' ' << canvas.height << "\">\n";
  os << "  <rect class=\"frame\" x=\"0\" y=\"0\" width=\"" << canvas.width << "\" height=\"" << canvas.height
     << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"4\"/>\n";
  for (const auto& f : r.findings) {
    os << "  <rect class=\"issue\" data-class=\"" << f.issue_class << "\" data-id=\"" << xml_escape(f.resource_id)
       << "\" x=\"" << f.bounds.x1 << "\" y=\"" << f.bounds.y1 << "\" width=\"" << f.bounds.width()
       << "\" height=\"" << f.bounds.height() << "\" fill=\"none\" stroke=\""
       << kClassColor[static_cast<std::size_t>(f.issue_class)] << "\" stroke-width=\"3\"/>\n";
  }
  int row = 0;
  for (int k = 0; k < 4; ++k) {
    if (r.counts[static_cast<std::size_t>(k)] == 0) continue;
    const int y = 24 + row * 36;
    os << "  <g class=\"legend\" data-class=\"" << k << "\">\n";
    os << "    <rect x=\"16\" y=\"" << y << "\" width=\"24\" height=\"24\" fill=\""
       << kClassColor[static_cast<std::size_t>(k)] << "\"/>\n";
    os << "    <text x=\"48\" y=\"" << y + 19 << "\" font-family=\"sans-serif\" font-size=\"20\">"
       << xml_escape(class_name(k)) << "</text>\n";
    os << "  </g>\n";
    ++row;
  }
  os << "</svg>\n";
  return os.str();
}

double MetricsResult::accuracy() const {
  if (total == 0) return 0.0;
  std::size_t hit = 0;
  for (int k = 0; k < kNumClasses; ++k) hit += confusion[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
  return static_cast<double>(hit) / static_cast<double>(total);
}

MetricsResult evaluate(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::LengthMismatch, "predictions (" + std::to_string(predicted.size()) + ") and gold (" +
                                               std::to_string(gold.size()) + ") differ in length");
  }
  MetricsResult m;
  constexpr int kAccessible = static_cast<int>(IssueClass::Accessible);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int g = gold[i];
    to_issue_class(p);
    to_issue_class(g);
    ++m.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
    const bool pp = p != kAccessible;
    const bool gp = g != kAccessible;
    if (pp && gp) ++m.tp;
    else if (!pp && !gp) ++m.tn;
    else if (pp) ++m.fp;
    else ++m.fn;
  }
  m.total = predicted.size();
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  if (m.precision && m.recall) {
    const double s = *m.precision + *m.recall;
    m.f1 = s > 0 ? 2.0 * *m.precision * *m.recall / s : 0.0;
  }
  return m;
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

ordered_json metrics_json(const MetricsResult& m, bool per_class) {
  ordered_json j;
  j["tp"] = m.tp;
  j["tn"] = m.tn;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  j["precision"] = metric_value(m.precision);
  j["recall"] = metric_value(m.recall);
  j["f1"] = metric_value(m.f1);
  j["accuracy"] = metric_value(m.total ? std::optional<double>(m.accuracy()) : std::nullopt);
  if (per_class) {
    ordered_json classes = ordered_json::array();
    for (int k = 0; k < kNumClasses; ++k) classes.push_back(std::string(class_name(k)));
    j["classes"] = std::move(classes);
    j["confusion"] = m.confusion;
  }
  return j;
}

std::string render_metrics_text(const MetricsResult& m, bool per_class) {
  std::ostringstream os;
  os << "TP " << m.tp << "  TN " << m.tn << "  FP " << m.fp << "  FN " << m.fn << '\n';
  os << "precision " << format_metric(m.precision) << "  recall " << format_metric(m.recall) << "  f1 "
     << format_metric(m.f1) << '\n';
  os << "accuracy " << format_metric(m.total ? std::optional<double>(m.accuracy()) : std::nullopt) << '\n';
  if (per_class) {
    os << "confusion (rows gold, columns predicted):\n";
    for (int g = 0; g < kNumClasses; ++g) {
      char label[40];
      std::snprintf(label, sizeof label, "%-28s", std::string(class_name(g)).c_str());
      os << "  " << label;
      for (int p = 0; p < kNumClasses; ++p) {
        char cell[16];
        std::snprintf(cell, sizeof cell, "%7zu", m.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)]);
        os << cell;
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace lvcheck
