#include "lvcheck/color.hpp"
#include "lvcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lvcheck {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::BadBounds: return "BadBounds";
    case ErrorCode::BadAttribute: return "BadAttribute";
    case ErrorCode::MissingRoot: return "MissingRoot";
    case ErrorCode::EmptyGui: return "EmptyGui";
    case ErrorCode::TooManyNodes: return "TooManyNodes";
    case ErrorCode::InvalidClass: return "InvalidClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoLabeledNodes: return "NoLabeledNodes";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

double linearize(std::uint8_t channel) {
  const double s = channel / 255.0;
  return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

}  // namespace

std::optional<Rgb> parse_hex_color(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  int v[6];
  for (int i = 0; i < 6; ++i) {
    v[i] = hex_digit(text[i + 1]);
    if (v[i] < 0) return std::nullopt;
  }
  return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]),
             static_cast<std::uint8_t>(v[2] * 16 + v[3]),
             static_cast<std::uint8_t>(v[4] * 16 + v[5])};
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

double relative_luminance(Rgb c) {
  return 0.2126 * linearize(c.r) + 0.7152 * linearize(c.g) + 0.0722 * linearize(c.b);
}

double contrast_ratio(Rgb a, Rgb b) {
  const double la = relative_luminance(a);
  const double lb = relative_luminance(b);
  return (std::max(la, lb) + 0.05) / (std::min(la, lb) + 0.05);
}

}  // namespace lvcheck
