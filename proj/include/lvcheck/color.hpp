#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lvcheck {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kDefaultForeground{0, 0, 0};
inline constexpr Rgb kDefaultBackground{255, 255, 255};

/// Parses "#RRGGBB" (case-insensitive hex). Returns nullopt on any other shape.
std::optional<Rgb> parse_hex_color(std::string_view text);
std::string to_hex(Rgb c);

/// sRGB relative luminance in [0, 1].
double relative_luminance(Rgb c);

/// (L_light + 0.05) / (L_dark + 0.05), in [1, 21]. Symmetric in its arguments.
double contrast_ratio(Rgb a, Rgb b);

}  // namespace lvcheck
