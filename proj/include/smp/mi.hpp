#pragma once

#include <optional>
#include <string_view>

namespace smp::mi {

enum class Variant { coleman, sei, radon, visual_studio };
enum class Band { red, yellow, green };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(Band b) noexcept;
/// Accepts the canonical names plus `vs`/`eq1`..`eq4`; throws ConfigError.
Variant variant_from_string(std::string_view name);

[[nodiscard]] constexpr bool is_clamped(Variant v) noexcept {
  return v == Variant::radon || v == Variant::visual_studio;
}
[[nodiscard]] constexpr bool needs_comments(Variant v) noexcept {
  return v == Variant::sei || v == Variant::radon;
}

/// Halstead volume, cyclomatic complexity, lines of code, and the fraction
/// of comment lines in [0, 1].
struct Inputs {
  double volume = 0.0;
  double cyclomatic = 0.0;
  double loc = 0.0;
  std::optional<double> comment_fraction;
};

struct Score {
  double value = 0.0;
  Variant variant = Variant::coleman;
  std::optional<Band> band;  // only set for clamped variants
};

/// 171 - 5.2 ln V - 0.23 G - 16.2 ln L, unclamped.
Score coleman(const Inputs& in);

/// Base-2 logarithms plus the 50 sin(sqrt(2.4 C)) comment bonus, unclamped.
Score sei(const Inputs& in);

/// Radon and Visual Studio forms, rescaled by 100/171 into [0, 100] and banded.
Score clamped(const Inputs& in, Variant variant);

/// Dispatches on the variant.
Score compute(const Inputs& in, Variant variant);

/// [0,10) red, [10,20) yellow, [20,100] green. Throws DomainError outside [0,100].
Band classify_band(double score);

}  // namespace smp::mi
