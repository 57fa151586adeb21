#include "smp/mi.hpp"

#include "smp/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace smp::mi {

namespace {

void check_domain(const Inputs& in) {
  if (!(in.volume > 0.0) || !std::isfinite(in.volume)) {
    throw DomainError(fmt::format("maintainability index: Halstead volume must be positive (got {})", in.volume));
  }
  if (!(in.loc >= 1.0) || !std::isfinite(in.loc)) {
    throw DomainError(fmt::format("maintainability index: lines of code must be at least 1 (got {})", in.loc));
  }
  if (!std::isfinite(in.cyclomatic)) {
    throw DomainError("maintainability index: cyclomatic complexity must be finite");
  }
}

double comment_term(const Inputs& in) {
  if (!in.comment_fraction) {
    throw DomainError("maintainability index: this variant requires the comment fraction");
  }
  const double c = *in.comment_fraction;
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw DomainError(fmt::format("maintainability index: comment fraction must be non-negative (got {})", c));
  }
  return 50.0 * std::sin(std::sqrt(2.4 * c));
}

double coleman_body(const Inputs& in) {
  return 171.0 - 5.2 * std::log(in.volume) - 0.23 * in.cyclomatic - 16.2 * std::log(in.loc);
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::coleman: return "coleman";
    case Variant::sei: return "sei";
    case Variant::radon: return "radon";
    case Variant::visual_studio: return "visual_studio";
  }
  return "?";
}

std::string_view to_string(Band b) noexcept {
  switch (b) {
    case Band::red: return "Red";
    case Band::yellow: return "Yellow";
    case Band::green: return "Green";
  }
  return "?";
}

Variant variant_from_string(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "coleman" || s == "eq1") return Variant::coleman;
  if (s == "sei" || s == "eq2") return Variant::sei;
  if (s == "radon" || s == "eq3") return Variant::radon;
  if (s == "visual_studio" || s == "vs" || s == "eq4") return Variant::visual_studio;
  throw ConfigError(fmt::format("unknown MI variant '{}' (expected coleman, sei, radon, visual_studio)", name));
}

Score coleman(const Inputs& in) {
  check_domain(in);
  return {coleman_body(in), Variant::coleman, std::nullopt};
}

Score sei(const Inputs& in) {
  check_domain(in);
  const double bonus = comment_term(in);
  const double value =
      171.0 - 5.2 * std::log2(in.volume) - 0.23 * in.cyclomatic - 16.2 * std::log2(in.loc) + bonus;
  return {value, Variant::sei, std::nullopt};
}

Score clamped(const Inputs& in, Variant variant) {
  if (!is_clamped(variant)) {
    throw ConfigError(fmt::format("variant '{}' is not a clamped MI variant", to_string(variant)));
  }
  check_domain(in);
  double body = coleman_body(in);
  if (variant == Variant::radon) body += comment_term(in);
  const double value = std::clamp(body * 100.0 / 171.0, 0.0, 100.0);
  return {value, variant, classify_band(value)};
}

Score compute(const Inputs& in, Variant variant) {
  switch (variant) {
    case Variant::coleman: return coleman(in);
    case Variant::sei: return sei(in);
    case Variant::radon:
    case Variant::visual_studio: return clamped(in, variant);
  }
  throw ConfigError("unknown MI variant");
}

Band classify_band(double score) {
  if (!(score >= 0.0 && score <= 100.0)) {
    throw DomainError(fmt::format("band classification needs a score in [0, 100] (got {})", score));
  }
  if (score < 10.0) return Band::red;
  if (score < 20.0) return Band::yellow;
  return Band::green;
}

}  // namespace smp::mi
