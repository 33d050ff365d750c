#include "levrep/ensemble.hpp"

#include <cmath>
#include <numbers>

namespace levrep {

std::string_view to_string(SystemKind kind) {
  return kind == SystemKind::Rectangle ? "rect" : "kepler";
}

SystemKind parse_system(std::string_view text) {
  if (text == "rect" || text == "rectangle") return SystemKind::Rectangle;
  if (text == "kepler") return SystemKind::Kepler;
  throw ConfigError("unknown system '" + std::string(text) + "' (expected rect or kepler)");
}

double ParamLaw::sigma() const {
  if (spread_kind == SpreadKind::HalfWidthHalfMax) return spread / std::sqrt(2.0 * std::numbers::ln2);
  return spread;
}

void ParamLaw::validate() const {
  if (!std::isfinite(mean) || !std::isfinite(spread) || !std::isfinite(lower_cut) ||
      !std::isfinite(upper_cut))
    throw ConfigError("parameter law has non-finite values");
  if (!(lower_cut < mean && mean < upper_cut))
    throw ConfigError("parameter law requires lower_cut < mean < upper_cut");
  if (spread < 0) throw ConfigError("parameter law spread must be >= 0");
  if (lower_cut <= 0) throw ConfigError("parameter cuts must be positive");
}

ParamLaw ParamLaw::rectangle_default() { return {1.0, 0.2, 0.5, 2.0, SpreadKind::StdDev}; }

// Not fixed by the source model; a declared choice.
ParamLaw ParamLaw::kepler_default() { return {5.0, 0.5, 3.0, 8.0, SpreadKind::StdDev}; }

void EnsembleConfig::validate() const {
  if (!(energy > 0) || !std::isfinite(energy)) throw ConfigError("energy must be > 0");
  if (!(window_width > 0) || !std::isfinite(window_width))
    throw ConfigError("window width must be > 0");
  if (window_width > energy / 10)
    throw ConfigError("window width must not exceed energy/10 (stationarity)");
  if (member_count < 1) throw ConfigError("member count must be >= 1");
  if (system == SystemKind::Kepler && energy < 10)
    throw ConfigError("kepler running energy must be >= 10");
  param_law.validate();
}

EnsembleConfig EnsembleConfig::defaults(SystemKind system) {
  EnsembleConfig c;
  c.system = system;
  c.param_law = system == SystemKind::Rectangle ? ParamLaw::rectangle_default()
                                                : ParamLaw::kepler_default();
  return c;
}

namespace detail {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

double sample_parameter(const ParamLaw& law, std::uint64_t seed, std::uint64_t index) {
  const double sigma = law.sigma();
  if (sigma == 0) return law.mean;

  const std::uint64_t stream = detail::mix64(seed ^ 0x5851f42d4c957f2dULL);
  const std::uint64_t key = detail::mix64(stream + detail::mix64(index));
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const std::uint64_t base = key + 2 * static_cast<std::uint64_t>(attempt);
    const double u1 = detail::to_unit_open(detail::mix64(base));
    const double u2 = detail::to_unit_open(detail::mix64(base + 1));
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double value = law.mean + sigma * z;
    if (value >= law.lower_cut && value <= law.upper_cut) return value;
  }
  throw ConfigError("parameter sampling exceeded the rejection bound; cuts are too narrow");
}

std::vector<double> sample_parameters(const EnsembleConfig& config, std::uint64_t begin,
                                      std::uint64_t end) {
  config.validate();
  std::vector<double> out;
  if (end <= begin) return out;
  out.reserve(end - begin);
  for (std::uint64_t i = begin; i < end; ++i)
    out.push_back(sample_parameter(config.param_law, config.seed, i));
  return out;
}

std::vector<double> sample_parameters(const EnsembleConfig& config) {
  return sample_parameters(config, 0, config.member_count);
}

}  // namespace levrep
