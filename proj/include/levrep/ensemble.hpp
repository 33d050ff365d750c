#pragma once

// Parametric ensembles: experiment description and deterministic,
// index-addressable sampling of the system parameter (alpha or beta).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace levrep {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SystemKind { Rectangle, Kepler };

std::string_view to_string(SystemKind kind);
SystemKind parse_system(std::string_view text);

/// How `spread` is read: as the standard deviation of the normal law, or as
/// its half width at half maximum (sigma = hwhm / sqrt(2 ln 2)).
enum class SpreadKind { StdDev, HalfWidthHalfMax };

struct ParamLaw {
  double mean = 1.0;
  double spread = 0.2;
  double lower_cut = 0.5;
  double upper_cut = 2.0;
  SpreadKind spread_kind = SpreadKind::StdDev;

  double sigma() const;
  void validate() const;

  static ParamLaw rectangle_default();
  static ParamLaw kepler_default();
};

struct EnsembleConfig {
  SystemKind system = SystemKind::Rectangle;
  double energy = 1e4;        // running energy, units of the mean spacing
  double window_width = 100;  // W, same units
  std::uint64_t member_count = 300000;
  std::uint64_t seed = 1;
  ParamLaw param_law = ParamLaw::rectangle_default();

  void validate() const;
  static EnsembleConfig defaults(SystemKind system);
};

/// Upper bound on rejection attempts per sample before the truncation cuts
/// are declared pathological.
inline constexpr int kMaxRejections = 1000;

/// The i-th parameter value. Depends only on (seed, law, index).
double sample_parameter(const ParamLaw& law, std::uint64_t seed, std::uint64_t index);

/// Values for indices [begin, end).
std::vector<double> sample_parameters(const EnsembleConfig& config, std::uint64_t begin,
                                      std::uint64_t end);
std::vector<double> sample_parameters(const EnsembleConfig& config);

namespace detail {
// Counter-based 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);
// Uniform in (0, 1) from the top 53 bits.
double to_unit_open(std::uint64_t bits);
}  // namespace detail

}  // namespace levrep
