#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace assemblage {

struct DensityOptions {
  std::size_t grid_size = 512;
  /// Kernel bandwidth; 0 selects Silverman's rule 0.9 min(sd, IQR/1.34) n^(-1/5).
  double bandwidth = 0.0;
  /// Multiplier applied to the selected bandwidth.
  double bandwidth_scale = 1.0;
  /// Upper end of the support. Unset means open-ended: the grid runs to
  /// max(sample) + 4h and only the lower boundary reflects.
  std::optional<double> upper = 1.4142135623730951;
  bool reflect = true;
};

struct CredibleInterval {
  double lo;
  double hi;
};

/// Kernel density estimate of a sample of distances on an even grid, plus
/// the point estimate and credible region derived from it.
struct DensitySummary {
  std::vector<double> grid;
  std::vector<double> density;  ///< trapezoid integral over grid = 1
  std::size_t sample_count = 0;
  double bandwidth = 0.0;
  /// Set when every sample has the same value; the density is then a single
  /// grid spike and the mode is this value.
  std::optional<double> degenerate_value;

  double mode = 0.0;
  double hpd_level = 0.0;
  std::vector<CredibleInterval> hpd_region;
};

/// Silverman's rule of thumb; 0 when the sample has zero spread.
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE with boundary reflection, normalized on the grid.
/// Throws InsufficientDataError for fewer than two samples.
DensitySummary kde(std::span<const double> samples, const DensityOptions& options = {});

/// Smallest grid abscissa with maximal density (the degenerate value, if any).
double mode_estimate(const DensitySummary& summary);

/// Highest-density region: the grid points whose density is at least the
/// largest threshold that still captures `level` of the trapezoid mass,
/// returned as maximal runs. Always contains the mode.
std::vector<CredibleInterval> hpd_region(const DensitySummary& summary, double level);

/// kde + mode_estimate + hpd_region.
DensitySummary summarize(std::span<const double> samples, double level, const DensityOptions& options = {});

/// Trapezoid weights of an even grid with spacing `step`.
std::vector<double> trapezoid_weights(std::size_t n, double step);

}  // namespace assemblage
