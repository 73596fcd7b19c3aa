#include "indivar/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace indivar {

LagBins LagBins::grid_axis(int n_lags, double spacing) {
  if (n_lags < 1) throw input_error("need at least one lag");
  LagBins b;
  for (int j = 1; j <= n_lags; ++j) b.centers.push_back(j * spacing);
  b.tol = spacing / 2.0;
  b.validate();
  return b;
}

LagBins LagBins::at(std::vector<double> centers, double tol) {
  LagBins b;
  b.centers = std::move(centers);
  b.tol = tol;
  b.validate();
  return b;
}

void LagBins::validate() const {
  if (centers.empty()) throw input_error("empty lag binning");
  if (!(tol >= 0)) throw input_error("bin tolerance must be nonnegative");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!(centers[i] > 0)) throw input_error("lag centers must be positive");
    if (i > 0 && centers[i] - centers[i - 1] <= 2 * tol - 1e-15)
      throw input_error("lag bins overlap");
  }
}

namespace {

int bin_of(const LagBins& bins, double h) {
  for (std::size_t i = 0; i < bins.centers.size(); ++i)
    if (std::abs(h - bins.centers[i]) <= bins.tol) return static_cast<int>(i);
  return -1;
}

}  // namespace

ExperimentalCurve experimental_variogram(const RealizationEnsemble& ens,
                                         const LagBins& bins, double alpha) {
  if (!(alpha > 0)) throw input_error("order alpha must be positive");
  bins.validate();
  const int n_bins = static_cast<int>(bins.centers.size());
  const int n_real = ens.n_real();
  if (n_real == 0) throw input_error("empty ensemble");

  ExperimentalCurve curve;
  curve.alpha = alpha;
  curve.per_realization.assign(n_real, {});

  // pair list resolved once, shared across realizations
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> pair_bin;
  if (ens.grid) {
    const int nx = ens.grid->nx, ny = ens.grid->ny;
    for (int b = 0; b < n_bins; ++b) {
      // exact-axis lags: j cells along the first axis
      const double cells = bins.centers[b] / ens.grid->spacing;
      const int j = static_cast<int>(std::lround(cells));
      if (j < 1 || j >= nx) continue;
      if (std::abs(j * ens.grid->spacing - bins.centers[b]) > bins.tol) continue;
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x + j < nx; ++x) {
          pairs.push_back({y * nx + x, y * nx + x + j});
          pair_bin.push_back(b);
        }
    }
  } else {
    const int n = static_cast<int>(ens.points.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double h = distance(ens.space, ens.points[i], ens.points[j]);
        const int b = bin_of(bins, h);
        if (b >= 0) {
          pairs.push_back({i, j});
          pair_bin.push_back(b);
        }
      }
  }

  std::vector<double> pooled_sum(n_bins, 0.0);
  std::vector<long long> pooled_count(n_bins, 0);
  for (int r = 0; r < n_real; ++r) {
    std::vector<double> sum(n_bins, 0.0);
    std::vector<long long> count(n_bins, 0);
    const auto& v = ens.values[r];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double d = std::abs(v[pairs[p].first] - v[pairs[p].second]);
      sum[pair_bin[p]] += std::pow(d, alpha);
      ++count[pair_bin[p]];
    }
    auto& rc = curve.per_realization[r];
    for (int b = 0; b < n_bins; ++b) {
      if (count[b] == 0) continue;
      rc.push_back({bins.centers[b], 0.5 * sum[b] / count[b], count[b]});
      pooled_sum[b] += sum[b];
      pooled_count[b] += count[b];
    }
  }
  for (int b = 0; b < n_bins; ++b) {
    if (pooled_count[b] == 0) {
      curve.warnings.push_back("bin at lag " + std::to_string(bins.centers[b]) +
                               " is empty and was omitted");
      continue;
    }
    curve.average.push_back(
        {bins.centers[b], 0.5 * pooled_sum[b] / pooled_count[b], pooled_count[b]});
  }
  return curve;
}

double near_origin_exponent(const ExperimentalCurve& curve, int n_lags) {
  if (n_lags < 2) throw input_error("need at least two lags for a slope");
  if (static_cast<int>(curve.average.size()) < n_lags)
    throw input_error("curve has fewer bins than requested");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n_lags; ++i) {
    const auto& b = curve.average[i];
    if (!(b.estimate > 0))
      throw input_error("zero estimate in the near-origin range; slope undefined");
    const double x = std::log(b.lag), y = std::log(b.estimate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = n_lags;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace indivar
