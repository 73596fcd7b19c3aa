#pragma once

#include <string>
#include <vector>

#include "indivar/simulate.hpp"

namespace indivar {

/// Lag binning. Grid ensembles use exact-axis pairs along the first axis;
/// point-set ensembles bin all pairs by host distance.
struct LagBins {
  std::vector<double> centers;  // increasing, positive
  double tol = 0;               // half-width per bin

  static LagBins grid_axis(int n_lags, double spacing);
  static LagBins at(std::vector<double> centers, double tol);
  void validate() const;  // non-overlapping, centers > 0
};

struct CurveBin {
  double lag = 0;
  double estimate = 0;
  long long pair_count = 0;
};

/// Per-bin order-alpha estimates: per-realization curves and the pooled
/// pair-count-weighted ensemble average.
struct ExperimentalCurve {
  double alpha = 2.0;
  std::vector<CurveBin> average;
  std::vector<std::vector<CurveBin>> per_realization;
  std::vector<std::string> warnings;  // omitted empty bins
};

/// Half the average of |dZ|^alpha over pairs in each bin; alpha = 2 is the
/// variogram, alpha = 1 the madogram. For binary ensembles all orders agree.
ExperimentalCurve experimental_variogram(const RealizationEnsemble& ens,
                                         const LagBins& bins, double alpha);

/// Least-squares slope of log(estimate) against log(lag) over the first
/// n_lags bins of the ensemble-average curve.
double near_origin_exponent(const ExperimentalCurve& curve, int n_lags = 4);

}  // namespace indivar
