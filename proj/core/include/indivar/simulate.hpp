#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "indivar/models.hpp"
#include "indivar/rng.hpp"
#include "indivar/spaces.hpp"

namespace indivar {

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // base stream; realization r uses stream + r
};

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;

  GridSpec() = default;
  GridSpec(int nx_, int ny_, double spacing_);
  long long n_nodes() const { return 1LL * nx * ny; }
};

/// Seeded collection of realizations over a point set or a 2D grid.
struct RealizationEnsemble {
  SpaceRef space = SpaceRef::euclidean(1);
  std::vector<Point> points;        // point-set layout
  std::optional<GridSpec> grid;     // grid layout (row-major, x fastest)
  bool binary = false;
  std::vector<std::vector<double>> values;  // [realization][site]
  nlohmann::json provenance;

  int n_real() const { return static_cast<int>(values.size()); }
  int n_sites() const {
    return grid ? static_cast<int>(grid->n_nodes())
                : static_cast<int>(points.size());
  }
  double site_mean(int site) const;
  double realization_mean(int r) const;
};

/// Runs fn(0..n-1) over `workers` threads with static chunking. Tasks must
/// write disjoint state; results do not depend on the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

/// Cholesky factor with semidefinite pivot handling and ridge escalation
/// (1e-10 trace/n, escalating tenfold up to 1e-6 trace/n).
class CholeskyFactor {
 public:
  static CholeskyFactor make(const SymmetricMatrix& cov);
  Eigen::VectorXd draw(CounterRng& rng) const;
  const Eigen::MatrixXd& matrix() const { return L_; }
  double ridge_used() const { return ridge_; }

 private:
  Eigen::MatrixXd L_;
  double ridge_ = 0;
};

/// One draw of N(0, cov) via the Cholesky factor.
Eigen::VectorXd sample_gaussian_vector(const SymmetricMatrix& cov, CounterRng& rng);

/// Zero-mean Gaussian ensemble with the given covariance at the points.
RealizationEnsemble simulate_gaussian(const SpaceRef& space,
                                      std::vector<Point> points,
                                      const SymmetricMatrix& cov, int n_real,
                                      RngSpec rng, int workers = 1);

/// Mixture algorithm: draw an atom index, simulate the zero-mean Gaussian
/// field with that atom's correlation, deliver its median indicator.
RealizationEnsemble simulate_median_indicator(const MixtureSpec& mix,
                                              const SpaceRef& space,
                                              std::vector<Point> points,
                                              int n_real, RngSpec rng,
                                              int workers = 1);

/// Excursion-set indicator 1{Z >= threshold} of a standard Gaussian field.
RealizationEnsemble simulate_excursion(const GaussianCorrelation& rho,
                                       double threshold,
                                       std::vector<Point> points, int n_real,
                                       RngSpec rng, int workers = 1);

/// Poisson-product simulation of the unit-sphere exponential indicator
/// variogram (1 - exp(-t d_GC))/4: a Poisson number of independent sign
/// fields with the linear variogram are multiplied; each sign field comes
/// from a Q-term central-limit sampler whose second moments are exact.
RealizationEnsemble simulate_sphere_exponential(double t, const SpaceRef& space,
                                                std::vector<Point> points, int Q,
                                                int n_real, RngSpec rng,
                                                int workers = 1);

struct SisOptions {
  int max_data = 24;
  double radius = std::numeric_limits<double>::infinity();
  double mean = 0.5;
};

/// Sequential indicator simulation on a 2D grid with simple kriging of the
/// indicator, covariance C = m(1-m) - g. Kriging probabilities are clamped
/// to [0,1]; the clamp count is recorded in the provenance.
RealizationEnsemble sequential_indicator_grid(const VariogramModel& model,
                                              const GridSpec& grid,
                                              const SisOptions& options,
                                              int n_real, RngSpec rng,
                                              int workers = 1);

}  // namespace indivar
