#include "indivar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

namespace indivar {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GridSpec::GridSpec(int nx_, int ny_, double spacing_)
    : nx(nx_), ny(ny_), spacing(spacing_) {
  if (nx < 1 || ny < 1) throw input_error("grid dimensions must be positive");
  if (!(spacing > 0)) throw input_error("grid spacing must be positive");
  if (n_nodes() > 1'000'000)
    throw input_error("grid exceeds the configured node cap (1e6)");
}

double RealizationEnsemble::site_mean(int site) const {
  double s = 0;
  for (const auto& v : values) s += v[site];
  return s / static_cast<double>(values.size());
}

double RealizationEnsemble::realization_mean(int r) const {
  const auto& v = values[r];
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

/// Semidefinite-tolerant Cholesky. Zero pivots are accepted when the rest of
/// the column vanishes as well (rank-deficient covariances such as constant
/// fields). Returns false with the offending leading minor otherwise.
bool try_cholesky(const Eigen::MatrixXd& a, Eigen::MatrixXd& L, int& bad_minor) {
  const int n = static_cast<int>(a.rows());
  L.setZero(n, n);
  double scale = 0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  const double piv_tol = 1e-12 * std::max(scale, 1e-300);
  for (int k = 0; k < n; ++k) {
    double piv = a(k, k);
    for (int j = 0; j < k; ++j) piv -= L(k, j) * L(k, j);
    if (piv > piv_tol) {
      L(k, k) = std::sqrt(piv);
      for (int i = k + 1; i < n; ++i) {
        double v = a(i, k);
        for (int j = 0; j < k; ++j) v -= L(i, j) * L(k, j);
        L(i, k) = v / L(k, k);
      }
    } else if (piv >= -piv_tol) {
      L(k, k) = 0;
      for (int i = k + 1; i < n; ++i) {
        double v = a(i, k);
        for (int j = 0; j < k; ++j) v -= L(i, j) * L(k, j);
        if (std::abs(v) > 1e-7 * std::max(scale, 1e-300)) {
          bad_minor = k + 1;
          return false;
        }
        L(i, k) = 0;
      }
    } else {
      bad_minor = k + 1;
      return false;
    }
  }
  return true;
}

}  // namespace

CholeskyFactor CholeskyFactor::make(const SymmetricMatrix& cov) {
  const int n = cov.size();
  for (int i = 0; i < n; ++i)
    if (cov(i, i) < 0)
      throw input_error("covariance matrix has a negative diagonal entry");
  const Eigen::MatrixXd dense = cov.dense();
  const double trace_over_n = dense.trace() / std::max(1, n);
  CholeskyFactor f;
  int bad_minor = 0;
  if (try_cholesky(dense, f.L_, bad_minor)) return f;
  double ridge = 1e-10 * trace_over_n;
  for (int attempt = 0; attempt < 5; ++attempt, ridge *= 10.0) {
    Eigen::MatrixXd shifted = dense;
    shifted.diagonal().array() += ridge;
    if (try_cholesky(shifted, f.L_, bad_minor)) {
      f.ridge_ = ridge;
      return f;
    }
    if (ridge >= 1e-6 * trace_over_n) break;
  }
  std::ostringstream os;
  os << "Cholesky factorization failed after ridge escalation; leading minor "
     << bad_minor << " is not positive semidefinite";
  throw numeric_error(os.str());
}

Eigen::VectorXd CholeskyFactor::draw(CounterRng& rng) const {
  const int n = static_cast<int>(L_.rows());
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.next_normal();
  return L_ * w;
}

Eigen::VectorXd sample_gaussian_vector(const SymmetricMatrix& cov,
                                       CounterRng& rng) {
  return CholeskyFactor::make(cov).draw(rng);
}

namespace {

SymmetricMatrix correlation_matrix(const GaussianCorrelation& corr,
                                   const std::vector<Point>& points) {
  const int n = static_cast<int>(points.size());
  SymmetricMatrix r(n);
  for (int k = 0; k < n; ++k) {
    r.set(k, k, 1.0);
    for (int l = 0; l < k; ++l) r.set(k, l, corr(points[k], points[l]));
  }
  return r;
}

nlohmann::json rng_json(const RngSpec& rng) {
  return {{"seed", rng.seed}, {"stream", rng.stream}};
}

}  // namespace

RealizationEnsemble simulate_gaussian(const SpaceRef& space,
                                      std::vector<Point> points,
                                      const SymmetricMatrix& cov, int n_real,
                                      RngSpec rng, int workers) {
  if (n_real < 1) throw input_error("need at least one realization");
  if (cov.size() != static_cast<int>(points.size()))
    throw input_error("covariance size does not match the point count");
  const CholeskyFactor factor = CholeskyFactor::make(cov);
  RealizationEnsemble ens;
  ens.space = space;
  ens.points = std::move(points);
  ens.binary = false;
  ens.values.assign(n_real, {});
  parallel_for(n_real, workers, [&](int r) {
    CounterRng stream_rng(rng.seed, rng.stream + static_cast<std::uint64_t>(r));
    const Eigen::VectorXd y = factor.draw(stream_rng);
    ens.values[r].assign(y.data(), y.data() + y.size());
  });
  ens.provenance = {{"algorithm", "gaussian_cholesky"},
                    {"rng", rng_json(rng)},
                    {"n_real", n_real},
                    {"ridge", factor.ridge_used()}};
  return ens;
}

RealizationEnsemble simulate_median_indicator(const MixtureSpec& mix,
                                              const SpaceRef& space,
                                              std::vector<Point> points,
                                              int n_real, RngSpec rng,
                                              int workers) {
  mix.validate();
  if (n_real < 1) throw input_error("need at least one realization");
  const int n_atoms = static_cast<int>(mix.atoms.size());
  std::vector<double> cum(n_atoms);
  const double total = mix.total_weight();
  double acc = 0;
  for (int i = 0; i < n_atoms; ++i) {
    if (!mix.atoms[i].correlation)
      throw input_error("mixture atom " + std::to_string(i) +
                        " is not a correlation function");
    acc += mix.atoms[i].weight / total;  // normalized for simulation
    cum[i] = acc;
  }
  cum[n_atoms - 1] = 1.0;

  std::vector<CholeskyFactor> factors;
  factors.reserve(n_atoms);
  for (int i = 0; i < n_atoms; ++i) {
    try {
      factors.push_back(CholeskyFactor::make(
          correlation_matrix(*mix.atoms[i].correlation, points)));
    } catch (const numeric_error&) {
      throw numeric_error("mixture atom " + std::to_string(i) + " (" +
                          mix.atoms[i].correlation->describe() +
                          ") has a non-PSD correlation matrix at these points");
    }
  }

  const int n = static_cast<int>(points.size());
  RealizationEnsemble ens;
  ens.space = space;
  ens.points = std::move(points);
  ens.binary = true;
  ens.values.assign(n_real, {});
  parallel_for(n_real, workers, [&](int r) {
    CounterRng stream_rng(rng.seed, rng.stream + static_cast<std::uint64_t>(r));
    const double u = stream_rng.next_double();
    int atom = 0;
    while (atom < n_atoms - 1 && u >= cum[atom]) ++atom;
    const Eigen::VectorXd y = factors[atom].draw(stream_rng);
    auto& v = ens.values[r];
    v.resize(n);
    for (int i = 0; i < n; ++i) v[i] = y(i) > 0 ? 1.0 : 0.0;
  });
  ens.provenance = {{"algorithm", "median_indicator_mixture"},
                    {"rng", rng_json(rng)},
                    {"n_real", n_real},
                    {"n_atoms", n_atoms}};
  return ens;
}

RealizationEnsemble simulate_excursion(const GaussianCorrelation& rho,
                                       double threshold,
                                       std::vector<Point> points, int n_real,
                                       RngSpec rng, int workers) {
  if (n_real < 1) throw input_error("need at least one realization");
  const CholeskyFactor factor =
      CholeskyFactor::make(correlation_matrix(rho, points));
  const int n = static_cast<int>(points.size());
  RealizationEnsemble ens;
  ens.space = rho.host();
  ens.points = std::move(points);
  ens.binary = true;
  ens.values.assign(n_real, {});
  parallel_for(n_real, workers, [&](int r) {
    CounterRng stream_rng(rng.seed, rng.stream + static_cast<std::uint64_t>(r));
    const Eigen::VectorXd y = factor.draw(stream_rng);
    auto& v = ens.values[r];
    v.resize(n);
    for (int i = 0; i < n; ++i) v[i] = y(i) >= threshold ? 1.0 : 0.0;
  });
  ens.provenance = {{"algorithm", "excursion_threshold"},
                    {"threshold", threshold},
                    {"correlation", rho.describe()},
                    {"rng", rng_json(rng)},
                    {"n_real", n_real}};
  return ens;
}

RealizationEnsemble simulate_sphere_exponential(double t, const SpaceRef& space,
                                                std::vector<Point> points, int Q,
                                                int n_real, RngSpec rng,
                                                int workers) {
  if (!(t > 0)) throw input_error("rate t must be positive");
  if (Q < 1) throw input_error("Q must be a positive integer");
  if (n_real < 1) throw input_error("need at least one realization");
  if (space.kind() != SpaceKind::sphere || std::abs(space.radius() - 1.0) > 1e-12)
    throw input_error("sphere exponential simulation runs on the unit sphere");
  const int m = space.coord_size();  // N + 1
  for (const auto& p : points) {
    if (static_cast<int>(p.coords.size()) != m)
      throw input_error("point dimension does not match the sphere");
    double s = 0;
    for (double c : p.coords) s += c * c;
    if (std::abs(std::sqrt(s) - 1.0) > 1e-9)
      throw input_error("point is not on the unit sphere");
  }
  const int n = static_cast<int>(points.size());
  const double poisson_mean = kPi / 2.0 * t;

  RealizationEnsemble ens;
  ens.space = space;
  ens.points = points;
  ens.binary = true;
  ens.values.assign(n_real, {});
  const double clt_scale = 1.0;  // sign() is scale-invariant
  (void)clt_scale;
  parallel_for(n_real, workers, [&](int r) {
    CounterRng stream_rng(rng.seed, rng.stream + static_cast<std::uint64_t>(r));
    auto& v = ens.values[r];
    v.resize(n);
    const long K = stream_rng.next_poisson(poisson_mean);
    if (K == 0) {
      const double b = (stream_rng.next_u64() & 1) ? 1.0 : 0.0;
      std::fill(v.begin(), v.end(), b);
      return;
    }
    std::vector<int> prod(n, 1);
    std::vector<double> coord_sum(m);
    for (long copy = 0; copy < K; ++copy) {
      std::fill(coord_sum.begin(), coord_sum.end(), 0.0);
      for (int q = 0; q < Q; ++q) {
        const std::uint64_t u = stream_rng.next_u64();
        const std::uint32_t idx = static_cast<std::uint32_t>(
            ((u >> 32) * static_cast<std::uint64_t>(m)) >> 32);
        coord_sum[idx] += (u & 1) ? 1.0 : -1.0;
      }
      for (int i = 0; i < n; ++i) {
        double y = 0;
        for (int l = 0; l < m; ++l) y += points[i].coords[l] * coord_sum[l];
        if (y <= 0) prod[i] = -prod[i];
      }
    }
    for (int i = 0; i < n; ++i) v[i] = (1 + prod[i]) / 2;
  });
  ens.provenance = {{"algorithm", "sphere_exponential_poisson_product"},
                    {"t", t},
                    {"Q", Q},
                    {"poisson_mean", poisson_mean},
                    {"rng", rng_json(rng)},
                    {"n_real", n_real}};
  return ens;
}

namespace {

/// Expanding-ring nearest-neighbor search over simulated grid nodes.
class GridNeighborhood {
 public:
  GridNeighborhood(int nx, int ny, double spacing, int max_data, double radius)
      : nx_(nx), ny_(ny), spacing_(spacing), max_data_(max_data),
        radius_(radius) {}

  /// Returns indices of up to max_data nearest simulated nodes, ordered by
  /// (distance, node index).
  std::vector<int> collect(int cx, int cy, const std::vector<char>& simulated) const {
    using Entry = std::pair<double, int>;  // (dist2 in cells, node)
    std::priority_queue<Entry> heap;       // max-heap on dist2
    const double rad_cells =
        std::isfinite(radius_) ? radius_ / spacing_ : 1e18;
    const double rad2 = rad_cells * rad_cells;
    const int max_ring = std::max(nx_, ny_);
    for (int ring = 1; ring <= max_ring; ++ring) {
      if (static_cast<int>(heap.size()) >= max_data_ &&
          static_cast<double>(ring) * ring > heap.top().first)
        break;
      if (static_cast<double>(ring) > rad_cells + 1.0 && !heap.empty()) break;
      auto consider = [&](int x, int y) {
        if (x < 0 || x >= nx_ || y < 0 || y >= ny_) return;
        const int node = y * nx_ + x;
        if (!simulated[node]) return;
        const double dx = x - cx, dy = y - cy;
        const double d2 = dx * dx + dy * dy;
        if (d2 > rad2) return;
        if (static_cast<int>(heap.size()) < max_data_) {
          heap.push({d2, node});
        } else if (d2 < heap.top().first) {
          heap.pop();
          heap.push({d2, node});
        }
      };
      for (int x = cx - ring; x <= cx + ring; ++x) {
        consider(x, cy - ring);
        consider(x, cy + ring);
      }
      for (int y = cy - ring + 1; y <= cy + ring - 1; ++y) {
        consider(cx - ring, y);
        consider(cx + ring, y);
      }
    }
    std::vector<Entry> entries;
    entries.reserve(heap.size());
    while (!heap.empty()) {
      entries.push_back(heap.top());
      heap.pop();
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    std::vector<int> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.second);
    return out;
  }

 private:
  int nx_, ny_;
  double spacing_;
  int max_data_;
  double radius_;
};

}  // namespace

RealizationEnsemble sequential_indicator_grid(const VariogramModel& model,
                                              const GridSpec& grid,
                                              const SisOptions& options,
                                              int n_real, RngSpec rng,
                                              int workers) {
  if (n_real < 1) throw input_error("need at least one realization");
  if (!(options.mean > 0 && options.mean < 1))
    throw input_error("target mean must lie in (0,1)");
  if (options.max_data < 1) throw input_error("max_data must be positive");
  if (model.host().kind() != SpaceKind::euclidean || model.host().dim() != 2)
    throw input_error("grid simulation needs a model on the 2D Euclidean space");
  const int nx = grid.nx, ny = grid.ny;
  const int n_nodes = nx * ny;
  const double m = options.mean;
  const double var = m * (1.0 - m);

  // covariance lookup per lag cell: C(h) = m(1-m) - g(h)
  std::vector<double> cov_table(static_cast<std::size_t>(nx) * ny);
  {
    const Point origin = Point::at({0.0, 0.0});
    for (int dy = 0; dy < ny; ++dy)
      for (int dx = 0; dx < nx; ++dx) {
        const Point p = Point::at({dx * grid.spacing, dy * grid.spacing});
        cov_table[static_cast<std::size_t>(dy) * nx + dx] =
            var - model.eval(origin, p);
      }
  }
  auto cov = [&](int dx, int dy) {
    return cov_table[static_cast<std::size_t>(std::abs(dy)) * nx + std::abs(dx)];
  };

  GridNeighborhood hood(nx, ny, grid.spacing, options.max_data, options.radius);
  RealizationEnsemble ens;
  ens.space = model.host();
  ens.grid = grid;
  ens.binary = true;
  ens.values.assign(n_real, {});
  std::vector<long long> clamped(n_real, 0);

  parallel_for(n_real, workers, [&](int r) {
    CounterRng stream_rng(rng.seed, rng.stream + static_cast<std::uint64_t>(r));
    auto& v = ens.values[r];
    v.assign(n_nodes, 0.0);
    std::vector<char> simulated(n_nodes, 0);
    std::vector<int> path(n_nodes);
    for (int i = 0; i < n_nodes; ++i) path[i] = i;
    for (int i = n_nodes - 1; i > 0; --i)
      std::swap(path[i],
                path[stream_rng.next_below(static_cast<std::uint32_t>(i + 1))]);

    Eigen::MatrixXd K;
    Eigen::VectorXd rhs, residual;
    for (int step = 0; step < n_nodes; ++step) {
      const int node = path[step];
      const int cx = node % nx, cy = node / nx;
      double p = m;
      if (step > 0) {
        const std::vector<int> nbr = hood.collect(cx, cy, simulated);
        const int nd = static_cast<int>(nbr.size());
        if (nd > 0) {
          K.resize(nd, nd);
          rhs.resize(nd);
          residual.resize(nd);
          for (int i = 0; i < nd; ++i) {
            const int xi = nbr[i] % nx, yi = nbr[i] / nx;
            rhs(i) = cov(xi - cx, yi - cy);
            residual(i) = v[nbr[i]] - m;
            for (int j = 0; j <= i; ++j) {
              const int xj = nbr[j] % nx, yj = nbr[j] / nx;
              K(i, j) = K(j, i) = cov(xi - xj, yi - yj);
            }
          }
          Eigen::LLT<Eigen::MatrixXd> llt(K);
          if (llt.info() != Eigen::Success) {
            K.diagonal().array() += 1e-10;
            llt.compute(K);
            for (double ridge = 1e-9;
                 llt.info() != Eigen::Success && ridge <= 1e-4; ridge *= 10) {
              K.diagonal().array() += ridge;
              llt.compute(K);
            }
            if (llt.info() != Eigen::Success)
              throw numeric_error("kriging system is not factorizable");
          }
          const Eigen::VectorXd w = llt.solve(rhs);
          p = m + w.dot(residual);
          if (p < 0.0 || p > 1.0) {
            ++clamped[r];
            p = std::clamp(p, 0.0, 1.0);
          }
        }
      }
      const double u = stream_rng.next_double();
      v[node] = (u < p) ? 1.0 : 0.0;
      simulated[node] = 1;
    }
  });

  long long total_clamped = 0;
  for (long long c : clamped) total_clamped += c;
  ens.provenance = {{"algorithm", "sequential_indicator_simple_kriging"},
                    {"model", model.describe()},
                    {"grid", {{"nx", nx}, {"ny", ny}, {"spacing", grid.spacing}}},
                    {"mean", m},
                    {"max_data", options.max_data},
                    {"radius", std::isfinite(options.radius)
                                   ? nlohmann::json(options.radius)
                                   : nlohmann::json("inf")},
                    {"rng", rng_json(rng)},
                    {"n_real", n_real},
                    {"clamped_probabilities", total_clamped}};
  return ens;
}

}  // namespace indivar
