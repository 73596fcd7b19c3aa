#include "indivar/validity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "indivar/rng.hpp"

namespace indivar {

namespace {
constexpr double kCandidateCap = 1e8;

bool lex_less(const std::vector<long long>& a, const std::vector<long long>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}
}  // namespace

Configuration::Configuration(SpaceRef space_, std::vector<Point> points_,
                             SymmetricMatrix g_)
    : space(std::move(space_)), points(std::move(points_)), g(std::move(g_)) {
  const int n = g.size();
  if (n < 2) throw input_error("configuration needs at least two points");
  if (!points.empty() && static_cast<int>(points.size()) != n)
    throw input_error("point count does not match the matrix size");
  for (int k = 0; k < n; ++k) {
    if (g(k, k) != 0.0)
      throw input_error("candidate variogram matrix must have a zero diagonal");
    for (int l = 0; l < k; ++l)
      if (g(k, l) < 0)
        throw input_error("candidate variogram matrix must be nonnegative");
  }
}

Configuration Configuration::from_matrix(SymmetricMatrix m) {
  return Configuration(SpaceRef::euclidean(1), {}, std::move(m));
}

Configuration gamma_matrix(const VariogramModel& model,
                           std::vector<Point> points) {
  const int n = static_cast<int>(points.size());
  SymmetricMatrix g(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < k; ++l) g.set(k, l, model.eval(points[k], points[l]));
  return Configuration(model.host(), std::move(points), std::move(g));
}

long long WeightVector::sigma() const {
  long long s = 0;
  for (long long v : lambdas) s += v;
  return s;
}

long long WeightVector::gap() const {
  const int n = static_cast<int>(lambdas.size());
  if (n == 0) return 0;
  if (n > 24)
    throw input_error(
        "gap enumeration limited to n <= 24 (NP-hard in general); "
        "use the rounded_psd family instead");
  // Gray-code walk over z in {-1,1}^n with z_0 fixed (|.| is sign-symmetric).
  long long dot = 0;
  for (long long v : lambdas) dot += v;
  long long best = std::llabs(dot);
  std::vector<int> z(n, 1);
  const std::uint64_t half = 1ULL << (n - 1);
  for (std::uint64_t i = 1; i < half && best > 0; ++i) {
    const int bit = static_cast<int>(std::countr_zero(i)) + 1;  // flip z[bit]
    dot -= 2LL * z[bit] * lambdas[bit];
    z[bit] = -z[bit];
    best = std::min(best, std::llabs(dot));
  }
  return best;
}

namespace {

/// Odometer enumeration of integer vectors with per-coordinate ranges,
/// maintaining s = G lambda and Q = lambda^T G lambda incrementally.
/// visit(lambda, sigma, Q) is called for every vector including the start.
template <class Visit>
void enumerate_box(const Eigen::MatrixXd& G, const std::vector<int>& lo,
                   const std::vector<int>& hi, Visit&& visit) {
  const int n = static_cast<int>(G.rows());
  std::vector<long long> lam(n);
  for (int i = 0; i < n; ++i) {
    if (lo[i] > hi[i]) return;
    lam[i] = lo[i];
  }
  Eigen::VectorXd lamd(n);
  for (int i = 0; i < n; ++i) lamd(i) = static_cast<double>(lam[i]);
  Eigen::VectorXd s = G * lamd;
  double Q = lamd.dot(s);
  long long sigma = 0;
  for (auto v : lam) sigma += v;

  auto apply_delta = [&](int i, long long delta) {
    const double d = static_cast<double>(delta);
    Q += 2.0 * d * s(i) + d * d * G(i, i);
    s += d * G.col(i);
    lam[i] += delta;
    sigma += delta;
  };

  while (true) {
    visit(lam, sigma, Q);
    int pos = 0;
    while (pos < n && lam[pos] == hi[pos]) ++pos;
    if (pos == n) return;
    apply_delta(pos, 1);
    for (int i = 0; i < pos; ++i) apply_delta(i, lo[i] - hi[i]);
  }
}

struct WorstCandidate {
  double margin = -std::numeric_limits<double>::infinity();
  std::vector<long long> lambdas;

  void offer(double m, const std::vector<long long>& lam) {
    if (m > margin || (m == margin && (lambdas.empty() || lex_less(lam, lambdas)))) {
      margin = m;
      lambdas = lam;
    }
  }
  void merge(const WorstCandidate& other) {
    if (other.lambdas.empty()) return;
    offer(other.margin, other.lambdas);
  }
};

bool first_nonzero_positive(const std::vector<long long>& lam) {
  for (long long v : lam) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;  // zero vector
}

enum class Constraint { sigma_one, sigma_odd, any, shepp, balanced };

double family_rhs(WeightFamily f, long long sigma) {
  switch (f) {
    case WeightFamily::matheron:
    case WeightFamily::hypermetric:
      return 0.0;
    case WeightFamily::psd:
      return 0.25 * static_cast<double>(sigma * sigma);
    case WeightFamily::rounded_psd:
      return std::floor(0.25 * static_cast<double>(sigma * sigma));
    // Sign vectors with odd sigma have gap exactly 1, which fixes the
    // right-hand side of the odd-clique and full-support (Shepp) forms.
    case WeightFamily::odd_clique:
    case WeightFamily::shepp:
      return 0.25 * (static_cast<double>(sigma * sigma) - 1.0);
  }
  return 0.0;
}

/// Attainable-sum bitmask gap for small weights (sum |lambda| <= 31).
long long small_gap(const std::vector<long long>& lam) {
  const int center = 31;
  std::uint64_t mask = 1ULL << center;
  for (long long v : lam) {
    const int u = static_cast<int>(std::llabs(v));
    mask = (mask << u) | (mask >> u);
  }
  for (int d = 0; d <= center; ++d) {
    if (mask & (1ULL << (center + d))) return d;
    if (mask & (1ULL << (center - d))) return d;
  }
  return 0;
}

struct FamilyScan {
  WorstCandidate worst;
  long long tested = 0;
};

FamilyScan scan_family(const Eigen::MatrixXd& G, WeightFamily family,
                       bool gap_family, std::vector<int> lo, std::vector<int> hi) {
  FamilyScan out;
  enumerate_box(G, lo, hi, [&](const std::vector<long long>& lam, long long sigma,
                               double Q) {
    if (gap_family) {
      if (!first_nonzero_positive(lam)) return;
      const long long gp = small_gap(lam);
      const double rhs =
          0.25 * (static_cast<double>(sigma * sigma) - static_cast<double>(gp * gp));
      ++out.tested;
      out.worst.offer(Q - rhs, lam);
      return;
    }
    switch (family) {
      case WeightFamily::matheron:
      case WeightFamily::hypermetric:
        if (sigma != 1) return;
        break;
      case WeightFamily::odd_clique:
      case WeightFamily::rounded_psd:
        if ((sigma & 1LL) == 0) return;
        if (!first_nonzero_positive(lam)) return;
        break;
      case WeightFamily::psd:
        if (!first_nonzero_positive(lam)) return;
        break;
      case WeightFamily::shepp: {
        int support = 0;
        for (long long v : lam) support += (v != 0);
        if (support == 0 || (support & 1) == 0) return;
        if (!first_nonzero_positive(lam)) return;
        break;
      }
    }
    ++out.tested;
    out.worst.offer(Q - family_rhs(family, sigma), lam);
  });
  return out;
}

}  // namespace

const char* family_name(WeightFamily f) {
  switch (f) {
    case WeightFamily::matheron: return "matheron";
    case WeightFamily::odd_clique: return "odd_clique";
    case WeightFamily::hypermetric: return "hypermetric";
    case WeightFamily::psd: return "psd";
    case WeightFamily::rounded_psd: return "rounded_psd";
    case WeightFamily::shepp: return "shepp";
  }
  return "?";
}

CheckResult check_negative_type(const Configuration& cfg, const CheckOptions& opt) {
  CheckResult r;
  r.name = "negative_type";
  const int n = cfg.n();
  const Eigen::MatrixXd g = cfg.g.dense();
  const Eigen::MatrixXd J =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd M = -J * g * J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double scale =
      std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));
  const double mu = es.eigenvalues()(0);  // smallest
  r.margin = -mu;                         // lambda^T g lambda at the worst direction
  r.bounds = "all real zero-sum weights (spectral)";
  if (mu >= -1e-9 * std::max(scale, 1e-300)) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::fail;
    Eigen::VectorXd lam = J * es.eigenvectors().col(0);
    r.certificate.kind = Certificate::Kind::real_weights;
    r.certificate.real_lambdas.assign(lam.data(), lam.data() + n);
  }
  (void)opt;
  return r;
}

CheckResult check_pointwise(const Configuration& cfg, const CheckOptions& opt) {
  CheckResult r;
  r.name = "pointwise";
  r.bounds = "all entries";
  const int n = cfg.n();
  double worst = -std::numeric_limits<double>::infinity();
  int wk = 0, wl = 0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double v = cfg.g(k, l);
      const double m = (k == l) ? std::abs(v) : std::max(v - 0.5, -v);
      if (m > worst) {
        worst = m;
        wk = k;
        wl = l;
      }
    }
  }
  r.margin = worst;
  if (worst <= opt.tol) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::fail;
    r.certificate.kind = Certificate::Kind::entry;
    r.certificate.row = wk;
    r.certificate.col = wl;
  }
  return r;
}

namespace {

double partition_margin(const SymmetricMatrix& g, const std::vector<int>& a,
                        const std::vector<int>& b) {
  double within = 0, cross = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) within += g(a[i], a[j]);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) within += g(b[i], b[j]);
  for (int i : a)
    for (int j : b) cross += g(i, j);
  return within - cross;
}

}  // namespace

CheckResult check_polygonal(const Configuration& cfg, const CheckOptions& opt) {
  CheckResult r;
  r.name = "polygonal";
  const int n = cfg.n();
  if (n < 3) {
    r.verdict = Verdict::skipped;
    r.note = "needs at least 3 points";
    return r;
  }
  const Eigen::MatrixXd G = cfg.g.dense();
  WorstCandidate worst;
  if (n <= 12) {
    // lambda in {-1,0,1}^n, |sigma| <= 1, support >= 2; margin = Q/2.
    std::vector<int> lo(n, -1), hi(n, 1);
    enumerate_box(G, lo, hi, [&](const std::vector<long long>& lam,
                                 long long sigma, double Q) {
      if (sigma > 1 || sigma < -1) return;
      int support = 0;
      for (long long v : lam) support += (v != 0);
      if (support < 2) return;
      if (!first_nonzero_positive(lam)) return;
      worst.offer(Q / 2.0, lam);
    });
    r.bounds = "all near-balanced bipartitions of subsets (n <= 12)";
  } else {
    std::vector<int> lo(n, 0), hi(n, 0);
    // all triples
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          const int tri[3] = {i, j, k};
          for (int lone = 0; lone < 3; ++lone) {
            std::vector<long long> lam(n, 0);
            lam[tri[lone]] = 1;
            lam[tri[(lone + 1) % 3]] = -1;
            lam[tri[(lone + 2) % 3]] = -1;
            const double m = cfg.g(tri[(lone + 1) % 3], tri[(lone + 2) % 3]) -
                             cfg.g(tri[lone], tri[(lone + 1) % 3]) -
                             cfg.g(tri[lone], tri[(lone + 2) % 3]);
            if (!first_nonzero_positive(lam))
              for (auto& v : lam) v = -v;
            worst.offer(m, lam);
          }
        }
    // seeded random near-balanced bipartitions
    CounterRng rng(opt.seed, 0x706f6c79ULL);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int rep = 0; rep < 10000; ++rep) {
      for (int i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.next_below(static_cast<std::uint32_t>(i + 1))]);
      const int m = 4 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n - 3)));
      std::vector<long long> lam(n, 0);
      const int na = (m + 1) / 2;
      for (int i = 0; i < m; ++i) lam[idx[i]] = (i < na) ? 1 : -1;
      Eigen::VectorXd lamd(n);
      for (int i = 0; i < n; ++i) lamd(i) = static_cast<double>(lam[i]);
      const double Q = lamd.dot(G * lamd);
      if (!first_nonzero_positive(lam))
        for (auto& v : lam) v = -v;
      worst.offer(Q / 2.0, lam);
    }
    r.bounds = "all triples + 10000 sampled bipartitions, seed=" +
               std::to_string(opt.seed);
    r.note = "sampled";
  }
  if (!worst.lambdas.empty()) {
    std::vector<int> a, b;
    for (int i = 0; i < n; ++i) {
      if (worst.lambdas[i] > 0) a.push_back(i);
      if (worst.lambdas[i] < 0) b.push_back(i);
    }
    worst.margin = partition_margin(cfg.g, a, b);
  }
  r.margin = worst.margin;
  if (worst.margin <= opt.tol) {
    r.verdict = Verdict::pass;
    if (!r.note.empty()) r.note = "pass (sampled)";
  } else {
    r.verdict = Verdict::fail;
    r.certificate.kind = Certificate::Kind::partition;
    for (int i = 0; i < n; ++i) {
      if (worst.lambdas[i] > 0) r.certificate.side_a.push_back(i);
      if (worst.lambdas[i] < 0) r.certificate.side_b.push_back(i);
    }
    r.certificate.lambdas = worst.lambdas;
  }
  return r;
}

namespace {

CheckResult run_integer_scan(const Configuration& cfg, WeightFamily family,
                             bool gap_family, const CheckOptions& opt) {
  CheckResult r;
  r.name = gap_family ? "gap" : family_name(family);
  const int n = cfg.n();
  const bool sign_family = !gap_family && (family == WeightFamily::matheron ||
                                           family == WeightFamily::odd_clique ||
                                           family == WeightFamily::shepp);
  const int bound = sign_family ? 1 : opt.integer_bound;
  const int n_cap = sign_family ? 16 : 8;
  if (n > n_cap) {
    r.verdict = Verdict::skipped;
    r.note = "n exceeds the enumeration cap (" + std::to_string(n_cap) + ")";
    return r;
  }
  const double count = std::pow(2.0 * bound + 1.0, n);
  if (count > kCandidateCap) {
    r.verdict = Verdict::skipped;
    r.note = "candidate count exceeds 1e8";
    return r;
  }
  const Eigen::MatrixXd G = cfg.g.dense();
  std::vector<int> lo(n, -bound), hi(n, bound);

  auto run_chunk = [&](int last_lo, int last_hi) {
    std::vector<int> clo = lo, chi = hi;
    clo[n - 1] = last_lo;
    chi[n - 1] = last_hi;
    return scan_family(G, family, gap_family, clo, chi);
  };

  // Always scan per-chunk (last coordinate fixed) so accumulation patterns,
  // and therefore worst-candidate selection, match at every worker count.
  FamilyScan total;
  const int workers = std::max(1, opt.workers);
  if (workers == 1) {
    for (int v = -bound; v <= bound; ++v) {
      FamilyScan part = run_chunk(v, v);
      total.worst.merge(part.worst);
      total.tested += part.tested;
    }
  } else {
    std::vector<std::future<FamilyScan>> futs;
    for (int v = -bound; v <= bound; ++v)
      futs.push_back(std::async(std::launch::async, run_chunk, v, v));
    for (auto& f : futs) {
      FamilyScan part = f.get();
      total.worst.merge(part.worst);
      total.tested += part.tested;
    }
  }
  if (!total.worst.lambdas.empty()) {
    // recompute the reported margin without incremental drift
    const auto& lam = total.worst.lambdas;
    double q = 0;
    long long sigma = 0;
    for (int k = 0; k < n; ++k) sigma += lam[k];
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        q += static_cast<double>(lam[k] * lam[l]) * cfg.g(k, l);
    double rhs;
    if (gap_family) {
      const long long gp = small_gap(lam);
      rhs = 0.25 *
            (static_cast<double>(sigma * sigma) - static_cast<double>(gp * gp));
    } else {
      rhs = family_rhs(family, sigma);
    }
    total.worst.margin = q - rhs;
  }

  std::ostringstream bounds;
  bounds << "lambda in [" << -bound << "," << bound << "]^" << n;
  if (!gap_family) {
    switch (family) {
      case WeightFamily::matheron:
      case WeightFamily::hypermetric:
        bounds << ", sigma = 1";
        break;
      case WeightFamily::odd_clique:
      case WeightFamily::rounded_psd:
        bounds << ", sigma odd";
        break;
      case WeightFamily::shepp:
        bounds << ", entries +-1 on an odd-size support";
        break;
      case WeightFamily::psd:
        break;
    }
  }
  bounds << " (" << total.tested << " tested)";
  r.bounds = bounds.str();
  r.margin = total.worst.margin;
  if (total.tested == 0) {
    r.verdict = Verdict::skipped;
    r.note = "no admissible weight vector at this size";
    return r;
  }
  if (total.worst.margin <= opt.tol) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = Verdict::fail;
    r.certificate.kind = Certificate::Kind::integer_weights;
    r.certificate.lambdas = total.worst.lambdas;
  }
  return r;
}

}  // namespace

CheckResult check_integer_weights(const Configuration& cfg, WeightFamily family,
                                  const CheckOptions& opt) {
  return run_integer_scan(cfg, family, false, opt);
}

CheckResult check_gap(const Configuration& cfg, const CheckOptions& opt) {
  return run_integer_scan(cfg, WeightFamily::psd, true, opt);
}

std::vector<CheckResult> run_checks(const Configuration& cfg, CheckProfile profile,
                                    const CheckOptions& opt) {
  // The madogram profile keeps only the inequalities insensitive to scaling
  // g by a positive constant (homogeneous right-hand sides): negative type,
  // polygonal, Matheron, hypermetric. The families with inhomogeneous bounds
  // (odd-clique, psd, rounded psd, Shepp, gap, and the 1/2 pointwise cap)
  // require the indicator normalization.
  std::vector<CheckResult> out;
  out.push_back(check_negative_type(cfg, opt));
  if (profile == CheckProfile::indicator) out.push_back(check_pointwise(cfg, opt));
  out.push_back(check_polygonal(cfg, opt));
  out.push_back(check_integer_weights(cfg, WeightFamily::matheron, opt));
  out.push_back(check_integer_weights(cfg, WeightFamily::hypermetric, opt));
  if (profile == CheckProfile::indicator) {
    out.push_back(check_integer_weights(cfg, WeightFamily::odd_clique, opt));
    out.push_back(check_integer_weights(cfg, WeightFamily::psd, opt));
    out.push_back(check_integer_weights(cfg, WeightFamily::rounded_psd, opt));
    out.push_back(check_integer_weights(cfg, WeightFamily::shepp, opt));
    out.push_back(check_gap(cfg, opt));
  }
  return out;
}

double reevaluate_certificate(const Configuration& cfg, const CheckResult& r) {
  const int n = cfg.n();
  switch (r.certificate.kind) {
    case Certificate::Kind::real_weights: {
      const auto& lam = r.certificate.real_lambdas;
      double q = 0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) q += lam[k] * lam[l] * cfg.g(k, l);
      return q;
    }
    case Certificate::Kind::partition:
      return partition_margin(cfg.g, r.certificate.side_a, r.certificate.side_b);
    case Certificate::Kind::entry: {
      const double v = cfg.g(r.certificate.row, r.certificate.col);
      return r.certificate.row == r.certificate.col ? std::abs(v)
                                                    : std::max(v - 0.5, -v);
    }
    case Certificate::Kind::integer_weights: {
      const auto& lam = r.certificate.lambdas;
      double q = 0;
      long long sigma = 0;
      for (int k = 0; k < n; ++k) sigma += lam[k];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          q += static_cast<double>(lam[k] * lam[l]) * cfg.g(k, l);
      double rhs = 0;
      if (r.name == "psd") rhs = 0.25 * static_cast<double>(sigma * sigma);
      else if (r.name == "rounded_psd")
        rhs = std::floor(0.25 * static_cast<double>(sigma * sigma));
      else if (r.name == "shepp" || r.name == "odd_clique")
        rhs = 0.25 * (static_cast<double>(sigma * sigma) - 1.0);
      else if (r.name == "gap") {
        WeightVector w{r.certificate.lambdas};
        const double gp = static_cast<double>(w.gap());
        rhs = 0.25 * (static_cast<double>(sigma * sigma) - gp * gp);
      } else if (r.name == "polygonal") {
        return q / 2.0;
      }
      return q - rhs;
    }
    case Certificate::Kind::none:
      break;
  }
  throw input_error("result carries no certificate");
}

RealizabilityResult realizability_small(const Configuration& cfg, double tol) {
  const int n = cfg.n();
  if (n > 10)
    throw input_error(
        "exact realizability is limited to n <= 10; use the inequality "
        "families for larger configurations");
  const int n_atoms = 1 << (n - 1);
  const int n_pairs = n * (n - 1) / 2;
  const int m = 1 + n_pairs;  // sum-to-one row + moment rows

  // atom signs, first coordinate fixed to +1
  std::vector<std::vector<int>> signs(n_atoms, std::vector<int>(n, 1));
  for (int a = 0; a < n_atoms; ++a)
    for (int i = 1; i < n; ++i)
      if ((a >> (i - 1)) & 1) signs[a][i] = -1;

  std::vector<double> b(m);
  b[0] = 1.0;
  {
    int row = 1;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) b[row++] = 1.0 - 4.0 * cfg.g(k, l);
  }
  std::vector<int> flip(m, 1);
  Eigen::MatrixXd A(m, n_atoms);
  for (int a = 0; a < n_atoms; ++a) {
    A(0, a) = 1.0;
    int row = 1;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) A(row++, a) = signs[a][k] * signs[a][l];
  }
  for (int i = 0; i < m; ++i)
    if (b[i] < 0) {
      flip[i] = -1;
      b[i] = -b[i];
      A.row(i) = -A.row(i);
    }

  // phase-1 tableau: [A | I | b], artificial basis, minimize sum of artificials
  const int cols = n_atoms + m;
  Eigen::MatrixXd T(m, cols + 1);
  T.block(0, 0, m, n_atoms) = A;
  T.block(0, n_atoms, m, m) = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i) T(i, cols) = b[i];
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n_atoms + i;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  for (int j = n_atoms; j < cols; ++j) cost(j) = 1.0;

  // reduced-cost row d = c - c_B B^{-1} A, maintained by pivoting
  Eigen::VectorXd d(cols + 1);
  for (int j = 0; j <= cols; ++j) {
    double s = 0;
    for (int i = 0; i < m; ++i) s += T(i, j);  // c_B = 1 on the artificial basis
    d(j) = (j < cols ? cost(j) : 0.0) - s;
  }
  // d(cols) holds -objective

  const double eps = 1e-11;
  const long max_iter = 20000L * (m + 1);
  for (long it = 0; it < max_iter; ++it) {
    int enter = -1;  // Bland: smallest index with negative reduced cost
    for (int j = 0; j < cols; ++j)
      if (d(j) < -1e-10) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = 0;
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, cols) / T(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave]))
          leave = i, best_ratio = ratio;
      }
    }
    if (leave < 0)
      throw numeric_error("phase-1 simplex detected an unbounded direction");
    const double piv = T(leave, enter);
    T.row(leave) /= piv;
    for (int i = 0; i < m; ++i)
      if (i != leave && std::abs(T(i, enter)) > 0)
        T.row(i) -= T(i, enter) * T.row(leave);
    d -= d(enter) * T.row(leave).transpose();
    basis[leave] = enter;
  }
  const double objective = -d(cols);

  RealizabilityResult res;
  if (objective <= tol) {
    res.feasible = true;
    std::vector<double> x(n_atoms, 0.0);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n_atoms) x[basis[i]] = T(i, cols);
    double sum = 0;
    for (int a = 0; a < n_atoms; ++a) {
      if (x[a] > 1e-12) res.distribution.push_back({signs[a], x[a]});
      sum += x[a];
    }
    double err = std::abs(sum - 1.0);
    int row = 1;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l, ++row) {
        double mom = 0;
        for (int a = 0; a < n_atoms; ++a)
          if (x[a] > 0) mom += x[a] * signs[a][k] * signs[a][l];
        err = std::max(err, std::abs(mom - (1.0 - 4.0 * cfg.g(k, l))));
      }
    res.moment_error = err;
    return res;
  }

  // Farkas certificate: y^T A_j <= 0 for all atoms, y^T b = objective > 0.
  // y_i = 1 - (reduced cost of artificial i), then unflip the row signs.
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) y[i] = (1.0 - d(n_atoms + i)) * flip[i];

  SymmetricMatrix L(n);
  for (int k = 0; k < n; ++k) L.set(k, k, -y[0] / n);
  {
    int row = 1;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < k; ++l) L.set(k, l, -0.5 * y[row++]);
  }
  // verify corner positivity by enumeration and the violation on 1 - 4g
  double corner_min = std::numeric_limits<double>::infinity();
  double scale = 0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l <= k; ++l) scale = std::max(scale, std::abs(L(k, l)));
  for (int a = 0; a < n_atoms; ++a) {
    double q = 0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) q += L(k, l) * signs[a][k] * signs[a][l];
    corner_min = std::min(corner_min, q);
  }
  double viol = 0;  // <L, 1-4g>, diagonal of 1-4g is 1
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      viol += L(k, l) * (k == l ? 1.0 : 1.0 - 4.0 * cfg.g(k, l));
  if (corner_min < -1e-7 * std::max(scale, 1.0) || viol >= 0)
    throw numeric_error("realizability dual certificate failed verification");
  res.feasible = false;
  res.corner_certificate = L;
  res.corner_min = corner_min;
  res.certificate_violation = -viol;
  return res;
}

namespace {

nlohmann::json certificate_json(const Certificate& c) {
  nlohmann::json j;
  switch (c.kind) {
    case Certificate::Kind::none:
      return nullptr;
    case Certificate::Kind::integer_weights:
      j["type"] = "integer_weights";
      j["lambdas"] = c.lambdas;
      break;
    case Certificate::Kind::real_weights:
      j["type"] = "real_weights";
      j["lambdas"] = c.real_lambdas;
      break;
    case Certificate::Kind::partition:
      j["type"] = "partition";
      j["side_a"] = c.side_a;
      j["side_b"] = c.side_b;
      break;
    case Certificate::Kind::entry:
      j["type"] = "entry";
      j["row"] = c.row;
      j["col"] = c.col;
      break;
  }
  return j;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

}  // namespace

std::string check_report_json(const std::vector<CheckResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json j;
    j["check"] = r.name;
    j["verdict"] = verdict_name(r.verdict);
    j["margin"] = r.margin;
    j["certificate"] = certificate_json(r.certificate);
    j["bounds"] = r.bounds;
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::string check_report_table(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  os << std::left << std::setw(14) << "check" << std::setw(9) << "verdict"
     << std::setw(15) << "margin" << "bounds\n";
  for (const auto& r : results) {
    os << std::left << std::setw(14) << r.name << std::setw(9)
       << verdict_name(r.verdict);
    if (r.verdict == Verdict::skipped)
      os << std::setw(15) << "-";
    else
      os << std::setw(15) << std::setprecision(6) << r.margin;
    os << r.bounds;
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << "\n";
  }
  return os.str();
}

}  // namespace indivar
