#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "indivar/models.hpp"
#include "indivar/spaces.hpp"

namespace indivar {

/// A candidate variogram evaluated on a finite point configuration.
struct Configuration {
  SpaceRef space;
  std::vector<Point> points;
  SymmetricMatrix g;

  Configuration(SpaceRef space_, std::vector<Point> points_, SymmetricMatrix g_);
  /// Hand-built matrix with no attached geometry.
  static Configuration from_matrix(SymmetricMatrix m);

  int n() const { return g.size(); }
};

/// Evaluates the model at all point pairs.
Configuration gamma_matrix(const VariogramModel& model, std::vector<Point> points);

/// Integer weight vector of the quadratic-form inequalities.
struct WeightVector {
  std::vector<long long> lambdas;

  long long sigma() const;
  /// min over sign vectors z of |lambda . z|, exact enumeration (n <= 24).
  long long gap() const;
};

enum class Verdict { pass, fail, skipped };

struct Certificate {
  enum class Kind { none, integer_weights, real_weights, partition, entry };
  Kind kind = Kind::none;
  std::vector<long long> lambdas;
  std::vector<double> real_lambdas;
  std::vector<int> side_a, side_b;
  int row = -1, col = -1;
};

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::skipped;
  double margin = 0;  // worst LHS - RHS seen (violation when positive)
  Certificate certificate;
  std::string bounds;
  std::string note;
};

struct CheckOptions {
  int integer_bound = 3;       // coordinate bound for integer-weight families
  std::uint64_t seed = 0;      // sampled-partition fallback
  int workers = 1;
  double tol = 1e-9;           // absolute slack tolerance
};

/// Conditional negative semidefiniteness via the doubly-centered matrix.
CheckResult check_negative_type(const Configuration& cfg, const CheckOptions& = {});
/// 0 <= g <= 1/2 entrywise, zero diagonal.
CheckResult check_pointwise(const Configuration& cfg, const CheckOptions& = {});
/// Cross-partition sums dominate within-partition sums over all near-balanced
/// bipartitions of point subsets (exhaustive for n <= 12, sampled above).
CheckResult check_polygonal(const Configuration& cfg, const CheckOptions& = {});

enum class WeightFamily { matheron, odd_clique, hypermetric, psd, rounded_psd, shepp };
const char* family_name(WeightFamily f);

CheckResult check_integer_weights(const Configuration& cfg, WeightFamily family,
                                  const CheckOptions& = {});
CheckResult check_gap(const Configuration& cfg, const CheckOptions& = {});

/// Profiles of the hierarchy: `indicator` runs everything; `madogram` runs
/// the subset valid for madograms without a boundedness assumption
/// (negative type, polygonal, odd-clique, hypermetric).
enum class CheckProfile { indicator, madogram };

std::vector<CheckResult> run_checks(const Configuration& cfg,
                                    CheckProfile profile = CheckProfile::indicator,
                                    const CheckOptions& = {});

/// Recomputes the violation margin of a result's certificate from scratch.
double reevaluate_certificate(const Configuration& cfg, const CheckResult& r);

/// Exact small-n realizability: is there a probability distribution over
/// sign vectors with second moments 1 - 4g? Solved by a phase-1 simplex over
/// the 2^{n-1} sign classes. Infeasibility comes with a corner-positive
/// matrix certificate verified by enumeration.
struct RealizabilityResult {
  bool feasible = false;

  struct Atom {
    std::vector<int> signs;  // in {-1, +1}, first entry +1
    double weight = 0;
  };
  std::vector<Atom> distribution;  // feasible case
  double moment_error = 0;         // max moment mismatch of the distribution

  SymmetricMatrix corner_certificate;  // infeasible case: matrix L
  double certificate_violation = 0;    // -<L, 1-4g> > 0
  double corner_min = 0;               // min_eps <L, eps eps^T>
};

RealizabilityResult realizability_small(const Configuration& cfg,
                                        double tol = 1e-9);

std::string check_report_json(const std::vector<CheckResult>& results);
std::string check_report_table(const std::vector<CheckResult>& results);

}  // namespace indivar
