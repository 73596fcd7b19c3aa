#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "indivar/spaces.hpp"

namespace indivar {

/// Metric used when a radial family is hosted on a graph.
enum class GraphMetric { sqrt_resistance, communicability };

/// Isotropic correlation function of a standard Gaussian random field.
/// Evaluates through the host distance: Euclidean, great-circle, or the
/// square-rooted resistance distance on graphs.
class GaussianCorrelation {
 public:
  enum class Family { exponential, gaussian, cauchy, stable, spherical, cubic, matern };

  GaussianCorrelation(Family family, double scale,
                      std::optional<double> shape = std::nullopt,
                      SpaceRef host = SpaceRef::euclidean(1));

  double radial(double h) const;  // rho(h), rho(0) = 1
  double variogram_radial(double h) const { return 1.0 - radial(h); }
  double operator()(const Point& x, const Point& y) const;

  Family family() const { return family_; }
  double scale() const { return scale_; }
  std::optional<double> shape() const { return shape_; }
  const SpaceRef& host() const { return host_; }
  std::string describe() const;

  static Family family_from_name(const std::string& name);

 private:
  Family family_;
  double scale_;
  std::optional<double> shape_;
  SpaceRef host_;
  std::shared_ptr<const SymmetricMatrix> graph_metric_;
};

/// A parametric indicator-variogram (or candidate variogram) model.
/// Immutable after construction; eval is pure.
class VariogramModel {
 public:
  virtual ~VariogramModel() = default;
  virtual double eval(const Point& x, const Point& y) const = 0;
  virtual std::string describe() const = 0;
  const SpaceRef& host() const { return host_; }

 protected:
  explicit VariogramModel(SpaceRef host) : host_(std::move(host)) {}
  SpaceRef host_;
};

using ModelPtr = std::shared_ptr<const VariogramModel>;

// Euclidean/graph elementary families (sill varpi/4, linear near the origin).
ModelPtr make_tanh1(SpaceRef host, double lambda, double varpi,
                    GraphMetric metric = GraphMetric::sqrt_resistance);
ModelPtr make_tanh2(SpaceRef host, double lambda, double varpi,
                    GraphMetric metric = GraphMetric::sqrt_resistance);
/// One-dimensional Euclidean host only.
ModelPtr make_ibessel(SpaceRef host, double lambda, double varpi);

// Completely monotone covariance families (sill varpi/4).
ModelPtr make_exponential(SpaceRef host, double a, double varpi,
                          GraphMetric metric = GraphMetric::sqrt_resistance);
ModelPtr make_gamma_model(SpaceRef host, double a, double b, double varpi,
                          GraphMetric metric = GraphMetric::sqrt_resistance);
ModelPtr make_stable(SpaceRef host, double a, double b, double varpi,
                     GraphMetric metric = GraphMetric::sqrt_resistance);
/// Shape b restricted to (0, 1/2].
ModelPtr make_matern(SpaceRef host, double a, double b, double varpi,
                     GraphMetric metric = GraphMetric::sqrt_resistance);

// Unit-sphere families.
ModelPtr make_sphere_linear(SpaceRef host, double varpi);
ModelPtr make_sphere_exponential(SpaceRef host, double t, double varpi);
/// Unit circle only; wave index k is a positive integer.
ModelPtr make_triangular_wave(SpaceRef host, int k, double varpi);
ModelPtr make_circle_quadratic(SpaceRef host, double varpi);

/// Covariance used by the partial-nugget family: a constant in [-1,1], half
/// of a stationary correlation, or the 18/35-scaled cubic correlation.
struct NuggetCovariance {
  enum class Kind { constant, half_correlation, scaled_cubic };
  Kind kind = Kind::constant;
  double constant = 0.0;
  std::optional<GaussianCorrelation> correlation;
  double cubic_range = 1.0;

  static NuggetCovariance constant_value(double c);
  static NuggetCovariance half_corr(GaussianCorrelation corr);
  static NuggetCovariance scaled_cubic(double range);
};

/// Partial nugget family: 0 on the diagonal, varpi/4 (1 - C) off it.
ModelPtr make_nugget(SpaceRef host, double varpi, NuggetCovariance cov);

// erf-based families driven by the variogram of a standard Gaussian field.
ModelPtr make_erf_product1(SpaceRef host, double a, int k, double varpi,
                           GaussianCorrelation gamma_source);
ModelPtr make_erf_product2(SpaceRef host, double a, int k, double varpi,
                           GaussianCorrelation gamma_source);

/// Median indicator variogram of a Gaussian random field:
/// g = arccos(rho) / (2 pi).
ModelPtr make_median_indicator(GaussianCorrelation rho);

/// Plain scaled variogram sill (1 - rho): not an indicator model in general;
/// used as simulation input and for invalid-model demonstrations.
ModelPtr make_corr_variogram(GaussianCorrelation rho, double sill);

// Fourier-series models; gamma is the radial variogram 1 - rho of the given
// correlation. Sums are truncated to an analytic tail bound below tol.
ModelPtr make_series_odd_harmonics(GaussianCorrelation corr, double varpi,
                                   double tol = 1e-10);
ModelPtr make_series_even_harmonics(GaussianCorrelation corr, double varpi,
                                    double tol = 1e-10);

// Closure combinators.
ModelPtr scale_model(double varpi, ModelPtr g);
ModelPtr mix_models(double varpi, ModelPtr g, ModelPtr g2);
ModelPtr product_combination(ModelPtr g, ModelPtr g2);  // g + g' - 4 g g'
ModelPtr exp_composition(double t, double varpi, ModelPtr g);  // varpi/4 (1-e^{-t g})

/// Discrete mixture of correlation atoms and/or indicator models; positive
/// weights summing to at most 1 (missing mass contributes nothing).
struct MixtureAtom {
  double weight = 0;
  std::optional<GaussianCorrelation> correlation;
  ModelPtr model;
};

struct MixtureSpec {
  std::vector<MixtureAtom> atoms;
  void validate() const;  // weights positive, sum <= 1 + 1e-12
  double total_weight() const;
};

/// Mixture as an evaluable model: correlation atoms enter through the median
/// indicator transform, model atoms directly.
ModelPtr mixture_model(MixtureSpec spec, SpaceRef host);

/// Median indicator transform of a correlation value (arccos rho / 2 pi),
/// evaluated in a form that is stable at both endpoints.
double median_indicator_value(double rho);

/// Order-alpha variogram of a first-order stationary Gaussian field with
/// variogram value gamma: 2^{alpha-1} Gamma((alpha+1)/2) gamma^{alpha/2} / sqrt(pi).
double gaussian_order_alpha(double gamma_value, double alpha);

/// Odd-harmonics series value: 2 varpi / pi^2 * sum_k gamma((2k+1) d)/(2k+1)^2.
double series_odd_harmonics_value(const GaussianCorrelation& corr, double d,
                                  double varpi, double tol);
/// Even-harmonics series value: 4 varpi / pi^2 * sum_{k>=1} gamma(2k d)/(4k^2-1).
double series_even_harmonics_value(const GaussianCorrelation& corr, double d,
                                   double varpi, double tol);

/// exp(x^2) erfc(x) for x >= 0 without overflow.
double erfcx_positive(double x);

}  // namespace indivar
