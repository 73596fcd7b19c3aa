#pragma once

#include "indivar/errors.hpp"

namespace indivar {

/// Physicists' Hermite polynomial by the three-term recurrence.
double hermite_poly(int k, double x);

enum class ExcursionMethod { quadrature, hermite, tan_integral };

struct ExcursionQuery {
  double rho = 0;
  double lambda = 0;
  ExcursionMethod method = ExcursionMethod::quadrature;
  double tol = 1e-10;
  long max_terms = 1'000'000;
};

/// Indicator variogram of the lambda-level excursion set of a standard
/// Gaussian pair with correlation rho. Three independent evaluation routes:
///  - quadrature of the kernel integral after the singularity-removing
///    substitution u = cos(theta),
///  - a Hermite expansion in powers of rho,
///  - the tangent-substitution integral.
double g_lambda(const ExcursionQuery& q);

double g_lambda_quadrature(double rho, double lambda, double tol = 1e-10);
double g_lambda_hermite(double rho, double lambda, double tol = 1e-10,
                        long max_terms = 1'000'000);
double g_lambda_tan(double rho, double lambda, double tol = 1e-10);

/// Integral of g_lambda over all thresholds, truncated at |lambda| <= cut;
/// recovers the Gaussian madogram sqrt((1-rho)/pi).
double excursion_integral_over_thresholds(double rho, double tol = 1e-10,
                                          double cut = 8.0);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace indivar
