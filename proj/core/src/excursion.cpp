#include "indivar/excursion.hpp"

#include <algorithm>
#include <cmath>

namespace indivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 15-point Gauss-Legendre rule on [-1, 1].
constexpr int kGlPoints = 8;
constexpr double kGlX[kGlPoints] = {
    0.0,
    0.2011940939974345,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.9372733924007060,
    0.9879925180204854,
};
constexpr double kGlW[kGlPoints] = {
    0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
    0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
    0.0703660474881081, 0.0307532419961173,
};

template <class F>
double gl15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = kGlW[0] * f(c);
  for (int i = 1; i < kGlPoints; ++i)
    s += kGlW[i] * (f(c - h * kGlX[i]) + f(c + h * kGlX[i]));
  return s * h;
}

template <class F>
double adaptive_gl_rec(const F& f, double a, double b, double whole, double tol,
                       int depth) {
  const double c = 0.5 * (a + b);
  const double left = gl15(f, a, c);
  const double right = gl15(f, c, b);
  const double delta = left + right - whole;
  if (std::abs(delta) <= tol || depth >= 48) return left + right;
  return adaptive_gl_rec(f, a, c, left, tol / 2, depth + 1) +
         adaptive_gl_rec(f, c, b, right, tol / 2, depth + 1);
}

template <class F>
double adaptive_gl(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return adaptive_gl_rec(f, a, b, gl15(f, a, b), tol, 0);
}

double checked_rho(double rho) {
  if (std::abs(rho) > 1.0 + 1e-12)
    throw input_error("correlation value outside [-1,1]");
  return std::clamp(rho, -1.0, 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double hermite_poly(int k, double x) {
  if (k < 0) throw input_error("Hermite degree must be nonnegative");
  double h0 = 1.0;
  if (k == 0) return h0;
  double h1 = 2.0 * x;
  for (int j = 1; j < k; ++j) {
    const double h2 = 2.0 * x * h1 - 2.0 * j * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double g_lambda_quadrature(double rho, double lambda, double tol) {
  rho = checked_rho(rho);
  if (rho >= 1.0) return 0.0;
  const double l2 = lambda * lambda;
  // u = cos(theta) removes the 1/sqrt(1-u^2) endpoint singularity;
  // 1 + cos(theta) evaluated as 2 cos^2(theta/2) for stability near pi.
  const auto f = [l2](double th) {
    const double c = std::cos(0.5 * th);
    const double denom = 2.0 * c * c;
    if (denom <= 0.0) return l2 == 0.0 ? 1.0 : 0.0;
    return std::exp(-l2 / denom);
  };
  const double theta_max = std::acos(rho);
  return adaptive_gl(f, 0.0, theta_max, tol * kPi) / (2.0 * kPi);
}

double g_lambda_hermite(double rho, double lambda, double tol, long max_terms) {
  rho = checked_rho(rho);
  if (rho >= 1.0) return 0.0;
  const double x = lambda / std::sqrt(2.0);
  const double expfac = std::exp(-lambda * lambda);
  const double independent = normal_cdf(lambda) * normal_cdf(-lambda);
  if (rho == 0.0) return independent;
  const double abs_rho = std::abs(rho);

  // normalized recurrence hhat_k = H_k(x)/sqrt(2^k k!), bounded in k;
  // term k uses hhat_{k-1}
  double h_km1 = 1.0;                // hhat_0
  double h_k = std::sqrt(2.0) * x;   // hhat_1
  double sum = 0.0;
  double rho_pow = 1.0;
  for (long k = 1; k <= max_terms; ++k) {
    const double ck =
        expfac * h_km1 * h_km1 / (2.0 * kPi * static_cast<double>(k));
    rho_pow *= rho;
    sum += ck * rho_pow;
    // tail bound: c_j <= 1.18/(2 pi j) by Cramer's Hermite bound
    const double tail = 1.18 / (2.0 * kPi * static_cast<double>(k + 1)) *
                        std::pow(abs_rho, static_cast<double>(k + 1)) /
                        std::max(1.0 - abs_rho, 1e-300);
    if (tail < tol) return independent - sum;
    const double h_kp1 = (2.0 * x * h_k - std::sqrt(2.0 * k) * h_km1) /
                         std::sqrt(2.0 * (k + 1));
    h_km1 = h_k;
    h_k = h_kp1;
  }
  throw numeric_error(
      "Hermite expansion did not converge within the term cap (|rho| near 1); "
      "use the quadrature method");
}

double g_lambda_tan(double rho, double lambda, double tol) {
  rho = checked_rho(rho);
  if (rho >= 1.0) return 0.0;
  const double l2 = lambda * lambda;
  const double vmax = (rho <= -1.0)
                          ? kPi / 2.0
                          : std::atan(std::sqrt((1.0 - rho) / (1.0 + rho)));
  const auto f = [l2](double v) {
    const double t = std::tan(v);
    return std::exp(-l2 * t * t / 2.0);
  };
  return std::exp(-l2 / 2.0) * adaptive_gl(f, 0.0, vmax, tol * kPi) / kPi;
}

double g_lambda(const ExcursionQuery& q) {
  switch (q.method) {
    case ExcursionMethod::quadrature:
      return g_lambda_quadrature(q.rho, q.lambda, q.tol);
    case ExcursionMethod::hermite:
      return g_lambda_hermite(q.rho, q.lambda, q.tol, q.max_terms);
    case ExcursionMethod::tan_integral:
      return g_lambda_tan(q.rho, q.lambda, q.tol);
  }
  throw input_error("unknown excursion method");
}

double excursion_integral_over_thresholds(double rho, double tol, double cut) {
  rho = checked_rho(rho);
  if (rho >= 1.0) return 0.0;
  const auto f = [rho, tol](double lambda) {
    return g_lambda_quadrature(rho, lambda, tol);
  };
  return 2.0 * adaptive_gl(f, 0.0, cut, tol);  // g is even in lambda
}

}  // namespace indivar
