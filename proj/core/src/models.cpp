#include "indivar/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace indivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_varpi(double varpi) {
  if (!(varpi >= 0.0 && varpi <= 1.0))
    throw input_error("sill parameter varpi must lie in [0,1]");
}

bool same_space(const SpaceRef& a, const SpaceRef& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SpaceKind::euclidean:
      return a.dim() == b.dim();
    case SpaceKind::sphere:
      return a.dim() == b.dim() && a.radius() == b.radius();
    case SpaceKind::graph:
      return a.graph_ptr() == b.graph_ptr();
  }
  return false;
}

void require_unit_sphere(const SpaceRef& host, const char* family) {
  if (host.kind() != SpaceKind::sphere || std::abs(host.radius() - 1.0) > 1e-12)
    throw input_error(std::string(family) + " is defined on the unit sphere");
}

void require_unit_circle(const SpaceRef& host, const char* family) {
  require_unit_sphere(host, family);
  if (host.dim() != 1)
    throw input_error(std::string(family) + " is defined on the unit circle");
}

double matern_correlation(double u, double b) {
  if (u < 1e-12) return 1.0;
  const double v = std::exp2(1.0 - b) / std::tgamma(b) * std::pow(u, b) *
                   std::cyl_bessel_k(b, u);
  return std::min(v, 1.0);
}

double cubic_correlation(double u) {
  if (u >= 1.0) return 0.0;
  const double u2 = u * u;
  return 1.0 + u2 * (-7.0 + u * (8.75 + u2 * (-3.5 + u2 * 0.75)));
}

/// exp(-t) I_{3/2}(t) through the elementary form
/// I_{3/2}(t) = sqrt(2/pi) (t cosh t - sinh t) / t^{3/2}.
double exp_scaled_bessel_i32(double t) {
  const double c = std::sqrt(2.0 / kPi);
  if (t < 0.5) {
    // t cosh t - sinh t = sum_{k>=1} t^{2k+1} 2k/(2k+1)!
    double term = t * t * t / 3.0;  // k = 1
    double sum = term;
    for (int k = 2; k < 12; ++k) {
      term *= t * t * (2.0 * k) / ((2.0 * k + 1.0) * 2.0 * k * (2.0 * k - 1.0));
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return c * std::exp(-t) * sum / std::pow(t, 1.5);
  }
  const double e2 = std::exp(-2.0 * t);
  return c * ((t - 1.0) + (t + 1.0) * e2) / (2.0 * std::pow(t, 1.5));
}

}  // namespace

double erfcx_positive(double x) {
  if (x <= 12.0) return std::exp(x * x) * std::erfc(x);
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 24; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum / (x * std::sqrt(kPi));
}

double median_indicator_value(double rho) {
  if (std::abs(rho) > 1.0 + 1e-12)
    throw input_error("correlation value outside [-1,1]");
  rho = std::clamp(rho, -1.0, 1.0);
  if (rho >= 0.0) return std::asin(std::sqrt((1.0 - rho) / 2.0)) / kPi;
  return 0.5 - std::asin(std::sqrt((1.0 + rho) / 2.0)) / kPi;
}

double gaussian_order_alpha(double gamma_value, double alpha) {
  if (!(alpha > 0)) throw input_error("order alpha must be positive");
  if (gamma_value < 0) throw input_error("variogram value must be nonnegative");
  return std::exp2(alpha - 1.0) / std::sqrt(kPi) *
         std::tgamma((alpha + 1.0) / 2.0) * std::pow(gamma_value, alpha / 2.0);
}

GaussianCorrelation::GaussianCorrelation(Family family, double scale,
                                         std::optional<double> shape,
                                         SpaceRef host)
    : family_(family), scale_(scale), shape_(shape), host_(std::move(host)) {
  if (!(scale > 0)) throw input_error("correlation scale must be positive");
  switch (family_) {
    case Family::cauchy:
      if (!shape_ || !(*shape_ > 0))
        throw input_error("cauchy correlation needs shape beta > 0");
      break;
    case Family::stable:
      if (!shape_ || !(*shape_ > 0 && *shape_ <= 2.0))
        throw input_error("stable correlation needs shape b in (0,2]");
      break;
    case Family::matern:
      if (!shape_ || !(*shape_ > 0))
        throw input_error("matern correlation needs shape b > 0");
      break;
    default:
      if (shape_)
        throw input_error("this correlation family takes no shape parameter");
      break;
  }
  if (host_.kind() == SpaceKind::graph)
    graph_metric_ = std::make_shared<SymmetricMatrix>(
        resistance_distance_matrix(host_.graph()));
}

double GaussianCorrelation::radial(double h) const {
  const double u = h / scale_;
  switch (family_) {
    case Family::exponential:
      return std::exp(-u);
    case Family::gaussian:
      return std::exp(-u * u);
    case Family::cauchy:
      return std::pow(1.0 + u * u, -*shape_);
    case Family::stable:
      return std::exp(-std::pow(u, *shape_));
    case Family::spherical:
      return u >= 1.0 ? 0.0 : 1.0 - 1.5 * u + 0.5 * u * u * u;
    case Family::cubic:
      return cubic_correlation(u);
    case Family::matern:
      return matern_correlation(u, *shape_);
  }
  throw input_error("unknown correlation family");
}

double GaussianCorrelation::operator()(const Point& x, const Point& y) const {
  if (host_.kind() == SpaceKind::graph) {
    const double dr = (*graph_metric_)(x.vertex, y.vertex);
    return radial(std::sqrt(dr));
  }
  return radial(distance(host_, x, y));
}

std::string GaussianCorrelation::describe() const {
  static const char* names[] = {"exponential", "gaussian", "cauchy",
                                "stable",      "spherical", "cubic", "matern"};
  std::ostringstream os;
  os << names[static_cast<int>(family_)] << "(scale=" << scale_;
  if (shape_) os << ",shape=" << *shape_;
  os << ")@" << host_.describe();
  return os.str();
}

GaussianCorrelation::Family GaussianCorrelation::family_from_name(
    const std::string& name) {
  if (name == "exponential") return Family::exponential;
  if (name == "gaussian") return Family::gaussian;
  if (name == "cauchy") return Family::cauchy;
  if (name == "stable") return Family::stable;
  if (name == "spherical") return Family::spherical;
  if (name == "cubic") return Family::cubic;
  if (name == "matern") return Family::matern;
  throw input_error(
      "unknown correlation family '" + name +
      "'; known: exponential gaussian cauchy stable spherical cubic matern");
}

namespace {

/// Base for families evaluated through a host distance. On graph hosts the
/// distance is the square-rooted resistance distance or the communicability
/// distance, fixed at construction.
class RadialModel : public VariogramModel {
 public:
  RadialModel(SpaceRef host, GraphMetric metric) : VariogramModel(std::move(host)) {
    if (host_.kind() == SpaceKind::graph) {
      if (metric == GraphMetric::sqrt_resistance) {
        auto m = resistance_distance_matrix(host_.graph());
        const int n = m.size();
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < k; ++l) m.set(k, l, std::sqrt(m(k, l)));
        graph_metric_ = std::make_shared<SymmetricMatrix>(std::move(m));
        metric_name_ = "sqrt_resistance";
      } else {
        graph_metric_ = std::make_shared<SymmetricMatrix>(
            communicability_distance_matrix(host_.graph()));
        metric_name_ = "communicability";
      }
    }
  }

  double eval(const Point& x, const Point& y) const final {
    return g_of_d(host_distance(x, y));
  }

 protected:
  virtual double g_of_d(double d) const = 0;

  double host_distance(const Point& x, const Point& y) const {
    if (graph_metric_) {
      if (x.vertex < 0 || y.vertex < 0 ||
          x.vertex >= graph_metric_->size() || y.vertex >= graph_metric_->size())
        throw input_error("graph point has an invalid vertex index");
      return (*graph_metric_)(x.vertex, y.vertex);
    }
    return distance(host_, x, y);
  }

  std::string metric_suffix() const {
    return metric_name_.empty() ? "" : ("," + metric_name_);
  }

 private:
  std::shared_ptr<const SymmetricMatrix> graph_metric_;
  std::string metric_name_;
};

void require_euclidean_or_graph(const SpaceRef& host, const char* family) {
  if (host.kind() == SpaceKind::sphere)
    throw input_error(std::string(family) +
                      " is defined on Euclidean spaces and graphs");
}

class Tanh1Model : public RadialModel {
 public:
  Tanh1Model(SpaceRef host, double lambda, double varpi, GraphMetric metric)
      : RadialModel(std::move(host), metric), lambda_(lambda), varpi_(varpi) {
    require_euclidean_or_graph(host_, "tanh1");
    require_varpi(varpi);
    if (!(lambda > 0)) throw input_error("tanh1 needs lambda > 0");
  }
  double g_of_d(double d) const override {
    if (d == 0) return 0;
    return varpi_ * d / (4.0 * lambda_) * std::tanh(lambda_ / d);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "tanh1(lambda=" << lambda_ << ",varpi=" << varpi_ << metric_suffix()
       << ")@" << host_.describe();
    return os.str();
  }

 private:
  double lambda_, varpi_;
};

class Tanh2Model : public RadialModel {
 public:
  Tanh2Model(SpaceRef host, double lambda, double varpi, GraphMetric metric)
      : RadialModel(std::move(host), metric), lambda_(lambda), varpi_(varpi) {
    require_euclidean_or_graph(host_, "tanh2");
    require_varpi(varpi);
    if (!(lambda > 0)) throw input_error("tanh2 needs lambda > 0");
  }
  double g_of_d(double d) const override {
    if (d == 0) return 0;
    const double th = std::tanh(lambda_ / d);
    return varpi_ / 8.0 * (3.0 * d / lambda_ * th + th * th - 1.0);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "tanh2(lambda=" << lambda_ << ",varpi=" << varpi_ << metric_suffix()
       << ")@" << host_.describe();
    return os.str();
  }

 private:
  double lambda_, varpi_;
};

class IBesselModel : public RadialModel {
 public:
  IBesselModel(SpaceRef host, double lambda, double varpi)
      : RadialModel(std::move(host), GraphMetric::sqrt_resistance),
        lambda_(lambda), varpi_(varpi) {
    require_varpi(varpi);
    if (!(lambda > 0)) throw input_error("ibessel needs lambda > 0");
    if (host_.kind() != SpaceKind::euclidean || host_.dim() != 1)
      throw input_error("ibessel is defined on the 1-dimensional Euclidean space");
  }
  double g_of_d(double d) const override {
    if (d == 0) return 0;
    const double s = lambda_ / (2.0 * d);
    const double scaled = exp_scaled_bessel_i32(s);  // e^{-s} I_{3/2}(s)
    return 3.0 * varpi_ * std::sqrt(kPi * d) /
           (2.0 * std::sqrt(lambda_) * (1.0 - std::exp(-2.0 * s))) * scaled;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "ibessel(lambda=" << lambda_ << ",varpi=" << varpi_ << ")@"
       << host_.describe();
    return os.str();
  }

 private:
  double lambda_, varpi_;
};

/// Families of the form varpi/4 (1 - rho(d)) with completely monotone rho.
class MonotoneCovModel : public RadialModel {
 public:
  enum class Kind { exponential, gamma, stable, matern };
  MonotoneCovModel(SpaceRef host, Kind kind, double a, double b, double varpi,
                   GraphMetric metric)
      : RadialModel(std::move(host), metric), kind_(kind), a_(a), b_(b),
        varpi_(varpi) {
    require_euclidean_or_graph(host_, name());
    require_varpi(varpi);
    if (!(a > 0)) throw input_error(std::string(name()) + " needs a > 0");
    switch (kind_) {
      case Kind::gamma:
        if (!(b > 0)) throw input_error("gamma model needs b > 0");
        break;
      case Kind::stable:
        if (!(b > 0 && b <= 1.0))
          throw input_error("stable model needs b in (0,1]");
        break;
      case Kind::matern:
        if (!(b > 0 && b <= 0.5))
          throw input_error("matern model needs b in (0,1/2]");
        break;
      default:
        break;
    }
  }
  double g_of_d(double d) const override {
    if (d == 0) return 0;
    double rho = 0;
    switch (kind_) {
      case Kind::exponential:
        rho = std::exp(-a_ * d);
        break;
      case Kind::gamma:
        rho = std::pow(1.0 + d / a_, -b_);
        break;
      case Kind::stable:
        rho = std::exp(-a_ * std::pow(d, b_));
        break;
      case Kind::matern:
        rho = matern_correlation(d / a_, b_);
        break;
    }
    return varpi_ / 4.0 * (1.0 - rho);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << name() << "(a=" << a_;
    if (kind_ != Kind::exponential) os << ",b=" << b_;
    os << ",varpi=" << varpi_ << metric_suffix() << ")@" << host_.describe();
    return os.str();
  }

 private:
  const char* name() const {
    switch (kind_) {
      case Kind::exponential: return "exponential";
      case Kind::gamma: return "gamma";
      case Kind::stable: return "stable";
      case Kind::matern: return "matern";
    }
    return "?";
  }
  Kind kind_;
  double a_, b_, varpi_;
};

class SphereLinearModel : public RadialModel {
 public:
  SphereLinearModel(SpaceRef host, double varpi)
      : RadialModel(std::move(host), GraphMetric::sqrt_resistance), varpi_(varpi) {
    require_unit_sphere(host_, "sphere_linear");
    require_varpi(varpi);
  }
  double g_of_d(double d) const override { return varpi_ * d / (2.0 * kPi); }
  std::string describe() const override {
    std::ostringstream os;
    os << "sphere_linear(varpi=" << varpi_ << ")@" << host_.describe();
    return os.str();
  }

 private:
  double varpi_;
};

class SphereExponentialModel : public RadialModel {
 public:
  SphereExponentialModel(SpaceRef host, double t, double varpi)
      : RadialModel(std::move(host), GraphMetric::sqrt_resistance), t_(t),
        varpi_(varpi) {
    require_unit_sphere(host_, "sphere_exponential");
    require_varpi(varpi);
    if (!(t > 0)) throw input_error("sphere_exponential needs t > 0");
  }
  double g_of_d(double d) const override {
    return d == 0 ? 0.0 : varpi_ / 4.0 * (1.0 - std::exp(-t_ * d));
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "sphere_exponential(t=" << t_ << ",varpi=" << varpi_ << ")@"
       << host_.describe();
    return os.str();
  }

 private:
  double t_, varpi_;
};

class TriangularWaveModel : public RadialModel {
 public:
  TriangularWaveModel(SpaceRef host, int k, double varpi)
      : RadialModel(std::move(host), GraphMetric::sqrt_resistance), k_(k),
        varpi_(varpi) {
    require_unit_circle(host_, "triangular_wave");
    require_varpi(varpi);
    if (k < 1) throw input_error("triangular_wave needs a positive integer k");
  }
  double g_of_d(double d) const override {
    const double kd = k_ * d;
    const double m = std::round(kd / (2.0 * kPi));
    return varpi_ / (2.0 * kPi) * std::abs(kd - 2.0 * kPi * m);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "triangular_wave(k=" << k_ << ",varpi=" << varpi_ << ")@"
       << host_.describe();
    return os.str();
  }

 private:
  int k_;
  double varpi_;
};

class CircleQuadraticModel : public RadialModel {
 public:
  CircleQuadraticModel(SpaceRef host, double varpi)
      : RadialModel(std::move(host), GraphMetric::sqrt_resistance), varpi_(varpi) {
    require_unit_circle(host_, "circle_quadratic");
    require_varpi(varpi);
  }
  double g_of_d(double d) const override {
    return 3.0 * varpi_ / (8.0 * kPi * kPi) * d * (2.0 * kPi - d);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "circle_quadratic(varpi=" << varpi_ << ")@" << host_.describe();
    return os.str();
  }

 private:
  double varpi_;
};

class NuggetModel : public VariogramModel {
 public:
  NuggetModel(SpaceRef host, double varpi, NuggetCovariance cov)
      : VariogramModel(std::move(host)), varpi_(varpi), cov_(std::move(cov)) {
    require_varpi(varpi);
    switch (cov_.kind) {
      case NuggetCovariance::Kind::constant:
        if (std::abs(cov_.constant) > 1.0)
          throw input_error("nugget covariance constant must lie in [-1,1]");
        break;
      case NuggetCovariance::Kind::half_correlation:
        if (!cov_.correlation) throw input_error("nugget: missing correlation");
        if (!same_space(cov_.correlation->host(), host_))
          throw input_error("nugget: correlation host differs from model host");
        break;
      case NuggetCovariance::Kind::scaled_cubic:
        if (!(cov_.cubic_range > 0))
          throw input_error("nugget: cubic range must be positive");
        if (host_.kind() != SpaceKind::euclidean)
          throw input_error("nugget: scaled cubic covariance needs a Euclidean host");
        break;
    }
  }

  double eval(const Point& x, const Point& y) const override {
    if (is_same_point(x, y)) return 0.0;
    double c = 0;
    switch (cov_.kind) {
      case NuggetCovariance::Kind::constant:
        c = cov_.constant;
        break;
      case NuggetCovariance::Kind::half_correlation:
        c = 0.5 * (*cov_.correlation)(x, y);
        break;
      case NuggetCovariance::Kind::scaled_cubic:
        c = 18.0 / 35.0 * cubic_correlation(distance(host_, x, y) / cov_.cubic_range);
        break;
    }
    return varpi_ / 4.0 * (1.0 - c);
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "nugget(varpi=" << varpi_ << ",cov=";
    switch (cov_.kind) {
      case NuggetCovariance::Kind::constant:
        os << "constant:" << cov_.constant;
        break;
      case NuggetCovariance::Kind::half_correlation:
        os << "half[" << cov_.correlation->describe() << "]";
        break;
      case NuggetCovariance::Kind::scaled_cubic:
        os << "cubic18_35:" << cov_.cubic_range;
        break;
    }
    os << ")@" << host_.describe();
    return os.str();
  }

 private:
  bool is_same_point(const Point& x, const Point& y) const {
    if (host_.kind() == SpaceKind::graph) return x.vertex == y.vertex;
    return distance(host_, x, y) < 1e-12;
  }
  double varpi_;
  NuggetCovariance cov_;
};

class ErfProductModel : public VariogramModel {
 public:
  ErfProductModel(SpaceRef host, int variant, double a, int k, double varpi,
                  GaussianCorrelation gamma_source)
      : VariogramModel(std::move(host)), variant_(variant), a_(a), k_(k),
        varpi_(varpi), gamma_source_(std::move(gamma_source)) {
    require_varpi(varpi);
    if (!(a > 0)) throw input_error("erf-product model needs a > 0");
    if (k < 1) throw input_error("erf-product model needs a positive integer k");
    if (!same_space(gamma_source_.host(), host_))
      throw input_error("erf-product model: variogram source host differs from model host");
  }

  double eval(const Point& x, const Point& y) const override {
    const double gamma = 1.0 - gamma_source_(x, y);
    const double ag = a_ * gamma;
    if (ag <= 0) return 0.0;
    double base;
    if (variant_ == 1) {
      base = erfcx_positive(std::sqrt(ag));
    } else {
      const double s = std::sqrt(ag);
      base = std::erf(1.0 / s) - s / kPi * (1.0 - std::exp(-1.0 / ag));
    }
    return varpi_ / 4.0 * (1.0 - std::pow(base, k_));
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "erf_product" << variant_ << "(a=" << a_ << ",k=" << k_
       << ",varpi=" << varpi_ << ",gamma=1-" << gamma_source_.describe() << ")@"
       << host_.describe();
    return os.str();
  }

 private:
  int variant_;
  double a_;
  int k_;
  double varpi_;
  GaussianCorrelation gamma_source_;
};

class MedianIndicatorModel : public VariogramModel {
 public:
  explicit MedianIndicatorModel(GaussianCorrelation rho)
      : VariogramModel(rho.host()), rho_(std::move(rho)) {}
  double eval(const Point& x, const Point& y) const override {
    return median_indicator_value(rho_(x, y));
  }
  std::string describe() const override {
    return "median[" + rho_.describe() + "]";
  }

 private:
  GaussianCorrelation rho_;
};

class CorrVariogramModel : public VariogramModel {
 public:
  CorrVariogramModel(GaussianCorrelation rho, double sill)
      : VariogramModel(rho.host()), rho_(std::move(rho)), sill_(sill) {
    if (!(sill > 0)) throw input_error("variogram sill must be positive");
  }
  double eval(const Point& x, const Point& y) const override {
    return sill_ * (1.0 - rho_(x, y));
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "corr_variogram(sill=" << sill_ << ")[" << rho_.describe() << "]";
    return os.str();
  }

 private:
  GaussianCorrelation rho_;
  double sill_;
};

class SeriesModel : public VariogramModel {
 public:
  SeriesModel(GaussianCorrelation corr, double varpi, double tol, bool odd)
      : VariogramModel(corr.host()), corr_(std::move(corr)), varpi_(varpi),
        tol_(tol), odd_(odd) {
    require_varpi(varpi);
    if (!(tol > 0)) throw input_error("series tolerance must be positive");
    if (host_.kind() != SpaceKind::euclidean)
      throw input_error("series models are defined on Euclidean spaces");
  }
  double eval(const Point& x, const Point& y) const override {
    const double d = distance(host_, x, y);
    return odd_ ? series_odd_harmonics_value(corr_, d, varpi_, tol_)
                : series_even_harmonics_value(corr_, d, varpi_, tol_);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << (odd_ ? "series_odd" : "series_even") << "(varpi=" << varpi_
       << ",tol=" << tol_ << ")[gamma=1-" << corr_.describe() << "]";
    return os.str();
  }

 private:
  GaussianCorrelation corr_;
  double varpi_, tol_;
  bool odd_;
};

class ScaledModel : public VariogramModel {
 public:
  ScaledModel(double varpi, ModelPtr g)
      : VariogramModel(g->host()), varpi_(varpi), g_(std::move(g)) {
    require_varpi(varpi);
  }
  double eval(const Point& x, const Point& y) const override {
    return varpi_ * g_->eval(x, y);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "scale(varpi=" << varpi_ << ")[" << g_->describe() << "]";
    return os.str();
  }

 private:
  double varpi_;
  ModelPtr g_;
};

class MixedModel : public VariogramModel {
 public:
  MixedModel(double varpi, ModelPtr g, ModelPtr g2)
      : VariogramModel(g->host()), varpi_(varpi), g_(std::move(g)),
        g2_(std::move(g2)) {
    require_varpi(varpi);
    if (!same_space(g_->host(), g2_->host()))
      throw input_error("mix: operand hosts differ");
  }
  double eval(const Point& x, const Point& y) const override {
    return varpi_ * g_->eval(x, y) + (1.0 - varpi_) * g2_->eval(x, y);
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "mix(varpi=" << varpi_ << ")[" << g_->describe() << "; "
       << g2_->describe() << "]";
    return os.str();
  }

 private:
  double varpi_;
  ModelPtr g_, g2_;
};

class ProductCombinationModel : public VariogramModel {
 public:
  ProductCombinationModel(ModelPtr g, ModelPtr g2)
      : VariogramModel(g->host()), g_(std::move(g)), g2_(std::move(g2)) {
    if (!same_space(g_->host(), g2_->host()))
      throw input_error("prod_comb: operand hosts differ");
  }
  double eval(const Point& x, const Point& y) const override {
    const double a = g_->eval(x, y);
    const double b = g2_->eval(x, y);
    return a + b - 4.0 * a * b;
  }
  std::string describe() const override {
    return "prod_comb[" + g_->describe() + "; " + g2_->describe() + "]";
  }

 private:
  ModelPtr g_, g2_;
};

class ExpCompositionModel : public VariogramModel {
 public:
  ExpCompositionModel(double t, double varpi, ModelPtr g)
      : VariogramModel(g->host()), t_(t), varpi_(varpi), g_(std::move(g)) {
    require_varpi(varpi);
    if (!(t > 0)) throw input_error("exp_comp needs t > 0");
  }
  double eval(const Point& x, const Point& y) const override {
    return varpi_ / 4.0 * (1.0 - std::exp(-t_ * g_->eval(x, y)));
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "exp_comp(t=" << t_ << ",varpi=" << varpi_ << ")[" << g_->describe()
       << "]";
    return os.str();
  }

 private:
  double t_, varpi_;
  ModelPtr g_;
};

class MixtureModel : public VariogramModel {
 public:
  MixtureModel(MixtureSpec spec, SpaceRef host)
      : VariogramModel(std::move(host)), spec_(std::move(spec)) {
    spec_.validate();
    for (const auto& atom : spec_.atoms) {
      const SpaceRef& h = atom.correlation ? atom.correlation->host()
                                           : atom.model->host();
      if (!same_space(h, host_))
        throw input_error("mixture: atom host differs from mixture host");
    }
  }
  double eval(const Point& x, const Point& y) const override {
    double g = 0;
    for (const auto& atom : spec_.atoms) {
      if (atom.correlation)
        g += atom.weight * median_indicator_value((*atom.correlation)(x, y));
      else
        g += atom.weight * atom.model->eval(x, y);
    }
    return g;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "mixture[";
    for (std::size_t i = 0; i < spec_.atoms.size(); ++i) {
      if (i) os << "; ";
      os << spec_.atoms[i].weight << "*";
      if (spec_.atoms[i].correlation)
        os << "median[" << spec_.atoms[i].correlation->describe() << "]";
      else
        os << spec_.atoms[i].model->describe();
    }
    os << "]";
    return os.str();
  }

 private:
  MixtureSpec spec_;
};

}  // namespace

NuggetCovariance NuggetCovariance::constant_value(double c) {
  NuggetCovariance n;
  n.kind = Kind::constant;
  n.constant = c;
  return n;
}
NuggetCovariance NuggetCovariance::half_corr(GaussianCorrelation corr) {
  NuggetCovariance n;
  n.kind = Kind::half_correlation;
  n.correlation = std::move(corr);
  return n;
}
NuggetCovariance NuggetCovariance::scaled_cubic(double range) {
  NuggetCovariance n;
  n.kind = Kind::scaled_cubic;
  n.cubic_range = range;
  return n;
}

ModelPtr make_tanh1(SpaceRef host, double lambda, double varpi, GraphMetric m) {
  return std::make_shared<Tanh1Model>(std::move(host), lambda, varpi, m);
}
ModelPtr make_tanh2(SpaceRef host, double lambda, double varpi, GraphMetric m) {
  return std::make_shared<Tanh2Model>(std::move(host), lambda, varpi, m);
}
ModelPtr make_ibessel(SpaceRef host, double lambda, double varpi) {
  return std::make_shared<IBesselModel>(std::move(host), lambda, varpi);
}
ModelPtr make_exponential(SpaceRef host, double a, double varpi, GraphMetric m) {
  return std::make_shared<MonotoneCovModel>(
      std::move(host), MonotoneCovModel::Kind::exponential, a, 0, varpi, m);
}
ModelPtr make_gamma_model(SpaceRef host, double a, double b, double varpi,
                          GraphMetric m) {
  return std::make_shared<MonotoneCovModel>(
      std::move(host), MonotoneCovModel::Kind::gamma, a, b, varpi, m);
}
ModelPtr make_stable(SpaceRef host, double a, double b, double varpi,
                     GraphMetric m) {
  return std::make_shared<MonotoneCovModel>(
      std::move(host), MonotoneCovModel::Kind::stable, a, b, varpi, m);
}
ModelPtr make_matern(SpaceRef host, double a, double b, double varpi,
                     GraphMetric m) {
  return std::make_shared<MonotoneCovModel>(
      std::move(host), MonotoneCovModel::Kind::matern, a, b, varpi, m);
}
ModelPtr make_sphere_linear(SpaceRef host, double varpi) {
  return std::make_shared<SphereLinearModel>(std::move(host), varpi);
}
ModelPtr make_sphere_exponential(SpaceRef host, double t, double varpi) {
  return std::make_shared<SphereExponentialModel>(std::move(host), t, varpi);
}
ModelPtr make_triangular_wave(SpaceRef host, int k, double varpi) {
  return std::make_shared<TriangularWaveModel>(std::move(host), k, varpi);
}
ModelPtr make_circle_quadratic(SpaceRef host, double varpi) {
  return std::make_shared<CircleQuadraticModel>(std::move(host), varpi);
}
ModelPtr make_nugget(SpaceRef host, double varpi, NuggetCovariance cov) {
  return std::make_shared<NuggetModel>(std::move(host), varpi, std::move(cov));
}
ModelPtr make_erf_product1(SpaceRef host, double a, int k, double varpi,
                           GaussianCorrelation gamma_source) {
  return std::make_shared<ErfProductModel>(std::move(host), 1, a, k, varpi,
                                           std::move(gamma_source));
}
ModelPtr make_erf_product2(SpaceRef host, double a, int k, double varpi,
                           GaussianCorrelation gamma_source) {
  return std::make_shared<ErfProductModel>(std::move(host), 2, a, k, varpi,
                                           std::move(gamma_source));
}
ModelPtr make_median_indicator(GaussianCorrelation rho) {
  return std::make_shared<MedianIndicatorModel>(std::move(rho));
}
ModelPtr make_corr_variogram(GaussianCorrelation rho, double sill) {
  return std::make_shared<CorrVariogramModel>(std::move(rho), sill);
}
ModelPtr make_series_odd_harmonics(GaussianCorrelation corr, double varpi,
                                   double tol) {
  return std::make_shared<SeriesModel>(std::move(corr), varpi, tol, true);
}
ModelPtr make_series_even_harmonics(GaussianCorrelation corr, double varpi,
                                    double tol) {
  return std::make_shared<SeriesModel>(std::move(corr), varpi, tol, false);
}
ModelPtr scale_model(double varpi, ModelPtr g) {
  return std::make_shared<ScaledModel>(varpi, std::move(g));
}
ModelPtr mix_models(double varpi, ModelPtr g, ModelPtr g2) {
  return std::make_shared<MixedModel>(varpi, std::move(g), std::move(g2));
}
ModelPtr product_combination(ModelPtr g, ModelPtr g2) {
  return std::make_shared<ProductCombinationModel>(std::move(g), std::move(g2));
}
ModelPtr exp_composition(double t, double varpi, ModelPtr g) {
  return std::make_shared<ExpCompositionModel>(t, varpi, std::move(g));
}
ModelPtr mixture_model(MixtureSpec spec, SpaceRef host) {
  return std::make_shared<MixtureModel>(std::move(spec), std::move(host));
}

void MixtureSpec::validate() const {
  if (atoms.empty()) throw input_error("mixture needs at least one atom");
  double total = 0;
  for (const auto& atom : atoms) {
    if (!(atom.weight > 0)) throw input_error("mixture weights must be positive");
    if (!atom.correlation && !atom.model)
      throw input_error("mixture atom has no component");
    total += atom.weight;
  }
  if (total > 1.0 + 1e-12)
    throw input_error("mixture weights must sum to at most 1");
}

double MixtureSpec::total_weight() const {
  double total = 0;
  for (const auto& atom : atoms) total += atom.weight;
  return total;
}

double series_odd_harmonics_value(const GaussianCorrelation& corr, double d,
                                  double varpi, double tol) {
  require_varpi(varpi);
  if (!(tol > 0)) throw input_error("series tolerance must be positive");
  if (d < 0) throw input_error("distance must be nonnegative");
  if (d == 0 || varpi == 0) return 0.0;
  // 2/pi^2 sum_k gamma((2k+1)d)/(2k+1)^2
  //   = 1/4 - 2/pi^2 sum_k rho((2k+1)d)/(2k+1)^2,
  // and the rho tail decays with the correlation, unlike the gamma tail.
  const double coef = 2.0 * varpi / (kPi * kPi);
  double rho_sum = 0;
  const long cap = 50'000'000;
  for (long k = 0; k < cap; ++k) {
    const double m = 2.0 * k + 1.0;
    const double rho = corr.radial(m * d);
    rho_sum += rho / (m * m);
    const double tail =
        coef * std::min(1.0, std::abs(corr.radial((m + 2.0) * d))) / (2.0 * m);
    if (tail < tol) return varpi / 4.0 - coef * rho_sum;
  }
  throw numeric_error("series did not reach the requested tolerance");
}

double series_even_harmonics_value(const GaussianCorrelation& corr, double d,
                                   double varpi, double tol) {
  require_varpi(varpi);
  if (!(tol > 0)) throw input_error("series tolerance must be positive");
  if (d < 0) throw input_error("distance must be nonnegative");
  if (d == 0 || varpi == 0) return 0.0;
  // 4/pi^2 sum_{k>=1} gamma(2kd)/(4k^2-1) = 2/pi^2 - 4/pi^2 sum_k rho(2kd)/(4k^2-1)
  const double coef = 4.0 * varpi / (kPi * kPi);
  double rho_sum = 0;
  const long cap = 50'000'000;
  for (long k = 1; k < cap; ++k) {
    const double rho = corr.radial(2.0 * k * d);
    rho_sum += rho / (4.0 * k * k - 1.0);
    const double tail = coef *
                        std::min(1.0, std::abs(corr.radial(2.0 * (k + 1) * d))) /
                        (2.0 * (2.0 * k + 1.0));
    if (tail < tol) return coef * (0.5 - rho_sum);
  }
  throw numeric_error("series did not reach the requested tolerance");
}

}  // namespace indivar
