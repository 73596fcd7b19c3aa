#include "indivar/modelspec.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace indivar {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

SpecBlock parse_block(std::istream& in, int& line_no, bool top_level) {
  SpecBlock block;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "}") {
      if (top_level)
        throw input_error("spec parse error at line " + std::to_string(line_no) +
                          ": unmatched '}'");
      return block;
    }
    if (line.back() == '{') {
      const std::string name = trim(line.substr(0, line.size() - 1));
      if (name.empty())
        throw input_error("spec parse error at line " + std::to_string(line_no) +
                          ": block needs a name");
      block.children.emplace_back(name, parse_block(in, line_no, false));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error("spec parse error at line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw input_error("spec parse error at line " + std::to_string(line_no) +
                        ": empty key");
    block.kv[key] = value;
  }
  if (!top_level)
    throw input_error("spec parse error: unterminated block (missing '}')");
  return block;
}

}  // namespace

SpecBlock SpecBlock::parse(std::istream& in) {
  int line_no = 0;
  return parse_block(in, line_no, true);
}

SpecBlock SpecBlock::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

std::string SpecBlock::get(const std::string& key) const {
  const auto it = kv.find(key);
  if (it == kv.end()) throw input_error("missing required key '" + key + "'");
  return it->second;
}

std::string SpecBlock::get_or(const std::string& key,
                              const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double SpecBlock::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw input_error("");
    return x;
  } catch (...) {
    throw input_error("key '" + key + "' is not a number: '" + v + "'");
  }
}

double SpecBlock::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long SpecBlock::get_int(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw input_error("");
    return x;
  } catch (...) {
    throw input_error("key '" + key + "' is not an integer: '" + v + "'");
  }
}

long SpecBlock::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

const SpecBlock* SpecBlock::child(const std::string& name) const {
  for (const auto& [n, b] : children)
    if (n == name) return &b;
  return nullptr;
}

SpaceRef parse_space(const std::string& descriptor) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : descriptor) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  const std::string& kind = parts[0];
  try {
    if (kind == "euclidean") {
      if (parts.size() != 2) throw input_error("");
      return SpaceRef::euclidean(std::stoi(parts[1]));
    }
    if (kind == "sphere") {
      if (parts.size() < 2 || parts.size() > 3) throw input_error("");
      const double r = parts.size() == 3 ? std::stod(parts[2]) : 1.0;
      return SpaceRef::sphere(std::stoi(parts[1]), r);
    }
    if (kind == "graph") {
      if (parts.size() != 2) throw input_error("");
      auto g = std::make_shared<Graph>(Graph::load(parts[1]));
      return SpaceRef::graph(std::move(g), parts[1]);
    }
  } catch (const input_error& e) {
    if (e.what()[0] != '\0') throw;
  } catch (...) {
  }
  throw input_error("bad space descriptor '" + descriptor +
                    "'; expected euclidean:N, sphere:N[:radius], or graph:<path>");
}

GaussianCorrelation build_correlation(const SpecBlock& block,
                                      const SpaceRef& host,
                                      const std::string& prefix) {
  const auto family =
      GaussianCorrelation::family_from_name(block.get(prefix + "corr"));
  const double scale = block.get_double(prefix + "scale");
  std::optional<double> shape;
  if (block.has(prefix + "shape")) shape = block.get_double(prefix + "shape");
  return GaussianCorrelation(family, scale, shape, host);
}

std::string model_catalog() {
  return "tanh1 tanh2 ibessel exponential gamma stable matern sphere_linear "
         "sphere_exponential triangular_wave circle_quadratic nugget "
         "erf_product1 erf_product2 median corr_variogram series_odd "
         "series_even mixture scale mix prod_comb exp_comp";
}

namespace {

GraphMetric metric_from(const SpecBlock& b) {
  const std::string name = b.get_or("params.metric", "sqrt_resistance");
  if (name == "sqrt_resistance") return GraphMetric::sqrt_resistance;
  if (name == "communicability") return GraphMetric::communicability;
  throw input_error("unknown graph metric '" + name +
                    "'; known: sqrt_resistance communicability");
}

void check_params(const SpecBlock& b, const std::string& family,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : b.kv) {
    (void)value;
    if (key.rfind("params.", 0) != 0) continue;
    const std::string name = key.substr(7);
    if (!allowed.count(name))
      throw input_error("family '" + family + "' does not take parameter '" +
                        name + "'; allowed: " + [&] {
                          std::string s;
                          for (const auto& a : allowed) s += a + " ";
                          return s;
                        }());
  }
}

}  // namespace

ModelPtr build_model(const SpecBlock& block,
                     std::optional<SpaceRef> inherited_host) {
  const std::string family = block.get("family");
  std::optional<SpaceRef> host = inherited_host;
  if (block.has("host")) host = parse_space(block.get("host"));

  auto need_host = [&]() -> SpaceRef {
    if (!host)
      throw input_error("model block needs a 'host =' space (or inherits one)");
    return *host;
  };
  auto base = [&](const char* name) -> ModelPtr {
    const SpecBlock* c = block.child(name);
    if (!c)
      throw input_error("family '" + family + "' needs a nested '" +
                        std::string(name) + " { ... }' block");
    return build_model(*c, host);
  };
  const std::set<std::string> corr_keys = {"corr", "scale", "shape"};
  auto with_corr = [&](std::set<std::string> extra) {
    extra.insert(corr_keys.begin(), corr_keys.end());
    return extra;
  };

  if (family == "tanh1" || family == "tanh2") {
    check_params(block, family, {"lambda", "varpi", "metric"});
    const double lambda = block.get_double("params.lambda");
    const double varpi = block.get_double_or("params.varpi", 1.0);
    return family == "tanh1"
               ? make_tanh1(need_host(), lambda, varpi, metric_from(block))
               : make_tanh2(need_host(), lambda, varpi, metric_from(block));
  }
  if (family == "ibessel") {
    check_params(block, family, {"lambda", "varpi"});
    return make_ibessel(need_host(), block.get_double("params.lambda"),
                        block.get_double_or("params.varpi", 1.0));
  }
  if (family == "exponential") {
    check_params(block, family, {"a", "varpi", "metric"});
    return make_exponential(need_host(), block.get_double("params.a"),
                            block.get_double_or("params.varpi", 1.0),
                            metric_from(block));
  }
  if (family == "gamma" || family == "stable" || family == "matern") {
    check_params(block, family, {"a", "b", "varpi", "metric"});
    const double a = block.get_double("params.a");
    const double b = block.get_double("params.b");
    const double varpi = block.get_double_or("params.varpi", 1.0);
    const GraphMetric m = metric_from(block);
    if (family == "gamma") return make_gamma_model(need_host(), a, b, varpi, m);
    if (family == "stable") return make_stable(need_host(), a, b, varpi, m);
    return make_matern(need_host(), a, b, varpi, m);
  }
  if (family == "sphere_linear") {
    check_params(block, family, {"varpi"});
    return make_sphere_linear(need_host(), block.get_double_or("params.varpi", 1.0));
  }
  if (family == "sphere_exponential") {
    check_params(block, family, {"t", "varpi"});
    return make_sphere_exponential(need_host(), block.get_double("params.t"),
                                   block.get_double_or("params.varpi", 1.0));
  }
  if (family == "triangular_wave") {
    check_params(block, family, {"k", "varpi"});
    return make_triangular_wave(need_host(),
                                static_cast<int>(block.get_int("params.k")),
                                block.get_double_or("params.varpi", 1.0));
  }
  if (family == "circle_quadratic") {
    check_params(block, family, {"varpi"});
    return make_circle_quadratic(need_host(),
                                 block.get_double_or("params.varpi", 1.0));
  }
  if (family == "nugget") {
    check_params(block, family,
                 with_corr({"varpi", "cov_kind", "cov_constant", "cov_range"}));
    const SpaceRef h = need_host();
    const double varpi = block.get_double_or("params.varpi", 1.0);
    const std::string kind = block.get_or("params.cov_kind", "constant");
    if (kind == "constant")
      return make_nugget(h, varpi,
                         NuggetCovariance::constant_value(
                             block.get_double_or("params.cov_constant", 0.0)));
    if (kind == "half_corr")
      return make_nugget(h, varpi,
                         NuggetCovariance::half_corr(build_correlation(block, h)));
    if (kind == "scaled_cubic")
      return make_nugget(h, varpi,
                         NuggetCovariance::scaled_cubic(
                             block.get_double("params.cov_range")));
    throw input_error("unknown nugget covariance kind '" + kind +
                      "'; known: constant half_corr scaled_cubic");
  }
  if (family == "erf_product1" || family == "erf_product2") {
    check_params(block, family, with_corr({"a", "k", "varpi"}));
    const SpaceRef h = need_host();
    const double a = block.get_double("params.a");
    const int k = static_cast<int>(block.get_int_or("params.k", 1));
    const double varpi = block.get_double_or("params.varpi", 1.0);
    auto corr = build_correlation(block, h);
    return family == "erf_product1"
               ? make_erf_product1(h, a, k, varpi, std::move(corr))
               : make_erf_product2(h, a, k, varpi, std::move(corr));
  }
  if (family == "median") {
    check_params(block, family, with_corr({}));
    return make_median_indicator(build_correlation(block, need_host()));
  }
  if (family == "corr_variogram") {
    check_params(block, family, with_corr({"sill"}));
    return make_corr_variogram(build_correlation(block, need_host()),
                               block.get_double_or("params.sill", 0.25));
  }
  if (family == "series_odd" || family == "series_even") {
    check_params(block, family, with_corr({"varpi", "tol"}));
    auto corr = build_correlation(block, need_host());
    const double varpi = block.get_double_or("params.varpi", 1.0);
    const double tol = block.get_double_or("params.tol", 1e-10);
    return family == "series_odd"
               ? make_series_odd_harmonics(std::move(corr), varpi, tol)
               : make_series_even_harmonics(std::move(corr), varpi, tol);
  }
  if (family == "scale") {
    check_params(block, family, {"varpi"});
    return scale_model(block.get_double("params.varpi"), base("base"));
  }
  if (family == "mix") {
    check_params(block, family, {"varpi"});
    return mix_models(block.get_double("params.varpi"), base("base"),
                      base("base2"));
  }
  if (family == "prod_comb") {
    check_params(block, family, {});
    return product_combination(base("base"), base("base2"));
  }
  if (family == "exp_comp") {
    check_params(block, family, {"t", "varpi"});
    return exp_composition(block.get_double("params.t"),
                           block.get_double_or("params.varpi", 1.0),
                           base("base"));
  }
  if (family == "mixture") {
    check_params(block, family, {});
    MixtureSpec spec;
    const SpaceRef h = need_host();
    for (const auto& [name, child] : block.children) {
      if (name != "atom") continue;
      MixtureAtom atom;
      atom.weight = child.get_double("weight");
      if (child.has("params.corr")) {
        atom.correlation = build_correlation(child, h);
      } else {
        atom.model = build_model(child, h);
      }
      spec.atoms.push_back(std::move(atom));
    }
    return mixture_model(std::move(spec), h);
  }
  throw input_error("unknown model family '" + family +
                    "'; known families: " + model_catalog());
}

}  // namespace indivar
