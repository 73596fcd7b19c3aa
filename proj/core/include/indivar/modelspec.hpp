#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "indivar/models.hpp"

namespace indivar {

/// Plain-text key-value block with nested `name { ... }` sub-blocks.
/// `#` starts a comment; one `key = value` per line.
struct SpecBlock {
  std::map<std::string, std::string> kv;
  std::vector<std::pair<std::string, SpecBlock>> children;

  static SpecBlock parse(std::istream& in);
  static SpecBlock parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  const SpecBlock* child(const std::string& name) const;
};

/// Space descriptor: "euclidean:N", "sphere:N[:radius]", "graph:<path>".
SpaceRef parse_space(const std::string& descriptor);

/// Correlation from `corr`, `scale`, `shape` keys under the given prefix.
GaussianCorrelation build_correlation(const SpecBlock& block,
                                      const SpaceRef& host,
                                      const std::string& prefix = "params.");

/// Model from a spec block: `family =`, `params.*`, `host =`, nested
/// `base {}` / `base2 {}` blocks for combinators. Children inherit the host.
ModelPtr build_model(const SpecBlock& block,
                     std::optional<SpaceRef> inherited_host = std::nullopt);

/// Catalog listing used in error messages and --help.
std::string model_catalog();

}  // namespace indivar
