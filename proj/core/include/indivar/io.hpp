#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "indivar/estimate.hpp"
#include "indivar/simulate.hpp"

namespace indivar {

/// Deterministic shortest round-trip formatting ("%.17g").
std::string format_double(double x);

/// Binary grid realization as a P5 PGM (0 -> 0, 1 -> 255).
void write_pgm(const RealizationEnsemble& ens, int realization,
               const std::string& path);

/// Point-set ensemble as CSV `point_index,realization,value`.
void write_ensemble_csv(const RealizationEnsemble& ens, const std::string& path);

/// Curve CSV `lag,estimate,pair_count,realization`; per-realization rows
/// first, the ensemble average last with realization = -1.
void write_curve_csv(const ExperimentalCurve& curve, const std::string& path);

/// Provenance JSON sidecar; a `timestamp` field is added.
void write_provenance(nlohmann::json j, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace indivar
