#include "indivar/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace indivar {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_pgm(const RealizationEnsemble& ens, int realization,
               const std::string& path) {
  if (!ens.grid) throw input_error("PGM output needs a grid ensemble");
  if (!ens.binary) throw input_error("PGM output needs a binary ensemble");
  if (realization < 0 || realization >= ens.n_real())
    throw input_error("realization index out of range");
  const int nx = ens.grid->nx, ny = ens.grid->ny;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  out << "P5\n" << nx << " " << ny << "\n255\n";
  const auto& v = ens.values[realization];
  std::string row(nx, '\0');
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x)
      row[x] = v[y * nx + x] > 0.5 ? static_cast<char>(255) : 0;
    out.write(row.data(), nx);
  }
}

void write_ensemble_csv(const RealizationEnsemble& ens, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  out << "point_index,realization,value\n";
  const int sites = ens.n_sites();
  for (int r = 0; r < ens.n_real(); ++r)
    for (int i = 0; i < sites; ++i)
      out << i << "," << r << "," << format_double(ens.values[r][i]) << "\n";
}

void write_curve_csv(const ExperimentalCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  out << "lag,estimate,pair_count,realization\n";
  for (std::size_t r = 0; r < curve.per_realization.size(); ++r)
    for (const auto& b : curve.per_realization[r])
      out << format_double(b.lag) << "," << format_double(b.estimate) << ","
          << b.pair_count << "," << r << "\n";
  for (const auto& b : curve.average)
    out << format_double(b.lag) << "," << format_double(b.estimate) << ","
        << b.pair_count << ",-1\n";
}

void write_provenance(nlohmann::json j, const std::string& path) {
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open output file: " + path);
  out << content;
}

}  // namespace indivar
