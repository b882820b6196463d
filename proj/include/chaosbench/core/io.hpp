#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaosbench/core/empirical.hpp"
#include "chaosbench/core/error.hpp"
#include "chaosbench/core/spectral_field.hpp"

namespace chaosbench {

using json = nlohmann::ordered_json;

/// Shortest text that round-trips through strtod: 17 significant digits.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Write through a temporary file and rename, so readers never see a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InvalidInput("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw InvalidInput("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// -- SpectralField ------------------------------------------------------------

/// {"d", "M", "kind", "coeffs": [[re, im], ...]} in lattice order.
inline json to_json(const SpectralField& f) {
  json c = json::array();
  for (const auto& z : f.coeffs()) c.push_back({z.real(), z.imag()});
  return {{"d", f.dim()}, {"M", f.lattice().cutoff()}, {"kind", to_string(f.kind())}, {"coeffs", std::move(c)}};
}

inline SpectralField spectral_field_from_json(const json& j) {
  try {
    const int d = j.at("d").get<int>(), m = j.at("M").get<int>();
    const ModeLattice lat(d, m);
    const auto& c = j.at("coeffs");
    if (!c.is_array() || c.size() != lat.size())
      throw InvalidInput("SpectralField JSON: expected " + std::to_string(lat.size()) + " coefficients");
    Modes modes(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (!c[i].is_array() || c[i].size() != 2) throw InvalidInput("SpectralField JSON: coefficient is not [re, im]");
      modes[i] = cplx(c[i][0].get<double>(), c[i][1].get<double>());
    }
    FieldKind kind = FieldKind::density;
    if (j.contains("kind")) {
      const auto k = j.at("kind").get<std::string>();
      if (k == to_string(FieldKind::signed_distribution)) kind = FieldKind::signed_distribution;
      else if (k != to_string(FieldKind::density)) throw InvalidInput("SpectralField JSON: unknown kind " + k);
    }
    return SpectralField(lat, std::move(modes), kind);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("SpectralField JSON: ") + e.what());
  }
}

// -- EmpiricalMeasure ---------------------------------------------------------

/// One particle per row, coordinates separated by commas.
inline std::string empirical_to_csv(std::span<const double> positions, int dim) {
  std::string out;
  const std::size_t d = static_cast<std::size_t>(dim);
  for (std::size_t p = 0; p < positions.size() / d; ++p) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out += ',';
      out += format_real(positions[p * d + j]);
    }
    out += '\n';
  }
  return out;
}

inline std::string empirical_to_csv(const EmpiricalMeasure& mu) { return empirical_to_csv(mu.positions(), mu.dim()); }

inline EmpiricalMeasure empirical_from_csv(const std::string& text, int cache_cutoff = 1) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> x;
  int dim = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    int cols = 0;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        x.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidInput("particle CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
      }
      ++cols;
    }
    if (dim == 0) dim = cols;
    if (cols != dim) throw InvalidInput("particle CSV row " + std::to_string(row) + ": expected " + std::to_string(dim) + " columns");
  }
  if (dim == 0) throw InvalidInput("particle CSV: no rows");
  return EmpiricalMeasure(dim, std::move(x), cache_cutoff);
}

// -- time series --------------------------------------------------------------

/// Header "t,re[n],im[n],..." over all lattice modes, then one row per time.
inline std::string mode_series_csv(const ModeLattice& lat, std::span<const double> t, const std::vector<SpectralField>& m) {
  std::string out = "t";
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::string label;
    for (int j = 0; j < lat.dim(); ++j) label += (j ? ";" : "") + std::to_string(lat.mode(i)[static_cast<std::size_t>(j)]);
    out += ",re[" + label + "],im[" + label + "]";
  }
  out += '\n';
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += format_real(t[k]);
    for (const auto& z : m[k].coeffs()) out += ',' + format_real(z.real()) + ',' + format_real(z.imag());
    out += '\n';
  }
  return out;
}

/// Checkpoint of one flow state.
struct FlowState {
  double t = 0.0;
  SpectralField m;
};

inline json to_json(const FlowState& s) { return {{"t", s.t}, {"m", to_json(s.m)}}; }

inline FlowState flow_state_from_json(const json& j) {
  try {
    return {j.at("t").get<double>(), spectral_field_from_json(j.at("m"))};
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("FlowState JSON: ") + e.what());
  }
}

}  // namespace chaosbench
