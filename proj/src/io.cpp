#include "gnwave/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#ifndef GNWAVE_BUILD_ID
#define GNWAVE_BUILD_ID "unknown"
#endif

namespace gnwave::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string build_id() { return GNWAVE_BUILD_ID; }

void Manifest::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}
void Manifest::add(const std::string& key, double value) { add(key, format_double(value)); }
void Manifest::add(const std::string& key, int value) { add(key, std::to_string(value)); }
void Manifest::add(const std::string& key, long value) { add(key, std::to_string(value)); }
void Manifest::add(const std::string& key, bool value) {
  add(key, std::string(value ? "true" : "false"));
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out)
    throw std::runtime_error("cannot write " + file.string());
  return out;
}

} // namespace

void write_manifest(const fs::path& dir, const Manifest& m) {
  fs::create_directories(dir);
  auto out = open_out(dir / "manifest.txt");
  for (const auto& [k, v] : m.entries())
    out << k << " = " << v << "\n";
}

void write_table(const fs::path& file, const Table& t) {
  fs::create_directories(file.parent_path());
  auto out = open_out(file);
  out << "# manifest = manifest.txt\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << (c ? "," : "") << t.columns[c];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << "\n";
  }
}

void write_diagnostics(const fs::path& dir, const std::vector<evolution::DiagRecord>& records) {
  Table t;
  t.columns = {"t",        "I1",       "I2",       "I3",       "I4",       "drift_I1",
               "drift_I2", "drift_I3", "drift_I4", "zeta_inf", "u_inf",    "min_h"};
  t.rows.reserve(records.size());
  for (const auto& r : records)
    t.rows.push_back({r.t, r.q.mass, r.q.momentum, r.q.energy, r.q.impulse, r.drift_mass,
                      r.drift_momentum, r.drift_energy, r.drift_impulse, r.zeta_inf, r.u_inf,
                      r.min_depth});
  write_table(dir / "diagnostics.csv", t);
}

namespace {

double log10_clamped(double mag) { return mag < 1e-99 ? -99.0 : std::log10(mag); }

} // namespace

void write_snapshot(const fs::path& dir, const spectral::Grid& g, const evolution::Snapshot& snap) {
  const std::string tag = format_double(snap.t);
  Table t;
  t.columns = {"x", "zeta", "u"};
  for (int i = 0; i < g.n; ++i)
    t.rows.push_back({g.x[i], snap.zeta[i], snap.u[i]});
  write_table(dir / ("snap_t" + tag + ".csv"), t);

  Table s;
  s.columns = {"j", "k", "abs_zeta_hat", "abs_u_hat", "log10_abs_zeta_hat", "log10_abs_u_hat"};
  for (int j = 0; j < g.modes(); ++j) {
    const double mz = std::abs(snap.zeta_hat[j]);
    const double mu = std::abs(snap.u_hat[j]);
    s.rows.push_back({double(j), g.k[j], mz, mu, log10_clamped(mz), log10_clamped(mu)});
  }
  write_table(dir / ("spec_t" + tag + ".csv"), s);
}

void write_wave(const fs::path& dir, const solitary::SolitaryWave& w) {
  const spectral::Grid& g = *w.grid;
  const std::string tag = format_double(w.c);
  fs::create_directories(dir);
  {
    auto out = open_out(dir / ("wave_c" + tag + ".csv"));
    out << "# manifest = manifest.txt\n";
    out << "# c = " << format_double(w.c) << "\n";
    out << "# N = " << g.n << "\n";
    out << "# L = " << format_double(g.length) << "\n";
    out << "# model = " << model_name(w.model) << "\n";
    out << "# backend = " << solitary::backend_name(w.backend) << "\n";
    out << "# residual_norm = " << format_double(w.residual_norm) << "\n";
    out << "# iterations = " << w.newton_iterations << "\n";
    out << "x,eta,zeta,u\n";
    for (int i = 0; i < g.n; ++i)
      out << format_double(g.x[i]) << "," << format_double(w.eta.values[i]) << ","
          << format_double(w.zeta.values[i]) << "," << format_double(w.u.values[i]) << "\n";
  }
  Table s;
  s.columns = {"j", "k", "abs_eta_hat", "log10_abs_eta_hat"};
  for (int j = 0; j < g.modes(); ++j) {
    const double m = std::abs(w.eta.spectrum[j]);
    s.rows.push_back({double(j), g.k[j], m, log10_clamped(m)});
  }
  write_table(dir / ("wave_c" + tag + "_spec.csv"), s);
}

StateData read_state_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in)
    throw std::runtime_error("cannot read " + file.string());
  StateData d;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!line.empty() && (std::isalpha(static_cast<unsigned char>(line[0]))))
      continue; // header row
    std::istringstream row(line);
    std::string cell;
    double vals[4];
    int c = 0;
    while (c < 4 && std::getline(row, cell, ',')) {
      const char* b = cell.data();
      auto res = std::from_chars(b, b + cell.size(), vals[c]);
      if (res.ec != std::errc())
        throw std::runtime_error("bad number '" + cell + "' in " + file.string());
      ++c;
    }
    // three columns: x, zeta, u (snapshot layout); four: x, eta, zeta, u (wave layout)
    if (c != 3 && c != 4)
      throw std::runtime_error("expected three or four columns in " + file.string());
    d.x.push_back(vals[0]);
    d.zeta.push_back(vals[c - 2]);
    d.u.push_back(vals[c - 1]);
  }
  if (d.x.empty())
    throw std::runtime_error("no data rows in " + file.string());
  return d;
}

} // namespace gnwave::io
