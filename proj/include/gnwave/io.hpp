#ifndef GNWAVE_IO_HPP
#define GNWAVE_IO_HPP

#include "gnwave/evolution.hpp"
#include "gnwave/solitary.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace gnwave::io {

// shortest representation that parses back to the same double
std::string format_double(double v);
std::string build_id();

// run manifest: ordered key = value pairs, one per line
class Manifest {
public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add(const std::string& key, long value);
  void add(const std::string& key, bool value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_manifest(const std::filesystem::path& dir, const Manifest& m);

// generic column table; every data file points back at the manifest
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_table(const std::filesystem::path& file, const Table& t);

void write_diagnostics(const std::filesystem::path& dir,
                       const std::vector<evolution::DiagRecord>& records);
// emits snap_t<time>.csv (x, zeta, u) and spec_t<time>.csv (j, k, magnitudes
// and their log10, clamped at 1e-99)
void write_snapshot(const std::filesystem::path& dir, const spectral::Grid& g,
                    const evolution::Snapshot& snap);
// emits wave_c<value>.csv and the companion wave_c<value>_spec.csv
void write_wave(const std::filesystem::path& dir, const solitary::SolitaryWave& w);

struct StateData {
  std::vector<double> x, zeta, u;
};

// reads a snap-format csv (comment lines ignored) back into columns
StateData read_state_csv(const std::filesystem::path& file);

} // namespace gnwave::io

#endif
