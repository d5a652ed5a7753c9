// io.hpp
// Small helpers shared by the CSV/NDJSON/JSON writers.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace efk {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_number(double x);

/// Provenance stamped into every output file.
struct OutputMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// "# config_hash=<hash> seed=<seed>" line for CSV files.
void write_csv_preamble(std::ostream& os, const OutputMeta& meta);

}  // namespace efk
