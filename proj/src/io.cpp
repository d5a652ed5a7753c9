#include "efk/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace efk {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv_preamble(std::ostream& os, const OutputMeta& meta) {
  os << "# config_hash=" << meta.config_hash << " seed=" << meta.seed << '\n';
}

}  // namespace efk
