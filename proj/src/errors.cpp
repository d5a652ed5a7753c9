#include "efk/errors.hpp"

#include <sstream>

namespace efk {

namespace {

std::string underrun_message(double q, double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "history underrun: lookup at t=" << q << " outside window [" << lo << ", " << hi << "]";
  return os.str();
}

std::string divergence_message(double t, double m) {
  std::ostringstream os;
  os.precision(17);
  os << "divergence at t=" << t << ": max |a_k| = " << m;
  return os.str();
}

}  // namespace

HistoryUnderrun::HistoryUnderrun(double query, double window_lo, double window_hi)
    : std::runtime_error(underrun_message(query, window_lo, window_hi)),
      query_(query),
      lo_(window_lo),
      hi_(window_hi) {}

DivergenceError::DivergenceError(double time, double max_coefficient)
    : std::runtime_error(divergence_message(time, max_coefficient)),
      time_(time),
      max_coeff_(max_coefficient) {}

}  // namespace efk
