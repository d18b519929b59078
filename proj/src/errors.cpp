#include "nlslab/errors.hpp"

#include <cstdio>

namespace nlslab {

namespace {
std::string describe(const std::string& where, double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", fraction);
  return where + ": boundary mass fraction " + buf + " exceeds the monitor threshold";
}
}  // namespace

BoundaryMassError::BoundaryMassError(const std::string& where, double fraction)
    : NumericalError(describe(where, fraction)), fraction_(fraction) {}

}  // namespace nlslab
