#include "qaccess/accessibility.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "qaccess/error.hpp"

namespace qaccess {

void DeviceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::Validation, fmt::format("{} must be positive, got {}", name, v));
  };
  positive(qubits, "N");
  positive(j_over_h, "J/h");
  positive(t_d, "t_D");
  positive(t_f, "t_f");
  if (!(c > 0.0))  // C may be +inf
    throw Error(ErrorKind::Validation, fmt::format("C must be positive, got {}", c));
  if (qubits < 1.0)
    throw Error(ErrorKind::Validation, fmt::format("N must be >= 1, got {}", qubits));
}

DeviceParams DeviceParams::dwave_one() {
  DeviceParams p;
  p.qubits = 100.0;
  p.j_over_h = 5e9;
  p.t_d = 10e-9;
  p.t_f = 5e-6;
  p.c = 1.0;
  return p;
}

double accessibility_index(const DeviceParams& params) {
  params.validate();
  return 4.0 * params.j_over_h * std::sqrt(params.t_f * params.t_d) /
         std::pow(params.qubits, 0.75);
}

Margin quantumness_margin(const DeviceParams& params) {
  params.validate();
  constexpr double pi = std::numbers::pi;
  const double lhs = params.t_d * 2.0 * pi * params.j_over_h;
  const double rhs = 0.5 * pi * params.c * std::pow(params.qubits, 0.75) *
                     std::sqrt(params.t_d / params.t_f);
  const double value = lhs / rhs;
  return {value, value > 1.0};
}

double max_qubits(const DeviceParams& params) {
  params.validate();
  const double n_max = std::pow(4.0 * params.j_over_h, 4.0 / 3.0) *
                       std::pow(params.t_f * params.t_d, 2.0 / 3.0);
  // Below one qubit the index is undefined; nothing to cross-check.
  if (n_max >= 1.0) {
    DeviceParams at_max = params;
    at_max.qubits = n_max;
    const double check = accessibility_index(at_max);
    if (std::abs(check - 1.0) > 1e-9)
      throw Error(ErrorKind::Validation,
                  fmt::format("index at N_max is {:.17g}, expected 1", check));
  }
  return n_max;
}

QuantumnessReport evaluate_device(const DeviceParams& params) {
  QuantumnessReport r;
  r.index = accessibility_index(params);
  r.passes = r.index > 1.0;
  const Margin m = quantumness_margin(params);
  r.margin = m.value;
  r.margin_passes = m.passes;
  r.n_max = max_qubits(params);
  r.n_max_floor = std::floor(r.n_max);
  return r;
}

}  // namespace qaccess
