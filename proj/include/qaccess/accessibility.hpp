#pragma once

namespace qaccess {

// Device-level quantumness criterion for adiabatic operation. All inputs are
// SI: J/h in hertz, times in seconds.
struct DeviceParams {
  double qubits = 1.0;
  double j_over_h = 0.0;
  double t_d = 0.0;
  double t_f = 0.0;
  double c = 1.0;

  void validate() const;

  /// t_D = 10 ns, t_f = 5 us, N = 100, J/h = 5 GHz.
  static DeviceParams dwave_one();
};

struct QuantumnessReport {
  double index = 0.0;   // accessibility index at C = 1
  bool passes = false;  // index > 1
  double margin = 0.0;  // lhs / rhs of the criterion at the given C
  bool margin_passes = false;
  double n_max = 0.0;
  double n_max_floor = 0.0;
};

/// 4 (J/h) sqrt(t_f t_D) / N^{3/4}
double accessibility_index(const DeviceParams& params);

struct Margin {
  double value;
  bool passes;
};

/// [t_D 2 pi J/h] / [(pi/2) C N^{3/4} (t_D/t_f)^{1/2}]
Margin quantumness_margin(const DeviceParams& params);

/// (4 J/h)^{4/3} (t_f t_D)^{2/3}: the qubit count at which the index is 1.
double max_qubits(const DeviceParams& params);

QuantumnessReport evaluate_device(const DeviceParams& params);

}  // namespace qaccess
