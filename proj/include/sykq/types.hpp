#pragma once

#include <stdexcept>
#include <string>

namespace sykq {

inline constexpr const char* kToolVersion = "0.1.0";

/// Direction of the pre-quench field and of measured spin operators.
/// The a = y model is equivalent to a = x by a global rotation; interfaces
/// that only make sense for x or z reject Y, operator-size queries map it
/// to X (see operator_size).
enum class Axis { X, Y, Z };

/// Fundamental operator content: Jordan-Wigner Majorana fermions (with
/// Z-strings) or hard-core bosons (strictly on-site).
enum class Flavor { Fermionic, Bosonic };

/// Which of the two Majorana partners of a lattice site: odd = 2j-1, even = 2j.
enum class Parity { Odd, Even };

std::string to_string(Axis a);
std::string to_string(Flavor f);
Axis axis_from_string(const std::string& s);
Flavor flavor_from_string(const std::string& s);

/// Operator/state size mismatch or an index outside the lattice.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Iterative eigensolver or propagator failed to reach tolerance.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symbolic enumeration exceeded its term/memory budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (missing keys, bad values, unknown keys).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace sykq
