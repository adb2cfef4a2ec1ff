#pragma once

#include <stdexcept>
#include <string>

namespace npspec {

// Base class for all toolkit errors. Subclasses distinguish configuration
// mistakes (bad inputs, schema violations) from numerical failures so the
// CLI can map them to distinct exit codes.
class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

class invalid_geometry_error : public error {
public:
  using error::error;
};

class configuration_error : public error {
public:
  using error::error;
};

class numerical_error : public error {
public:
  using error::error;
};

// Discretization too coarse for the requested tolerance.
class under_resolution_error : public numerical_error {
public:
  using numerical_error::numerical_error;
};

// -S_tilde failed its positive-definiteness check.
class geometry_scale_error : public numerical_error {
public:
  using numerical_error::numerical_error;
};

// A resolvent or linear system was requested too close to a spectral point.
class near_singular_error : public numerical_error {
public:
  near_singular_error(const std::string& msg, double distance)
      : numerical_error(msg), distance_to_spectrum(distance) {}
  double distance_to_spectrum;
};

// Simple-eigenvalue assumption violated.
class degeneracy_error : public numerical_error {
public:
  using numerical_error::numerical_error;
};

class precision_error : public numerical_error {
public:
  using numerical_error::numerical_error;
};

}  // namespace npspec
