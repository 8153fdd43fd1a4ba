#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace router {

using cplx = std::complex<double>;

// Error hierarchy. The two intermediate bases map onto the CLI exit-code
// contract: InputError -> exit 1, NumericError -> exit 2.
class RouterError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public RouterError {
public:
  using RouterError::RouterError;
};

class NumericError : public RouterError {
public:
  using RouterError::RouterError;
};

class SchemaError : public InputError {
public:
  using InputError::InputError;
};

class ValueError : public InputError {
public:
  using InputError::InputError;
};

class UnknownParameter : public InputError {
public:
  using InputError::InputError;
};

class DegenerateDenominator : public NumericError {
public:
  using NumericError::NumericError;
};

class SingularSystem : public NumericError {
public:
  using NumericError::NumericError;
};

class ConservationViolation : public NumericError {
public:
  using NumericError::NumericError;
};

class UndefinedAsymmetry : public NumericError {
public:
  using NumericError::NumericError;
};

class StabilityViolation : public NumericError {
public:
  using NumericError::NumericError;
};

class NotConverged : public NumericError {
public:
  using NumericError::NumericError;
};

class NormDrift : public NumericError {
public:
  using NumericError::NumericError;
};

/// One emitter bridging the input guide and one output guide. All
/// frequencies and rates are dimensionless (units of a reference rate,
/// group velocity = 1).
struct ChannelParams {
  double omega = 0.0;        // transition frequency
  double gamma_minus = 0.0;  // decay rate into the shared input guide
  double gamma_plus = 0.0;   // decay rate into this channel's output guide

  void validate() const;
};

/// The full device: an ordered list of emitters, one per output channel.
struct RouterConfig {
  std::vector<ChannelParams> channels;

  std::size_t size() const { return channels.size(); }
  void validate() const;
  // True when every gamma_minus is zero, i.e. nothing couples to the
  // input guide. Allowed, but worth surfacing to the user.
  bool fully_decoupled() const;
};

/// Input wavepacket with Lorentzian spectrum
/// sqrt(epsilon/pi) / (k - varpi + i epsilon), unit-normalized in k.
/// epsilon -> 0 is the monochromatic limit.
struct PulseSpec {
  double varpi = 0.0;
  double epsilon = 0.01;

  void validate() const;
  cplx spectral_amplitude(double k) const;
};

/// Long-time scattering amplitudes at one probe frequency.
struct ScatteringAmplitudes {
  double k = 0.0;
  cplx alpha_back;
  std::vector<cplx> alpha_out;

  // |alpha_back|^2 + sum_i |alpha_out[i]|^2; equals 1 for any valid
  // evaluation (flux conservation).
  double conservation_sum() const;
};

/// Routing probabilities; p_back + sum(p_out) = 1.
struct RoutingDistribution {
  double p_back = 0.0;
  std::vector<double> p_out;

  double total() const;
};

}  // namespace router
