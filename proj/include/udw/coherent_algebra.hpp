#pragma once

#include <complex>
#include <span>
#include <vector>

namespace udw {

// One coherent-displacement factor: complex amplitude plus accumulated
// scalar phase (radians).
struct DisplacementTerm {
  std::complex<double> amplitude;
  double phase = 0.0;
};

struct OverlapParams {
  double gamma;     // dephasing constant, >= 0
  double mode_amp;  // |alpha|, >= 0
};

// D(a) D(b) = e^{i phi} D(a.amplitude + b.amplitude) with the left factor
// applied after the right; phi = a.phase + b.phase + Im(a.amp conj(b.amp)).
DisplacementTerm compose(const DisplacementTerm& a, const DisplacementTerm& b);

// <0| T_1 T_2 ... T_n |0> for an operator-ordered term list (leftmost first).
// Empty list gives 1.
std::complex<double> vacuum_expectation(std::span<const DisplacementTerm> terms);

// <beta|alpha> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(beta) alpha).
std::complex<double> overlap(std::complex<double> beta,
                             std::complex<double> alpha);

// |<+sqrt(gamma) alpha | -sqrt(gamma) alpha>| = exp(-2 gamma |alpha|^2).
double dephased_overlap(const OverlapParams& p);

// Adjoint of an operator-ordered term list: reversed order, negated
// amplitudes and phases.
void append_adjoint(std::span<const DisplacementTerm> terms,
                    std::vector<DisplacementTerm>& out);

}  // namespace udw
