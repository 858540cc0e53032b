#pragma once

#include <vector>

#include "udw/coherent_algebra.hpp"
#include "udw/fock_linalg.hpp"

namespace udw {

enum class QubitLabel { A, B, CT };

// Which quadrature coupling acts first. Encoding gates write the field
// amplitude and then pick up the conjugate-quadrature phase; decoding gates
// read the phase first and then erase the amplitude.
enum class GateOrder { PhiThenPi, PiThenPhi };

struct GateParams {
  double gamma_phi = 0.0;
  double gamma_pi = 0.0;
  double mode_amp = 1.0;  // |alpha|
  QubitLabel which = QubitLabel::A;
};

struct GammaPhase {
  double value = 0.0;  // radians, reported mod 2 pi
};

// One (z, x) branch of a controlled unitary: projector signs plus the
// operator-ordered displacement factors (leftmost applied last).
struct GateBranch {
  int z = +1;
  int x = +1;
  std::vector<DisplacementTerm> displacements;
};

// Amplitude i z sqrt(gamma_phi) |alpha| (imaginary quadrature).
DisplacementTerm phi_displacement(const GateParams& p, int z);

// Amplitude -x sqrt(gamma_pi) |alpha| (real quadrature).
DisplacementTerm pi_displacement(const GateParams& p, int x);

// Gamma_eff = 2 sqrt(gamma_phi gamma_pi) |alpha|^2 mod 2 pi, the relative
// phase between field branches generated by one phi-Pi crossing.
GammaPhase gamma_phase(const GateParams& p);

// Smallest gamma_pi > 0 with gamma_phase = pi/4:
// (pi/4)^2 / (4 gamma_phi |alpha|^4).
double solve_gamma_pi(double gamma_phi, double mode_amp);

// Four branches over (z, x) in {+1,-1}^2.
std::vector<GateBranch> gate_branches(const GateParams& p,
                                      GateOrder order = GateOrder::PhiThenPi);

// Explicit (2N)x(2N) matrix, qubit (x) field ordering.
// PhiThenPi:  sum_{z,x} P_x P_z (x) D(x d_Pi) D(z d_phi)
// PiThenPhi:  sum_{z,x} P_z P_x (x) D(z d_phi) D(x d_Pi)
CMatrix gate_matrix(const GateParams& p, Index n,
                    GateOrder order = GateOrder::PhiThenPi);

// Qubit projector helpers (2x2).
CMatrix projector_z(int z);
CMatrix projector_x(int x);

}  // namespace udw
