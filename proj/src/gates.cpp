#include "udw/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace udw {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

DisplacementTerm phi_displacement(const GateParams& p, int z) {
  return {Complex(0.0, z * std::sqrt(p.gamma_phi) * p.mode_amp), 0.0};
}

DisplacementTerm pi_displacement(const GateParams& p, int x) {
  return {Complex(-x * std::sqrt(p.gamma_pi) * p.mode_amp, 0.0), 0.0};
}

GammaPhase gamma_phase(const GateParams& p) {
  double g = 2.0 * std::sqrt(p.gamma_phi * p.gamma_pi) * p.mode_amp *
             p.mode_amp;
  return {std::fmod(g, kTwoPi)};
}

double solve_gamma_pi(double gamma_phi, double mode_amp) {
  if (gamma_phi <= 0.0 || mode_amp <= 0.0)
    throw std::invalid_argument("solve_gamma_pi: inputs must be positive");
  double quarter_pi = std::numbers::pi / 4.0;
  double a2 = mode_amp * mode_amp;
  return quarter_pi * quarter_pi / (4.0 * gamma_phi * a2 * a2);
}

std::vector<GateBranch> gate_branches(const GateParams& p, GateOrder order) {
  std::vector<GateBranch> out;
  for (int z : {+1, -1}) {
    for (int x : {+1, -1}) {
      GateBranch b{z, x, {}};
      if (order == GateOrder::PhiThenPi)
        b.displacements = {pi_displacement(p, x), phi_displacement(p, z)};
      else
        b.displacements = {phi_displacement(p, z), pi_displacement(p, x)};
      out.push_back(std::move(b));
    }
  }
  return out;
}

CMatrix projector_z(int z) {
  CMatrix p = CMatrix::Zero(2, 2);
  p(z == +1 ? 0 : 1, z == +1 ? 0 : 1) = 1.0;
  return p;
}

CMatrix projector_x(int x) {
  CMatrix p(2, 2);
  p << 0.5, 0.5 * x, 0.5 * x, 0.5;
  return p;
}

CMatrix gate_matrix(const GateParams& p, Index n, GateOrder order) {
  CMatrix u = CMatrix::Zero(2 * n, 2 * n);
  for (const auto& b : gate_branches(p, order)) {
    CMatrix d = CMatrix::Identity(n, n);
    for (const auto& t : b.displacements)
      d = d * displacement_matrix(t.amplitude, n);
    CMatrix proj = order == GateOrder::PhiThenPi
                       ? CMatrix(projector_x(b.x) * projector_z(b.z))
                       : CMatrix(projector_z(b.z) * projector_x(b.x));
    u += kron(proj, d);
  }
  return u;
}

}  // namespace udw
