#include "udw/coherent_algebra.hpp"

#include <cmath>
#include <vector>

namespace udw {

DisplacementTerm compose(const DisplacementTerm& a, const DisplacementTerm& b) {
  return DisplacementTerm{
      a.amplitude + b.amplitude,
      a.phase + b.phase + std::imag(a.amplitude * std::conj(b.amplitude))};
}

std::complex<double> vacuum_expectation(
    std::span<const DisplacementTerm> terms) {
  DisplacementTerm acc{{0.0, 0.0}, 0.0};
  for (const auto& t : terms) acc = compose(acc, t);
  return std::exp(std::complex<double>(0.0, acc.phase)) *
         std::exp(-0.5 * std::norm(acc.amplitude));
}

std::complex<double> overlap(std::complex<double> beta,
                             std::complex<double> alpha) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                  std::conj(beta) * alpha);
}

double dephased_overlap(const OverlapParams& p) {
  return std::exp(-2.0 * p.gamma * p.mode_amp * p.mode_amp);
}

void append_adjoint(std::span<const DisplacementTerm> terms,
                    std::vector<DisplacementTerm>& out) {
  for (std::size_t i = terms.size(); i-- > 0;)
    out.push_back({-terms[i].amplitude, -terms[i].phase});
}

}  // namespace udw
