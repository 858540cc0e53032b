#pragma once

#include <cstdint>

#include "udw/fock_linalg.hpp"
#include "udw/gates.hpp"

namespace udw {

enum class GateSequence { AFirst, BFirst };

struct ChannelParams {
  GateParams gate_a;
  GateParams gate_b;
  double mode_amp = 1.0;
  double env_gamma = 0.0;
  double ct_b = 0.0;
  Index fock_cutoff = 64;
  GateSequence order = GateSequence::AFirst;
  bool allow_cutoff_escalation = true;
};

// Gaussian phase density p(phi); zero variance means a point mass at 0.
struct NoiseDistribution {
  double variance = 0.0;
};

struct QuadratureSpec {
  int nodes = 0;  // 0 = adaptive Gauss-Kronrod; otherwise fixed Gauss-Hermite
  double abs_tol = 1e-10;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Channel parameters with the pi/4 phase constraint solved for both gates.
ChannelParams strict_channel_params(double gamma_phi, double mode_amp,
                                    Index fock_cutoff = 64);

// Maximally entangled reference-sender input on R (x) A.
DensityMatrix bell_input();

// Receiver initial state (1, i)/sqrt(2).
CVector receiver_ket();

// State-transfer channel, analytic path: field matrix elements evaluated by
// scalar displacement algebra, no truncation. Input lives on R (x) A;
// output on R (x) B.
DensityMatrix transfer_channel_exact(const ChannelParams& p,
                                     const DensityMatrix& input);

// Same channel through the truncated-Fock oracle: full state on
// R (x) A (x) Fock (x) B, explicit gate matrices, then partial trace.
DensityMatrix transfer_channel_fock(const ChannelParams& p,
                                    const DensityMatrix& input);

// Fock-basis dephasing: entry (n, m) is multiplied by
// exp(-gamma_e (n-m)^2 / 2), the characteristic function of the
// variance-gamma_e Gaussian phase density.
DensityMatrix env_dephase(const DensityMatrix& rho_fock, double gamma_e);

enum class ChannelPath { Exact, Fock };

// Pipeline with env_dephase acting on the final field state, immediately
// before the field is traced out. The dephasing factor is 1 on the Fock
// diagonal and the trace uses only the diagonal, so the output equals the
// baseline channel; the Fock path performs the factor application and the
// trace explicitly.
DensityMatrix transfer_channel_with_env(const ChannelParams& p,
                                        const DensityMatrix& input,
                                        ChannelPath path = ChannelPath::Exact);

// exp(-2 g A^2 / (1 + 4 A^2 b^2 g)) / sqrt(1 + 4 A^2 b^2 g).
double crosstalk_overlap(double gamma_phi, double b, double mode_amp);

// Numerical evaluation of the opposite-sign branch integral
// int dphi p(phi) exp(-2 (phi + sqrt(gamma_phi))^2 A^2); the same-sign
// branch integrand is identically 1. dist.variance must equal b^2 gamma_phi.
double crosstalk_overlap_quadrature(double gamma_phi, double b,
                                    double mode_amp,
                                    const NoiseDistribution& dist,
                                    const QuadratureSpec& quad = {},
                                    bool same_sign = false);

// Noiseless coupling whose overlap decay matches the noisy channel's:
// lambda^2 = lambda_phi^2/(1+c) + (K/(4 A^2)) ln(1+c),
// c = 4 A^2 b^2 lambda_phi^2 / K, K = sqrt((2 pi)^3) sigma.
double effective_coupling(double lambda_phi, double b, double mode_amp,
                          double sigma);

// Same substitution at the gamma level (sigma cancels):
// g/(1+c) + ln(1+c)/(4 A^2), c = 4 A^2 b^2 g. Exact identity:
// exp(-2 g_eff A^2) = crosstalk_overlap(g, b, A).
double effective_gamma_phi(double gamma_phi, double b, double mode_amp);

// Baseline channel evaluated at gamma_phi -> effective_gamma_phi, with the
// phase constraint re-solved. ct_b = 0 reproduces the baseline exactly.
DensityMatrix transfer_channel_noisy(const ChannelParams& p,
                                     const DensityMatrix& input);

struct McChannelResult {
  DensityMatrix state;
  Eigen::Matrix4d stderr_real;  // per-entry standard error of the mean
  Eigen::Matrix4d stderr_imag;
};

// Monte Carlo mixture over phi ~ p(phi) (variance ct_b^2 gamma_phi): each
// sample runs the pipeline with the encoding gate's phi amplitude shifted
// sqrt(gamma_phi) -> sqrt(gamma_phi) + phi. Deterministic given the seed;
// per-sample streams are independently seeded.
McChannelResult crosstalk_channel_mc(const ChannelParams& p,
                                     const DensityMatrix& input,
                                     std::int64_t samples, std::uint64_t seed,
                                     ChannelPath path = ChannelPath::Fock);

}  // namespace udw
