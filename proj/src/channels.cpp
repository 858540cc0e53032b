#include "udw/channels.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace udw {

namespace {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector2cd;
using Eigen::Vector4cd;

struct FieldKet {
  Complex mu{0.0, 0.0};
  double phase = 0.0;
};

// D(d)|mu> = e^{i Im(d conj(mu))} |mu + d>
void apply_term(FieldKet& k, const DisplacementTerm& t) {
  k.phase += std::imag(t.amplitude * std::conj(k.mu));
  k.mu += t.amplitude;
}

struct BranchSet {
  // Per (z, x) branch: qubit projector product and displacement terms in
  // application order (first applied first).
  std::vector<Matrix2cd> proj;
  std::vector<std::vector<DisplacementTerm>> terms;
};

BranchSet build_branches(const GateParams& g, GateOrder order,
                         double phi_shift) {
  GateParams shifted = g;
  if (phi_shift != 0.0) {
    double s = std::sqrt(g.gamma_phi) + phi_shift;
    shifted.gamma_phi = s * s;
    // sign of the shifted amplitude is carried by s below
  }
  BranchSet out;
  for (const auto& b : gate_branches(g, order)) {
    Matrix2cd p = order == GateOrder::PhiThenPi
                      ? Matrix2cd(projector_x(b.x) * projector_z(b.z))
                      : Matrix2cd(projector_z(b.z) * projector_x(b.x));
    // displacement lists are operator-ordered; application order is reversed
    std::vector<DisplacementTerm> ts(b.displacements.rbegin(),
                                     b.displacements.rend());
    if (phi_shift != 0.0) {
      double s = std::sqrt(g.gamma_phi) + phi_shift;
      for (auto& t : ts)
        if (std::real(t.amplitude) == 0.0 && std::imag(t.amplitude) != 0.0)
          t.amplitude = Complex(0.0, double(b.z) * s * g.mode_amp);
    }
    out.proj.push_back(p);
    out.terms.push_back(std::move(ts));
  }
  return out;
}

void check_two_qubit_input(const DensityMatrix& input) {
  if (input.dims != std::vector<Index>{2, 2} || input.mat.rows() != 4)
    throw DimensionError("channel input must be a two-qubit state on R (x) A");
  validate_density(input);
}

// rho_RB = sum_{k,k'} <field_k'|field_k> M_R[kA,k'A] (x) B_k B_k'^dag
DensityMatrix assemble_exact(const ChannelParams& p, const DensityMatrix& input,
                             double phi_shift) {
  check_two_qubit_input(input);
  BranchSet enc = build_branches(p.gate_a, GateOrder::PhiThenPi, phi_shift);
  BranchSet dec = build_branches(p.gate_b, GateOrder::PiThenPhi, 0.0);

  Vector2cd b0 = receiver_ket();
  const Matrix4cd rho_in = input.mat;

  // 16 field kets indexed by (encoder branch, decoder branch)
  FieldKet kets[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      FieldKet k;
      if (p.order == GateSequence::AFirst) {
        for (const auto& t : enc.terms[i]) apply_term(k, t);
        for (const auto& t : dec.terms[j]) apply_term(k, t);
      } else {
        for (const auto& t : dec.terms[j]) apply_term(k, t);
        for (const auto& t : enc.terms[i]) apply_term(k, t);
      }
      kets[i][j] = k;
    }
  }

  // Reduced reference-side factors per encoder branch pair
  Matrix2cd mr[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int i2 = 0; i2 < 4; ++i2) {
      Matrix4cd big = kron(CMatrix(Matrix2cd::Identity()), CMatrix(enc.proj[i])) *
                      rho_in *
                      kron(CMatrix(Matrix2cd::Identity()),
                           CMatrix(enc.proj[i2].adjoint()));
      Matrix2cd m;
      for (int r = 0; r < 2; ++r)
        for (int r2 = 0; r2 < 2; ++r2)
          m(r, r2) = big(2 * r + 0, 2 * r2 + 0) + big(2 * r + 1, 2 * r2 + 1);
      mr[i][i2] = m;
    }
  }

  Vector2cd bk[4];
  for (int j = 0; j < 4; ++j) bk[j] = dec.proj[j] * b0;

  Matrix4cd rho = Matrix4cd::Zero();
  for (int i = 0; i < 4; ++i)
    for (int i2 = 0; i2 < 4; ++i2)
      for (int j = 0; j < 4; ++j)
        for (int j2 = 0; j2 < 4; ++j2) {
          const FieldKet& k = kets[i][j];
          const FieldKet& kb = kets[i2][j2];
          Complex f = std::exp(Complex(0.0, k.phase - kb.phase)) *
                      overlap(kb.mu, k.mu);
          if (f == Complex(0.0, 0.0)) continue;
          Matrix2cd bo = bk[j] * bk[j2].adjoint();
          rho += f * Matrix4cd(kron(CMatrix(mr[i][i2]), CMatrix(bo)));
        }

  DensityMatrix out{CMatrix(rho), {2, 2}};
  validate_density(out);
  return out;
}

// Multiply u (dm x dm) into the middle index of a (dl, dm, dr) tensor.
void apply_middle(CVector& psi, const CMatrix& u, Index dl, Index dm,
                  Index dr) {
  using RowMat =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (Index l = 0; l < dl; ++l) {
    Eigen::Map<RowMat> block(psi.data() + l * dm * dr, dm, dr);
    block = u * block;
  }
}

// (i1 i2, j1 j2) -> (i2 i1, j2 j1)
CMatrix swap_kron(const CMatrix& u, Index d1, Index d2) {
  CMatrix out(u.rows(), u.cols());
  for (Index i1 = 0; i1 < d1; ++i1)
    for (Index i2 = 0; i2 < d2; ++i2)
      for (Index j1 = 0; j1 < d1; ++j1)
        for (Index j2 = 0; j2 < d2; ++j2)
          out(i2 * d1 + i1, j2 * d1 + j1) = u(i1 * d2 + i2, j1 * d2 + j2);
  return out;
}

double pipeline_amplitude_bound(const ChannelParams& p, double phi_shift) {
  auto gate_bound = [](const GateParams& g, double shift) {
    double a = std::abs(std::sqrt(g.gamma_phi) + shift) * g.mode_amp;
    double q = std::sqrt(g.gamma_pi) * g.mode_amp;
    return a + q;
  };
  return gate_bound(p.gate_a, phi_shift) + gate_bound(p.gate_b, 0.0);
}

Index pick_cutoff(const ChannelParams& p, double phi_shift) {
  double bound = pipeline_amplitude_bound(p, phi_shift);
  if (!p.allow_cutoff_escalation) {
    if (!cutoff_admits(bound, p.fock_cutoff))
      throw TruncationError(
          "pipeline amplitude bound " + std::to_string(bound) +
              " inadmissible at fixed cutoff " + std::to_string(p.fock_cutoff),
          required_cutoff(bound, p.fock_cutoff, 512));
    return p.fock_cutoff;
  }
  return required_cutoff(bound, p.fock_cutoff, 512);
}

GateParams shifted_gate(const GateParams& g, double phi_shift) {
  if (phi_shift == 0.0) return g;
  GateParams out = g;
  double s = std::sqrt(g.gamma_phi) + phi_shift;
  out.gamma_phi = s * s;
  // A negative shifted amplitude flips the branch sign; reproduce it by
  // flipping the mode-amp sign fed to the displacement builder.
  out.mode_amp = s < 0.0 ? -g.mode_amp : g.mode_amp;
  return out;
}

// Pure-state pipeline on R (x) A (x) F (x) B for one input ket; returns the
// final state vector.
CVector evolve_fock_pure(const ChannelParams& p, const Vector4cd& ra_ket,
                         Index n, double phi_shift) {
  CMatrix ua = gate_matrix(shifted_gate(p.gate_a, phi_shift), n,
                           GateOrder::PhiThenPi);
  CMatrix ub_fb =
      swap_kron(gate_matrix(p.gate_b, n, GateOrder::PiThenPhi), 2, n);

  Index d = 2 * 2 * n * 2;
  CVector psi = CVector::Zero(d);
  Vector2cd b0 = receiver_ket();
  for (Index r = 0; r < 2; ++r)
    for (Index a = 0; a < 2; ++a)
      for (Index b = 0; b < 2; ++b)
        psi(((r * 2 + a) * n + 0) * 2 + b) = ra_ket(r * 2 + a) * b0(b);

  if (p.order == GateSequence::AFirst) {
    apply_middle(psi, ua, 2, 2 * n, 2);       // (A, F) block
    apply_middle(psi, ub_fb, 4, 2 * n, 1);    // (F, B) block
  } else {
    apply_middle(psi, ub_fb, 4, 2 * n, 1);
    apply_middle(psi, ua, 2, 2 * n, 2);
  }
  return psi;
}

Matrix4cd contract_rb(const CVector& psi, Index n) {
  Matrix4cd rho = Matrix4cd::Zero();
  for (Index r = 0; r < 2; ++r)
    for (Index b = 0; b < 2; ++b)
      for (Index r2 = 0; r2 < 2; ++r2)
        for (Index b2 = 0; b2 < 2; ++b2) {
          Complex acc = 0.0;
          for (Index a = 0; a < 2; ++a)
            for (Index f = 0; f < n; ++f)
              acc += psi(((r * 2 + a) * n + f) * 2 + b) *
                     std::conj(psi(((r2 * 2 + a) * n + f) * 2 + b2));
          rho(r * 2 + b, r2 * 2 + b2) = acc;
        }
  return rho;
}

// Eigen-decompose a two-qubit state into pure components.
std::vector<std::pair<double, Vector4cd>> pure_components(
    const DensityMatrix& input) {
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(
      (input.mat + input.mat.adjoint()) / 2.0);
  std::vector<std::pair<double, Vector4cd>> out;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()(i) > 1e-14)
      out.emplace_back(es.eigenvalues()(i), es.eigenvectors().col(i));
  return out;
}

DensityMatrix finalize_traced(Matrix4cd rho, Index n) {
  double tr = std::real(rho.trace());
  if (std::abs(tr - 1.0) > 1e-8)
    throw TruncationError("truncation leakage " + std::to_string(1.0 - tr) +
                              " exceeds 1e-8",
                          2 * n);
  rho /= tr;
  DensityMatrix out{CMatrix(rho), {2, 2}};
  validate_density(out);
  return out;
}

DensityMatrix fock_channel(const ChannelParams& p, const DensityMatrix& input,
                           double phi_shift) {
  check_two_qubit_input(input);
  Index n = pick_cutoff(p, phi_shift);
  Matrix4cd rho = Matrix4cd::Zero();
  for (const auto& [w, ket] : pure_components(input))
    rho += w * contract_rb(evolve_fock_pure(p, ket, n, phi_shift), n);
  return finalize_traced(rho, n);
}

double gauss_kronrod_integral(const std::function<double(double)>& f,
                              double lo, double hi, double abs_tol) {
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, lo, hi, 15, 1e-13, &err);
  if (!(err <= abs_tol * std::max(1.0, std::abs(val))))
    throw QuadratureError("adaptive quadrature did not converge: estimate " +
                          std::to_string(val) + ", error bound " +
                          std::to_string(err));
  return val;
}

// Physicists' Gauss-Hermite rule (weight e^{-t^2}) via the Jacobi matrix.
void gauss_hermite(int n, std::vector<double>& nodes,
                   std::vector<double>& weights) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(k / 2.0);
    j(k - 1, k) = b;
    j(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(n);
  weights.resize(n);
  double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    weights[i] = sqrt_pi * v0 * v0;
  }
}

}  // namespace

ChannelParams strict_channel_params(double gamma_phi, double mode_amp,
                                    Index fock_cutoff) {
  double gp = solve_gamma_pi(gamma_phi, mode_amp);
  ChannelParams p;
  p.gate_a = GateParams{gamma_phi, gp, mode_amp, QubitLabel::A};
  p.gate_b = GateParams{gamma_phi, gp, mode_amp, QubitLabel::B};
  p.mode_amp = mode_amp;
  p.fock_cutoff = fock_cutoff;
  return p;
}

DensityMatrix bell_input() {
  Vector4cd v = Vector4cd::Zero();
  v(0) = 1.0 / std::numbers::sqrt2;
  v(3) = 1.0 / std::numbers::sqrt2;
  return DensityMatrix{CMatrix(v * v.adjoint()), {2, 2}};
}

CVector receiver_ket() {
  CVector v(2);
  v << Complex(1.0, 0.0), Complex(0.0, 1.0);
  return v / std::numbers::sqrt2;
}

DensityMatrix transfer_channel_exact(const ChannelParams& p,
                                     const DensityMatrix& input) {
  return assemble_exact(p, input, 0.0);
}

DensityMatrix transfer_channel_fock(const ChannelParams& p,
                                    const DensityMatrix& input) {
  return fock_channel(p, input, 0.0);
}

DensityMatrix env_dephase(const DensityMatrix& rho_fock, double gamma_e) {
  if (gamma_e < 0.0) throw std::invalid_argument("env_dephase: gamma_e < 0");
  if (rho_fock.dims.size() != 1)
    throw DimensionError("env_dephase expects a single Fock subsystem");
  CMatrix out = rho_fock.mat;
  for (Index nn = 0; nn < out.rows(); ++nn)
    for (Index m = 0; m < out.cols(); ++m) {
      double d = double(nn - m);
      out(nn, m) *= std::exp(-gamma_e * d * d / 2.0);
    }
  return DensityMatrix{std::move(out), rho_fock.dims};
}

DensityMatrix transfer_channel_with_env(const ChannelParams& p,
                                        const DensityMatrix& input,
                                        ChannelPath path) {
  if (p.env_gamma < 0.0)
    throw std::invalid_argument("env gamma must be non-negative");
  if (path == ChannelPath::Exact) {
    // Number dephasing is trace preserving, and the field is traced out
    // immediately after it acts: every branch-pair trace is unchanged, so
    // the output coincides with the baseline channel.
    return transfer_channel_exact(p, input);
  }
  check_two_qubit_input(input);
  Index n = pick_cutoff(p, 0.0);
  Index d = 2 * 2 * n * 2;
  if (d > 1024)
    throw TruncationError(
        "env Fock path holds the full joint state; cutoff too large", n);
  CMatrix rho_full = CMatrix::Zero(d, d);
  for (const auto& [w, ket] : pure_components(input)) {
    CVector psi = evolve_fock_pure(p, ket, n, 0.0);
    rho_full += w * (psi * psi.adjoint());
  }
  // dephasing factors on the field indices of the joint state
  for (Index row = 0; row < d; ++row) {
    Index f_row = (row / 2) % n;
    for (Index col = 0; col < d; ++col) {
      Index f_col = (col / 2) % n;
      double diff = double(f_row - f_col);
      rho_full(row, col) *= std::exp(-p.env_gamma * diff * diff / 2.0);
    }
  }
  DensityMatrix joint{std::move(rho_full), {2, 2, n, 2}};
  DensityMatrix reduced = partial_trace(joint, {0, 3});
  Matrix4cd rb = reduced.mat;
  return finalize_traced(rb, n);
}

double crosstalk_overlap(double gamma_phi, double b, double mode_amp) {
  double a2 = mode_amp * mode_amp;
  double c = 4.0 * a2 * b * b * gamma_phi;
  return std::exp(-2.0 * gamma_phi * a2 / (1.0 + c)) / std::sqrt(1.0 + c);
}

double crosstalk_overlap_quadrature(double gamma_phi, double b,
                                    double mode_amp,
                                    const NoiseDistribution& dist,
                                    const QuadratureSpec& quad,
                                    bool same_sign) {
  if (gamma_phi < 0.0 || b < 0.0 || mode_amp < 0.0 || dist.variance < 0.0)
    throw std::invalid_argument("crosstalk_overlap_quadrature: negative input");
  double expected_var = b * b * gamma_phi;
  if (std::abs(dist.variance - expected_var) >
      1e-9 * std::max(1.0, expected_var))
    throw std::invalid_argument(
        "noise variance must equal b^2 gamma_phi (got " +
        std::to_string(dist.variance) + ", expected " +
        std::to_string(expected_var) + ")");
  if (same_sign) return 1.0;  // integrand identically 1

  double a2 = mode_amp * mode_amp;
  double root_g = std::sqrt(gamma_phi);
  auto integrand = [&](double phi) {
    double u = phi + root_g;
    return std::exp(-2.0 * u * u * a2);
  };
  double v = dist.variance;
  if (v == 0.0) return integrand(0.0);  // degenerate (delta) distribution

  if (quad.nodes > 0) {
    // fixed-order Gauss-Hermite in the noise variable, with an order-doubling
    // convergence check
    auto gh_value = [&](int n) {
      std::vector<double> t, w;
      gauss_hermite(n, t, w);
      double scale = std::sqrt(2.0 * v);
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += w[i] / std::sqrt(std::numbers::pi) * integrand(scale * t[i]);
      return acc;
    };
    double v1 = gh_value(quad.nodes);
    double v2 = gh_value(2 * quad.nodes);
    if (std::abs(v1 - v2) > quad.abs_tol)
      throw QuadratureError(
          "Gauss-Hermite rule did not converge at " +
          std::to_string(quad.nodes) + " nodes: value " + std::to_string(v1) +
          " vs " + std::to_string(v2) + " at doubled order");
    return v2;
  }

  double sigma_p = std::sqrt(v);
  double w2 = mode_amp > 0.0 ? 1.0 / (2.0 * mode_amp * std::numbers::sqrt2)
                             : sigma_p;
  double lo = std::min(-12.0 * sigma_p, -root_g - 12.0 * w2);
  double hi = std::max(12.0 * sigma_p, -root_g + 12.0 * w2);
  double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * v);
  auto f = [&](double phi) {
    return norm * std::exp(-phi * phi / (2.0 * v)) * integrand(phi);
  };
  return gauss_kronrod_integral(f, lo, hi, quad.abs_tol);
}

double effective_gamma_phi(double gamma_phi, double b, double mode_amp) {
  if (b == 0.0) return gamma_phi;
  double a2 = mode_amp * mode_amp;
  double c = 4.0 * a2 * b * b * gamma_phi;
  if (a2 == 0.0) return gamma_phi;
  return gamma_phi / (1.0 + c) + std::log1p(c) / (4.0 * a2);
}

double effective_coupling(double lambda_phi, double b, double mode_amp,
                          double sigma) {
  if (lambda_phi <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("effective_coupling: lambda_phi, sigma > 0");
  double k = std::sqrt(std::pow(2.0 * std::numbers::pi, 3)) * sigma;
  double a2 = mode_amp * mode_amp;
  double c = 4.0 * a2 * b * b * lambda_phi * lambda_phi / k;
  if (c == 0.0) return lambda_phi;
  double l2 = lambda_phi * lambda_phi / (1.0 + c) +
              k * std::log1p(c) / (4.0 * a2);
  return std::sqrt(l2);
}

DensityMatrix transfer_channel_noisy(const ChannelParams& p,
                                     const DensityMatrix& input) {
  if (p.ct_b < 0.0) throw std::invalid_argument("ct_b must be non-negative");
  if (p.ct_b == 0.0) return transfer_channel_exact(p, input);
  double g_eff =
      effective_gamma_phi(p.gate_a.gamma_phi, p.ct_b, p.gate_a.mode_amp);
  ChannelParams q = p;
  double gp = solve_gamma_pi(g_eff, p.gate_a.mode_amp);
  q.gate_a.gamma_phi = g_eff;
  q.gate_a.gamma_pi = gp;
  q.gate_b.gamma_phi = g_eff;
  q.gate_b.gamma_pi = gp;
  return transfer_channel_exact(q, input);
}

McChannelResult crosstalk_channel_mc(const ChannelParams& p,
                                     const DensityMatrix& input,
                                     std::int64_t samples, std::uint64_t seed,
                                     ChannelPath path) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  check_two_qubit_input(input);
  double v = p.ct_b * p.ct_b * p.gate_a.gamma_phi;
  double sd = std::sqrt(v);

  // Kahan-compensated accumulation per entry
  Matrix4cd sum = Matrix4cd::Zero(), comp = Matrix4cd::Zero();
  Eigen::Matrix4d sum_re2 = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d sum_im2 = Eigen::Matrix4d::Zero();

  for (std::int64_t i = 0; i < samples; ++i) {
    std::seed_seq seq{std::uint32_t(seed & 0xffffffffu),
                      std::uint32_t(seed >> 32), std::uint32_t(i & 0xffffffff),
                      std::uint32_t(std::uint64_t(i) >> 32)};
    std::mt19937_64 eng(seq);
    double phi = 0.0;
    if (sd > 0.0) {
      std::normal_distribution<double> dist(0.0, sd);
      phi = dist(eng);
    }
    Matrix4cd r = path == ChannelPath::Exact
                      ? Matrix4cd(assemble_exact(p, input, phi).mat)
                      : Matrix4cd(fock_channel(p, input, phi).mat);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Complex y = r(a, b) - comp(a, b);
        Complex t = sum(a, b) + y;
        comp(a, b) = (t - sum(a, b)) - y;
        sum(a, b) = t;
        sum_re2(a, b) += std::real(r(a, b)) * std::real(r(a, b));
        sum_im2(a, b) += std::imag(r(a, b)) * std::imag(r(a, b));
      }
  }

  Matrix4cd mean = sum / double(samples);
  Eigen::Matrix4d se_re, se_im;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double mr = std::real(mean(a, b)), mi = std::imag(mean(a, b));
      double var_r =
          std::max(sum_re2(a, b) / double(samples) - mr * mr, 0.0);
      double var_i =
          std::max(sum_im2(a, b) / double(samples) - mi * mi, 0.0);
      se_re(a, b) = std::sqrt(var_r / double(samples));
      se_im(a, b) = std::sqrt(var_i / double(samples));
    }

  DensityMatrix state{CMatrix(mean), {2, 2}};
  validate_density(state);
  return McChannelResult{std::move(state), se_re, se_im};
}

}  // namespace udw
