#include "udw/fock_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace udw {

namespace {

Index product(const std::vector<Index>& dims) {
  Index p = 1;
  for (Index d : dims) p *= d;
  return p;
}

}  // namespace

void validate_density(const DensityMatrix& rho) {
  if (rho.mat.rows() != rho.mat.cols())
    throw DimensionError("density matrix is not square");
  if (product(rho.dims) != rho.mat.rows())
    throw DimensionError("subsystem dimensions do not multiply to matrix size");
  if (!rho.mat.allFinite())
    throw std::runtime_error("density matrix has non-finite entries");
  double herm = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermTol)
    throw std::runtime_error("density matrix not Hermitian: deviation " +
                             std::to_string(herm));
  double tr = std::abs(rho.mat.trace() - Complex(1.0, 0.0));
  if (tr > kTraceTol)
    throw std::runtime_error("density matrix trace off by " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(
      (rho.mat + rho.mat.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::runtime_error("density matrix not PSD: min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix make_density(CMatrix mat, std::vector<Index> dims) {
  DensityMatrix rho{std::move(mat), std::move(dims)};
  validate_density(rho);
  return rho;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::size_t>& keep) {
  const auto& dims = rho.dims;
  if (keep.empty()) throw DimensionError("partial_trace: empty keep set");
  for (std::size_t k : keep)
    if (k >= dims.size()) throw DimensionError("partial_trace: bad position");
  std::vector<std::size_t> keep_sorted(keep);
  std::sort(keep_sorted.begin(), keep_sorted.end());
  if (std::adjacent_find(keep_sorted.begin(), keep_sorted.end()) !=
      keep_sorted.end())
    throw DimensionError("partial_trace: duplicate position");

  std::vector<std::size_t> traced;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), i))
      traced.push_back(i);

  // Strides of each subsystem in the flattened index (leftmost most
  // significant).
  std::vector<Index> stride(dims.size());
  Index s = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    stride[i] = s;
    s *= dims[i];
  }

  std::vector<Index> keep_dims, traced_dims;
  for (std::size_t k : keep_sorted) keep_dims.push_back(dims[k]);
  for (std::size_t t : traced) traced_dims.push_back(dims[t]);
  Index dk = product(keep_dims);
  Index dt = product(traced_dims);

  auto embed = [&](Index packed, const std::vector<std::size_t>& subs) {
    Index full = 0;
    for (std::size_t i = subs.size(); i-- > 0;) {
      Index d = dims[subs[i]];
      full += (packed % d) * stride[subs[i]];
      packed /= d;
    }
    return full;
  };

  CMatrix out = CMatrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r) {
    Index base_r = embed(r, keep_sorted);
    for (Index c = 0; c < dk; ++c) {
      Index base_c = embed(c, keep_sorted);
      Complex acc = 0.0;
      for (Index t = 0; t < dt; ++t) {
        Index off = embed(t, traced);
        acc += rho.mat(base_r + off, base_c + off);
      }
      out(r, c) = acc;
    }
  }
  return DensityMatrix{std::move(out), std::move(keep_dims)};
}

double vn_entropy(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((rho + rho.adjoint()) / 2.0,
                                            Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    double p = std::clamp(es.eigenvalues()(i), 0.0, 1.0);
    if (p > 1e-12) s -= p * std::log2(p);
  }
  return s;
}

double vn_entropy(const DensityMatrix& rho) { return vn_entropy(rho.mat); }

CMatrix ladder(Index n) {
  if (n < 2) throw DimensionError("ladder: cutoff must be >= 2");
  CMatrix a = CMatrix::Zero(n, n);
  for (Index m = 1; m < n; ++m) a(m - 1, m) = std::sqrt(double(m));
  return a;
}

bool cutoff_admits(double abs_delta, Index n) {
  // Captured weight of |delta> within the first n levels, evaluated as a
  // Poisson(|delta|^2) CDF in stable recursive form.
  double lam = abs_delta * abs_delta;
  if (lam == 0.0) return true;
  double logterm = -lam;  // log of the n=0 term
  double sum = std::exp(logterm);
  for (Index k = 1; k < n; ++k) {
    logterm += std::log(lam / double(k));
    sum += std::exp(logterm);
  }
  return sum >= 1.0 - 1e-10;
}

Index required_cutoff(double abs_delta, Index start, Index cap) {
  Index n = std::max<Index>(start, 2);
  while (n <= cap) {
    if (cutoff_admits(abs_delta, n)) return n;
    n *= 2;
  }
  throw TruncationError(
      "amplitude " + std::to_string(abs_delta) +
          " is not admissible at any cutoff up to " + std::to_string(cap),
      n);
}

CMatrix displacement_matrix(Complex delta, Index n) {
  if (!cutoff_admits(std::abs(delta), n)) {
    Index suggested = n;
    try {
      suggested = required_cutoff(std::abs(delta), n, 512);
    } catch (const TruncationError& e) {
      suggested = e.suggested_cutoff;
    }
    throw TruncationError("displacement amplitude " +
                              std::to_string(std::abs(delta)) +
                              " inadmissible at cutoff " + std::to_string(n),
                          suggested);
  }
  // delta a^dag - conj(delta) a is anti-Hermitian; exponentiate through the
  // Hermitian generator H = -i K.
  CMatrix a = ladder(n);
  CMatrix k = delta * a.adjoint() - std::conj(delta) * a;
  CMatrix h = Complex(0.0, -1.0) * k;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(n);
  for (Index i = 0; i < n; ++i)
    phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

CVector coherent_state_vector(Complex delta, Index n) {
  if (!cutoff_admits(std::abs(delta), n))
    throw TruncationError("coherent amplitude " +
                              std::to_string(std::abs(delta)) +
                              " inadmissible at cutoff " + std::to_string(n),
                          required_cutoff(std::abs(delta), n, 512));
  CVector v(n);
  // c_n = exp(-|d|^2/2) d^n / sqrt(n!), built recursively.
  Complex c = std::exp(-0.5 * std::norm(delta));
  v(0) = c;
  for (Index m = 1; m < n; ++m) {
    c *= delta / std::sqrt(double(m));
    v(m) = c;
  }
  return v / v.norm();
}

}  // namespace udw
