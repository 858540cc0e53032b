#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace udw {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// Thrown when a displacement amplitude does not fit a Fock cutoff; carries
// the smallest power-of-two-doubled cutoff that would.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& msg, Index suggested)
      : std::runtime_error(msg), suggested_cutoff(suggested) {}
  Index suggested_cutoff;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Square complex matrix with an ordered list of subsystem dimensions.
// Leftmost subsystem is the most significant index (kron convention).
struct DensityMatrix {
  CMatrix mat;
  std::vector<Index> dims;

  Index dim() const { return mat.rows(); }
};

// Validation tolerances for DensityMatrix invariants.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-8;
inline constexpr double kPsdTol = 1e-9;

// Checks Hermiticity (1e-10 elementwise), unit trace (1e-8) and
// positive semidefiniteness (eigenvalues >= -1e-9); throws on violation.
void validate_density(const DensityMatrix& rho);

DensityMatrix make_density(CMatrix mat, std::vector<Index> dims);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Reduced state on `keep` (0-based positions into rho.dims, ascending
// output order preserved).
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::size_t>& keep);

// Von Neumann entropy in bits. Symmetrizes, clamps eigenvalues to [0,1],
// drops those below 1e-12.
double vn_entropy(const DensityMatrix& rho);
double vn_entropy(const CMatrix& rho);

// Annihilation operator on the truncated space |0>..|N-1>.
CMatrix ladder(Index n);

// Norm-capture admissibility of amplitude |delta| at cutoff N:
// exp(-|d|^2) sum_{n<N} |d|^{2n}/n! >= 1 - 1e-10.
bool cutoff_admits(double abs_delta, Index n);

// Smallest admissible cutoff obtained by doubling from `start` (cap 512).
// Throws TruncationError if the cap is insufficient.
Index required_cutoff(double abs_delta, Index start = 64, Index cap = 512);

// exp(delta a^dag - conj(delta) a) on the truncated space.
// Throws TruncationError when the amplitude is inadmissible at N.
CMatrix displacement_matrix(Complex delta, Index n);

// Fock coefficients of |delta>, renormalized to unit norm after truncation.
CVector coherent_state_vector(Complex delta, Index n);

}  // namespace udw
