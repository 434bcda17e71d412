#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nhspec/model.hpp"

namespace nhspec {

enum class SpectrumSource { ClosedForm, Oracle, Transcendental };

/// Eigenvalue multiset in canonical order: ascending by real part, ties by
/// imaginary part. The ordering makes serialized spectra diff-stable.
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  SpectrumSource source = SpectrumSource::Oracle;
};

void canonical_sort(std::vector<std::complex<double>>& values);

/// Largest matched-pair separation between two equally sized eigenvalue
/// multisets. Both lists are canonically sorted, then paired greedily by
/// nearest unused partner; plain sorted elementwise comparison is unstable
/// when conjugate partners carry opposite-sign rounding noise in Re.
double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b);
double multiset_distance(const Spectrum& a, const Spectrum& b);

struct RingMode {
  int n;                        // momentum label, 1..N
  double k;                     // k_n
  std::complex<double> energy;  // dispersion value at k_n
};

/// Closed-form ring levels in momentum order n = 1..N:
///   asymmetric ring      E_n = 2 g (cos k cosh phi + i sin k sinh phi),
///   Hermitian flux ring  E_n = 2 kappa cos(k + flux),
/// with k = 2 pi n / N. Requires N >= 3; the N = 2 ring collapses its
/// corner and bulk bonds into one and has no clean momentum form.
std::vector<RingMode> ring_modes_closed_form(const ModelSpec& spec);
Spectrum ring_spectrum_closed_form(const ModelSpec& spec);

/// Open-chain levels E_n = 2 g cos(n pi / (N+1)), n = 1..N. Real and
/// independent of phi.
std::vector<RingMode> open_chain_modes_closed_form(const ModelSpec& spec);
Spectrum open_chain_spectrum_closed_form(const ModelSpec& spec);

/// Analytic eigenbasis of the open chain. Columns of `right` hold the raw
/// amplitudes f_j = e^{-phi j} sin(k_n j), columns of `left` the partner
/// amplitudes e^{+phi j} sin(k_n j); dirac_norms carries Omega_n and
/// biorth_norms Lambda_n = sum_j |left_j right_j|. Sums accumulate from the
/// large-amplitude end and amplitudes below 1e-300 are flushed to zero.
/// Refuses |phi| N > 700 where the left amplitudes overflow.
struct ModeSet {
  int size = 0;
  double g = 0.0;
  double phi = 0.0;
  std::vector<double> momenta;       // k_n, index i holds n = i+1
  std::vector<double> energies;      // 2 g cos k_n
  std::vector<double> dirac_norms;   // Omega_n
  std::vector<double> biorth_norms;  // Lambda_n
  Eigen::MatrixXd right;             // column i = mode n = i+1
  Eigen::MatrixXd left;
};

ModeSet open_chain_eigenpairs(const ModelSpec& spec);

/// Raw right amplitudes of one chain mode (n is 1-based); same flushing
/// rules as open_chain_eigenpairs but safe at any phi N since only the
/// decaying exponential appears.
Eigen::VectorXd open_chain_right_mode(int size, double phi, int n);

/// Biorthogonal overlap matrix <psi_m^L | psi_n^R>; identity up to rounding.
Eigen::MatrixXd biorthogonal_gram(const ModeSet& modes);

class EigensolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension cap of the dense solver; desk scale is far below this.
inline constexpr int kDenseDimCap = 2048;

struct EigenSystem {
  Spectrum spectrum;
  Eigen::MatrixXcd vectors;  // column i pairs with spectrum.eigenvalues[i]
};

/// General dense complex eigensolver used as the numeric oracle.
///
/// Schur iteration (via Eigen) on a balanced copy of the matrix; balancing
/// matters because corner entries e^{+-N phi} can span many orders of
/// magnitude. Eigenvalues are polished with a two-sided Rayleigh quotient
/// in extended precision so that downstream momentum inversion is limited
/// only by their double representation. Throws EigensolveError on
/// non-convergence, oversized or non-finite input; eigenvector residuals
/// are verified against 1e-10 * ||H||_inf.
Spectrum dense_eigensolve(const Eigen::MatrixXcd& h);
EigenSystem dense_eigensolve_full(const Eigen::MatrixXcd& h);

/// Residual of the defect-ring momentum equation,
///   R(k) = sin[k(1+N)] + J^2 sin[k(1-N)] - 2 J cosh(phi N) sin k,
/// zero exactly at the ring momenta. Evaluated in extended precision.
std::complex<double> transcendental_residual(std::complex<double> k,
                                             double defect, double phi,
                                             int size);

/// Newton iteration on R(k) from a seed near a root, to |R| < 1e-12.
/// Throws on a vanishing derivative (|R'| < 1e-14, near-degenerate root)
/// or when 100 iterations do not converge.
std::complex<double> refine_momentum(std::complex<double> seed, double defect,
                                     double phi, int size);

/// Branch-corrected inversion of E = 2 g cos k. Candidates +-acos(E/2g)
/// shifted by 2 pi are restricted to Re k in (0, 2 pi] and ranked by |R(k)|,
/// ties by smaller |Im k|.
std::complex<double> momentum_from_energy(std::complex<double> energy,
                                          double g, double defect, double phi,
                                          int size);

/// |R| at the branch-corrected momentum of `energy`, with the inversion and
/// the residual kept in extended precision throughout. This is the
/// round-trip figure of merit for oracle eigenvalues; materialising k as a
/// double first would already cost ~|R'| * ulp(k).
double inversion_residual(std::complex<double> energy, double g, double defect,
                          double phi, int size);

}  // namespace nhspec
