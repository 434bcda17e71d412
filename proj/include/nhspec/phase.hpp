#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhspec/model.hpp"
#include "nhspec/spectral.hpp"

namespace nhspec {

/// Real-vs-complex classification of one spectrum at a given imaginary-part
/// tolerance. For real-parameter lattices n_complex is even (conjugate
/// pairs).
struct PhaseClassification {
  int n_complex = 0;
  double degree = 0.0;  // n_complex / N
  bool entirely_real = true;
  double tol_imag = 0.0;
};

/// Default split between eigensolver noise and genuine imaginary parts:
/// 1e-9 * max(1, ||H||_inf).
double default_imag_tolerance(const Eigen::MatrixXcd& h);

PhaseClassification classify_spectrum(const Spectrum& spectrum,
                                      double tol_imag);

/// Asymptotic complex-level test for level n of the defect ring:
///   sinh^2(phi N) > (1 - J^2)^2 / (4 J^2 sin^2(2 n pi / N)).
/// The levels n = N (and n = N/2 for even N) fall outside this reduction
/// and are refused, as is J = 0.
bool complex_level_condition(int level, double defect, double phi, int size);

/// The four transition couplings { +-e^{+-phi N} }, ascending. Exact for
/// size a multiple of 4, where a level sits at 2 n pi / N = pi / 2; other
/// sizes are refused rather than extrapolated. phi = 0 degenerates to
/// {-1, -1, 1, 1}.
std::array<double, 4> critical_couplings(double phi, int size);

struct PhaseCell {
  double defect = 0.0;
  double phi = 0.0;
  PhaseClassification classification;
  bool valid = false;
};

struct PhaseDiagram {
  int size = 0;
  double coupling_product = 1.0;  // alpha * beta, fixed across the sweep
  std::vector<double> j_axis;
  std::vector<double> phi_axis;
  std::vector<PhaseCell> cells;  // row-major, index = phi_index * |J| + j_index
  std::vector<std::vector<double>> boundaries;  // bisected J per phi row
  std::vector<std::string> cell_errors;  // coordinates + reason per failure

  const PhaseCell& at(std::size_t phi_index, std::size_t j_index) const {
    return cells[phi_index * j_axis.size() + j_index];
  }
};

struct SweepOptions {
  std::optional<double> tol_imag;  // empty: per-matrix default
  int workers = 1;
  bool locate_boundaries = true;
  double boundary_tol = 1e-4;  // |dJ| bisection stop
};

/// Classifies the defect ring over a (J, phi) grid at fixed alpha * beta.
/// Cells are independent pure computations; evaluation order (and worker
/// count) never changes the result. Cells whose eigensolve fails are marked
/// invalid, recorded in cell_errors and skipped by boundary location.
PhaseDiagram phase_diagram_sweep(int size, double coupling_product,
                                 std::vector<double> j_grid,
                                 std::vector<double> phi_grid,
                                 const SweepOptions& options = {});

/// Bisects a real <-> complex transition bracketed by [j_lo, j_hi] down to
/// |dJ| < j_tol. Both endpoints classifying the same way is an error.
double boundary_bisect(int size, double phi, double j_lo, double j_hi,
                       std::optional<double> tol_imag, double j_tol,
                       double coupling_product = 1.0);

/// (J, degree of complex levels) along one phi row. Plateaus are reported
/// raw; they stem from the finite size and smoothing would mask them.
std::vector<std::pair<double, double>> degree_curve(
    int size, double phi, const std::vector<double>& j_grid,
    std::optional<double> tol_imag = std::nullopt,
    double coupling_product = 1.0);

}  // namespace nhspec
