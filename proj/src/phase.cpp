#include "nhspec/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nhspec/parallel.hpp"

namespace nhspec {

namespace {

ModelSpec defect_spec(int size, double coupling_product, double phi,
                      double defect) {
  const double g = std::sqrt(coupling_product);
  return ModelSpec::defect_ring(size, g * std::exp(phi), g * std::exp(-phi),
                                defect);
}

PhaseClassification classify_defect_cell(int size, double coupling_product,
                                         double phi, double defect,
                                         std::optional<double> tol_imag) {
  const Eigen::MatrixXcd h =
      build_hamiltonian(defect_spec(size, coupling_product, phi, defect));
  const double tol = tol_imag.value_or(default_imag_tolerance(h));
  return classify_spectrum(dense_eigensolve(h), tol);
}

void require_monotone_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) {
    throw std::invalid_argument(std::string(name) + " grid must be nonempty");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] >= grid[i - 1])) {
      throw std::invalid_argument(std::string(name) +
                                  " grid must be monotone nondecreasing");
    }
  }
}

}  // namespace

double default_imag_tolerance(const Eigen::MatrixXcd& h) {
  const double inf_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
  return 1e-9 * std::max(1.0, inf_norm);
}

PhaseClassification classify_spectrum(const Spectrum& spectrum,
                                      double tol_imag) {
  if (spectrum.eigenvalues.empty()) {
    throw std::invalid_argument("cannot classify an empty spectrum");
  }
  if (!(tol_imag > 0.0)) {
    throw std::invalid_argument("imaginary-part tolerance must be positive");
  }
  PhaseClassification result;
  result.tol_imag = tol_imag;
  for (const auto& value : spectrum.eigenvalues) {
    if (std::abs(value.imag()) > tol_imag) ++result.n_complex;
  }
  result.degree =
      static_cast<double>(result.n_complex) / spectrum.eigenvalues.size();
  result.entirely_real = result.n_complex == 0;
  return result;
}

bool complex_level_condition(int level, double defect, double phi, int size) {
  if (size < 2) throw std::invalid_argument("size must be at least 2");
  if (level < 1 || level > size) {
    throw std::invalid_argument("level must lie in [1, N]");
  }
  if (level == size || (size % 2 == 0 && level == size / 2)) {
    throw std::invalid_argument(
        "levels n = N and n = N/2 fall outside the asymptotic reduction");
  }
  if (defect == 0.0) {
    throw std::invalid_argument("J = 0 opens the ring; condition undefined");
  }
  const double s = std::sin(2.0 * std::numbers::pi * level / size);
  const double sinh_flux = std::sinh(phi * size);
  const double one_minus_j2 = 1.0 - defect * defect;
  return sinh_flux * sinh_flux >
         (one_minus_j2 * one_minus_j2) / (4.0 * defect * defect * s * s);
}

std::array<double, 4> critical_couplings(double phi, int size) {
  if (size < 4 || size % 4 != 0) {
    throw std::invalid_argument(
        "critical couplings are derived for N a multiple of 4; refusing " +
        std::to_string(size));
  }
  const double outer = std::exp(phi * size);
  const double inner = std::exp(-phi * size);
  std::array<double, 4> couplings{outer, inner, -inner, -outer};
  std::sort(couplings.begin(), couplings.end());
  return couplings;
}

PhaseDiagram phase_diagram_sweep(int size, double coupling_product,
                                 std::vector<double> j_grid,
                                 std::vector<double> phi_grid,
                                 const SweepOptions& options) {
  require_monotone_grid(j_grid, "J");
  require_monotone_grid(phi_grid, "phi");
  if (!(coupling_product > 0.0)) {
    throw std::invalid_argument("alpha * beta must be positive");
  }
  if (options.workers < 1) {
    throw std::invalid_argument("worker count must be at least 1");
  }

  PhaseDiagram diagram;
  diagram.size = size;
  diagram.coupling_product = coupling_product;
  diagram.j_axis = std::move(j_grid);
  diagram.phi_axis = std::move(phi_grid);
  const std::size_t n_j = diagram.j_axis.size();
  const std::size_t n_cells = n_j * diagram.phi_axis.size();
  diagram.cells.resize(n_cells);

  run_indexed(n_cells, options.workers, [&](std::size_t index) {
    const std::size_t phi_index = index / n_j;
    const std::size_t j_index = index % n_j;
    PhaseCell& cell = diagram.cells[index];
    cell.phi = diagram.phi_axis[phi_index];
    cell.defect = diagram.j_axis[j_index];
    try {
      cell.classification = classify_defect_cell(
          size, coupling_product, cell.phi, cell.defect, options.tol_imag);
      cell.valid = true;
    } catch (const std::exception&) {
      cell.valid = false;
    }
  });

  // Failure messages are collected after the parallel phase so their order
  // is the grid order, not the completion order.
  for (std::size_t index = 0; index < n_cells; ++index) {
    const PhaseCell& cell = diagram.cells[index];
    if (cell.valid) continue;
    std::ostringstream message;
    message << "cell (J=" << cell.defect << ", phi=" << cell.phi << ")";
    try {
      classify_defect_cell(size, coupling_product, cell.phi, cell.defect,
                           options.tol_imag);
      message << ": transient failure";
    } catch (const std::exception& error) {
      message << ": " << error.what();
    }
    diagram.cell_errors.push_back(message.str());
  }

  diagram.boundaries.resize(diagram.phi_axis.size());
  if (options.locate_boundaries && n_j >= 2) {
    for (std::size_t p = 0; p < diagram.phi_axis.size(); ++p) {
      for (std::size_t j = 0; j + 1 < n_j; ++j) {
        const PhaseCell& lo = diagram.at(p, j);
        const PhaseCell& hi = diagram.at(p, j + 1);
        if (!lo.valid || !hi.valid) continue;
        if (lo.classification.entirely_real ==
            hi.classification.entirely_real) {
          continue;
        }
        diagram.boundaries[p].push_back(
            boundary_bisect(size, diagram.phi_axis[p], lo.defect, hi.defect,
                            options.tol_imag, options.boundary_tol,
                            coupling_product));
      }
    }
  }
  return diagram;
}

double boundary_bisect(int size, double phi, double j_lo, double j_hi,
                       std::optional<double> tol_imag, double j_tol,
                       double coupling_product) {
  if (!(j_tol > 0.0)) {
    throw std::invalid_argument("bisection tolerance must be positive");
  }
  bool lo_real =
      classify_defect_cell(size, coupling_product, phi, j_lo, tol_imag)
          .entirely_real;
  const bool hi_real =
      classify_defect_cell(size, coupling_product, phi, j_hi, tol_imag)
          .entirely_real;
  if (lo_real == hi_real) {
    throw std::invalid_argument(
        "invalid bracket: both endpoints classify as " +
        std::string(lo_real ? "entirely real" : "complex"));
  }
  while (std::abs(j_hi - j_lo) > j_tol) {
    const double mid = 0.5 * (j_lo + j_hi);
    const bool mid_real =
        classify_defect_cell(size, coupling_product, phi, mid, tol_imag)
            .entirely_real;
    if (mid_real == lo_real) {
      j_lo = mid;
    } else {
      j_hi = mid;
    }
  }
  return 0.5 * (j_lo + j_hi);
}

std::vector<std::pair<double, double>> degree_curve(
    int size, double phi, const std::vector<double>& j_grid,
    std::optional<double> tol_imag, double coupling_product) {
  require_monotone_grid(j_grid, "J");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(j_grid.size());
  for (const double defect : j_grid) {
    curve.emplace_back(
        defect,
        classify_defect_cell(size, coupling_product, phi, defect, tol_imag)
            .degree);
  }
  return curve;
}

}  // namespace nhspec
