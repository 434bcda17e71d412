#include "nhspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace nhspec {

namespace {

using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;
using MatrixXcl =
    Eigen::Matrix<ComplexL, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kAmplitudeFloor = 1e-300;
constexpr double kLeftOverflowCap = 700.0;

bool canonical_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

ComplexL residual_ext(ComplexL k, long double defect, long double phi,
                      int size) {
  const long double np1 = size + 1;
  const long double nm1 = 1 - static_cast<long double>(size);
  return std::sin(k * np1) + defect * defect * std::sin(k * nm1) -
         2.0L * defect * std::cosh(phi * size) * std::sin(k);
}

ComplexL residual_derivative_ext(ComplexL k, long double defect,
                                 long double phi, int size) {
  const long double np1 = size + 1;
  const long double nm1 = 1 - static_cast<long double>(size);
  return np1 * std::cos(k * np1) + defect * defect * nm1 * std::cos(k * nm1) -
         2.0L * defect * std::cosh(phi * size) * std::cos(k);
}

/// Candidate momenta for E = 2 g cos k, Re k normalised into (0, 2 pi].
std::vector<ComplexL> inversion_candidates(ComplexL z) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const ComplexL principal = std::acos(z);  // Re in [0, pi]
  std::vector<ComplexL> candidates;
  for (const ComplexL base : {principal, -principal}) {
    for (int shift = -1; shift <= 1; ++shift) {
      const ComplexL k = base + two_pi * static_cast<long double>(shift);
      if (k.real() > 0.0L && k.real() <= two_pi + 1e-12L) {
        candidates.push_back(k);
      }
    }
  }
  if (candidates.empty()) candidates = {principal, -principal};
  return candidates;
}

ComplexL best_momentum_ext(ComplexL energy, long double g, long double defect,
                           long double phi, int size) {
  const ComplexL z = energy / (2.0L * g);
  ComplexL best;
  long double best_resid = std::numeric_limits<long double>::infinity();
  long double best_imag = std::numeric_limits<long double>::infinity();
  for (const ComplexL k : inversion_candidates(z)) {
    const long double r = std::abs(residual_ext(k, defect, phi, size));
    const long double im = std::abs(k.imag());
    if (r < best_resid || (r == best_resid && im < best_imag)) {
      best = k;
      best_resid = r;
      best_imag = im;
    }
  }
  return best;
}

/// EISPACK-style two-sided balancing with power-of-two scales; returns the
/// per-index scale factors needed to map eigenvectors back.
Eigen::VectorXd balance_in_place(Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  constexpr double radix = 2.0;
  constexpr double radix_sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double col = 0.0;
      double row = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += std::abs(m(j, i));
        row += std::abs(m(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      const double before = col + row;
      double factor = 1.0;
      double threshold = row / radix;
      while (col < threshold) {
        factor *= radix;
        col *= radix_sq;
      }
      threshold = row * radix;
      while (col > threshold) {
        factor /= radix;
        col /= radix_sq;
      }
      if ((col + row) / factor < 0.95 * before) {
        done = false;
        scale[i] *= factor;
        m.row(i) *= 1.0 / factor;
        m.col(i) *= factor;
      }
    }
  }
  return scale;
}

/// Two-sided Rayleigh quotient w^H A v / w^H v in extended precision.
/// Skipped (returns the input) when the left/right pairing is nearly
/// orthogonal, as happens inside degenerate or defective clusters.
Complex polish_eigenvalue(const MatrixXcl& a_ext,
                          const Eigen::VectorXcd& right,
                          const Eigen::VectorXcd& left, Complex fallback) {
  const Eigen::Index n = right.size();
  Eigen::Vector<ComplexL, Eigen::Dynamic> v(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = ComplexL(right[i].real(), right[i].imag());
    w[i] = ComplexL(left[i].real(), left[i].imag());
  }
  ComplexL dot = 0;
  for (Eigen::Index i = 0; i < n; ++i) dot += std::conj(w[i]) * v[i];
  const long double wv = std::abs(dot);
  if (wv < 1e-3L * right.norm() * left.norm()) return fallback;
  const Eigen::Vector<ComplexL, Eigen::Dynamic> av = a_ext * v;
  ComplexL num = 0;
  for (Eigen::Index i = 0; i < n; ++i) num += std::conj(w[i]) * av[i];
  const ComplexL lambda = num / dot;
  return Complex(static_cast<double>(lambda.real()),
                 static_cast<double>(lambda.imag()));
}

// Polishing raises the eigenvalue accuracy to the double representation
// limit; beyond this size the extended-precision pass costs more than the
// stated tolerances need.
constexpr int kPolishDimCap = 256;

struct SolveResult {
  std::vector<Complex> values;
  Eigen::MatrixXcd vectors;
};

SolveResult solve_dense(const Eigen::MatrixXcd& h, bool want_vectors) {
  const Eigen::Index n = h.rows();
  if (n != h.cols()) throw EigensolveError("matrix must be square");
  if (n < 1) throw EigensolveError("matrix must be nonempty");
  if (n > kDenseDimCap) {
    throw EigensolveError("matrix dimension " + std::to_string(n) +
                          " exceeds dense solver cap " +
                          std::to_string(kDenseDimCap));
  }
  if (!h.allFinite()) throw EigensolveError("matrix has non-finite entries");

  Eigen::MatrixXcd balanced = h;
  const Eigen::VectorXd scale = balance_in_place(balanced);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(balanced, true);
  if (solver.info() != Eigen::Success) {
    throw EigensolveError("complex Schur iteration did not converge");
  }

  SolveResult result;
  result.values.assign(solver.eigenvalues().data(),
                       solver.eigenvalues().data() + n);

  if (n <= kPolishDimCap) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> adjoint_solver(
        balanced.adjoint(), true);
    if (adjoint_solver.info() == Eigen::Success) {
      MatrixXcl balanced_ext(n, n);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
          balanced_ext(r, c) =
              ComplexL(balanced(r, c).real(), balanced(r, c).imag());
      // Left eigenvectors belong to conj(lambda) of the adjoint problem;
      // pair them greedily by eigenvalue proximity.
      std::vector<bool> used(n, false);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Complex lambda = result.values[i];
        Eigen::Index match = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
          if (used[j]) continue;
          const double d =
              std::abs(std::conj(adjoint_solver.eigenvalues()[j]) - lambda);
          if (d < best) {
            best = d;
            match = j;
          }
        }
        if (match < 0) continue;
        used[match] = true;
        result.values[i] = polish_eigenvalue(
            balanced_ext, solver.eigenvectors().col(i),
            adjoint_solver.eigenvectors().col(match), lambda);
      }
    }
  }

  if (want_vectors) {
    result.vectors = solver.eigenvectors();
    const Eigen::VectorXcd unbalance = scale.cast<Complex>();
    for (Eigen::Index c = 0; c < n; ++c) {
      result.vectors.col(c) = result.vectors.col(c).cwiseProduct(unbalance);
      result.vectors.col(c).normalize();
    }
  }
  return result;
}

void check_residuals(const Eigen::MatrixXcd& h,
                     const std::vector<Complex>& values,
                     const Eigen::MatrixXcd& vectors) {
  const double h_norm =
      std::max(1e-300, h.cwiseAbs().rowwise().sum().maxCoeff());
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    const double residual =
        (h * vectors.col(i) - values[static_cast<std::size_t>(i)] *
         vectors.col(i)).norm();
    if (!(residual <= 1e-10 * h_norm)) {
      throw EigensolveError(
          "eigenpair residual " + std::to_string(residual) +
          " exceeds 1e-10 * ||H||_inf = " + std::to_string(1e-10 * h_norm));
    }
  }
}

}  // namespace

void canonical_sort(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), canonical_less);
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("multisets must have equal size");
  }
  canonical_sort(a);
  canonical_sort(b);
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& value : a) {
    std::size_t match = b.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(value - b[j]);
      if (d < best) {
        best = d;
        match = j;
      }
    }
    used[match] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

double multiset_distance(const Spectrum& a, const Spectrum& b) {
  return multiset_distance(a.eigenvalues, b.eigenvalues);
}

std::vector<RingMode> ring_modes_closed_form(const ModelSpec& spec) {
  if (spec.variant != Variant::AsymmetricRing &&
      spec.variant != Variant::HermitianFluxRing) {
    throw std::invalid_argument("closed ring form needs a ring variant");
  }
  if (spec.size < 3) {
    throw std::invalid_argument(
        "ring closed form needs N >= 3 (the N = 2 ring merges its bonds)");
  }
  const int n_sites = spec.size;
  const auto [g, phi] = derived_params(spec);
  std::vector<RingMode> modes;
  modes.reserve(n_sites);
  for (int n = 1; n <= n_sites; ++n) {
    const double k = 2.0 * std::numbers::pi * n / n_sites;
    Complex energy;
    if (spec.variant == Variant::AsymmetricRing) {
      energy = 2.0 * g *
               Complex(std::cos(k) * std::cosh(phi),
                       std::sin(k) * std::sinh(phi));
    } else {
      energy = Complex(2.0 * spec.kappa * std::cos(k + spec.flux), 0.0);
    }
    modes.push_back({n, k, energy});
  }
  return modes;
}

Spectrum ring_spectrum_closed_form(const ModelSpec& spec) {
  Spectrum spectrum;
  spectrum.source = SpectrumSource::ClosedForm;
  for (const RingMode& mode : ring_modes_closed_form(spec)) {
    spectrum.eigenvalues.push_back(mode.energy);
  }
  canonical_sort(spectrum.eigenvalues);
  return spectrum;
}

std::vector<RingMode> open_chain_modes_closed_form(const ModelSpec& spec) {
  if (spec.variant != Variant::OpenChain) {
    throw std::invalid_argument("open-chain closed form needs an open chain");
  }
  const auto [g, phi] = derived_params(spec);
  (void)phi;  // the open-chain spectrum is phi independent
  std::vector<RingMode> modes;
  modes.reserve(spec.size);
  for (int n = 1; n <= spec.size; ++n) {
    const double k = std::numbers::pi * n / (spec.size + 1);
    modes.push_back({n, k, Complex(2.0 * g * std::cos(k), 0.0)});
  }
  return modes;
}

Spectrum open_chain_spectrum_closed_form(const ModelSpec& spec) {
  Spectrum spectrum;
  spectrum.source = SpectrumSource::ClosedForm;
  for (const RingMode& mode : open_chain_modes_closed_form(spec)) {
    spectrum.eigenvalues.push_back(mode.energy);
  }
  canonical_sort(spectrum.eigenvalues);
  return spectrum;
}

Eigen::VectorXd open_chain_right_mode(int size, double phi, int n) {
  if (size < 2) throw std::invalid_argument("chain needs at least 2 sites");
  if (n < 1 || n > size) throw std::invalid_argument("mode index out of range");
  const double k = std::numbers::pi * n / (size + 1);
  Eigen::VectorXd f(size);
  for (int j = 1; j <= size; ++j) {
    double value = std::exp(-phi * j) * std::sin(k * j);
    if (std::abs(value) < kAmplitudeFloor) value = 0.0;
    f[j - 1] = value;
  }
  return f;
}

ModeSet open_chain_eigenpairs(const ModelSpec& spec) {
  if (spec.variant != Variant::OpenChain) {
    throw std::invalid_argument("eigenpairs are defined for the open chain");
  }
  const auto [g, phi] = derived_params(spec);
  const int n_sites = spec.size;
  if (std::abs(phi) * n_sites > kLeftOverflowCap) {
    throw std::invalid_argument(
        "left-state amplitudes e^{phi j} overflow for |phi| N > 700");
  }

  ModeSet modes;
  modes.size = n_sites;
  modes.g = g;
  modes.phi = phi;
  modes.momenta.resize(n_sites);
  modes.energies.resize(n_sites);
  modes.dirac_norms.resize(n_sites);
  modes.biorth_norms.resize(n_sites);
  modes.right.resize(n_sites, n_sites);
  modes.left.resize(n_sites, n_sites);

  for (int n = 1; n <= n_sites; ++n) {
    const double k = std::numbers::pi * n / (n_sites + 1);
    modes.momenta[n - 1] = k;
    modes.energies[n - 1] = 2.0 * g * std::cos(k);
    for (int j = 1; j <= n_sites; ++j) {
      const double envelope = std::exp(-phi * j);
      const double wave = std::sin(k * j);
      double right = envelope * wave;
      double left = wave / envelope;
      if (std::abs(right) < kAmplitudeFloor) right = 0.0;
      if (std::abs(left) < kAmplitudeFloor) left = 0.0;
      modes.right(j - 1, n - 1) = right;
      modes.left(j - 1, n - 1) = left;
    }
    // Descending-magnitude accumulation: small j dominates for phi > 0.
    double omega_sq = 0.0;
    double lambda = 0.0;
    if (phi >= 0.0) {
      for (int j = 0; j < n_sites; ++j) {
        omega_sq += modes.right(j, n - 1) * modes.right(j, n - 1);
        lambda += std::abs(modes.left(j, n - 1) * modes.right(j, n - 1));
      }
    } else {
      for (int j = n_sites - 1; j >= 0; --j) {
        omega_sq += modes.right(j, n - 1) * modes.right(j, n - 1);
        lambda += std::abs(modes.left(j, n - 1) * modes.right(j, n - 1));
      }
    }
    modes.dirac_norms[n - 1] = std::sqrt(omega_sq);
    modes.biorth_norms[n - 1] = lambda;
  }
  return modes;
}

Eigen::MatrixXd biorthogonal_gram(const ModeSet& modes) {
  const int n = modes.size;
  Eigen::MatrixXd gram(n, n);
  for (int m = 0; m < n; ++m) {
    const double left_prefactor = modes.dirac_norms[m] / modes.biorth_norms[m];
    for (int j = 0; j < n; ++j) {
      const double overlap = modes.left.col(m).dot(modes.right.col(j));
      gram(m, j) = left_prefactor * overlap / modes.dirac_norms[j];
    }
  }
  return gram;
}

Spectrum dense_eigensolve(const Eigen::MatrixXcd& h) {
  SolveResult solved = solve_dense(h, false);
  Spectrum spectrum;
  spectrum.source = SpectrumSource::Oracle;
  spectrum.eigenvalues = std::move(solved.values);
  canonical_sort(spectrum.eigenvalues);
  return spectrum;
}

EigenSystem dense_eigensolve_full(const Eigen::MatrixXcd& h) {
  SolveResult solved = solve_dense(h, true);
  const Eigen::Index n = h.rows();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return canonical_less(solved.values[a], solved.values[b]);
  });

  EigenSystem system;
  system.spectrum.source = SpectrumSource::Oracle;
  system.spectrum.eigenvalues.resize(n);
  system.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    system.spectrum.eigenvalues[i] = solved.values[order[i]];
    system.vectors.col(i) = solved.vectors.col(order[i]);
  }
  check_residuals(h, system.spectrum.eigenvalues, system.vectors);
  return system;
}

std::complex<double> transcendental_residual(std::complex<double> k,
                                             double defect, double phi,
                                             int size) {
  const ComplexL r = residual_ext(ComplexL(k.real(), k.imag()), defect, phi,
                                  size);
  return Complex(static_cast<double>(r.real()),
                 static_cast<double>(r.imag()));
}

std::complex<double> refine_momentum(std::complex<double> seed, double defect,
                                     double phi, int size) {
  ComplexL k(seed.real(), seed.imag());
  const long double defect_l = defect;
  for (int iteration = 0; iteration < 100; ++iteration) {
    const ComplexL r = residual_ext(k, defect, phi, size);
    // For |Im k| (N+1) beyond ~30 log units the residual terms grow to
    // e^{|Im k|(N+1)} and their rounding floor rises above 1e-12; accept
    // convergence once |R| sinks under that evaluation-noise envelope.
    const long double term_scale =
        std::abs(std::sin(k * static_cast<long double>(size + 1))) +
        defect_l * defect_l *
            std::abs(std::sin(k * static_cast<long double>(1 - size))) +
        2.0L * std::abs(defect_l) * std::cosh(phi * size) * std::abs(std::sin(k));
    const long double tolerance =
        std::max(1e-12L,
                 64.0L * std::numeric_limits<long double>::epsilon() *
                     term_scale);
    if (std::abs(r) < tolerance) {
      return Complex(static_cast<double>(k.real()),
                     static_cast<double>(k.imag()));
    }
    const ComplexL dr = residual_derivative_ext(k, defect, phi, size);
    if (std::abs(dr) < 1e-14L) {
      throw std::runtime_error(
          "momentum refinement stalled: |R'| < 1e-14 near a degenerate root");
    }
    k -= r / dr;
  }
  throw std::runtime_error(
      "momentum refinement did not converge within 100 iterations");
}

std::complex<double> momentum_from_energy(std::complex<double> energy,
                                          double g, double defect, double phi,
                                          int size) {
  const ComplexL k = best_momentum_ext(ComplexL(energy.real(), energy.imag()),
                                       g, defect, phi, size);
  return Complex(static_cast<double>(k.real()),
                 static_cast<double>(k.imag()));
}

double inversion_residual(std::complex<double> energy, double g, double defect,
                          double phi, int size) {
  const ComplexL k = best_momentum_ext(ComplexL(energy.real(), energy.imag()),
                                       g, defect, phi, size);
  return static_cast<double>(std::abs(residual_ext(k, defect, phi, size)));
}

}  // namespace nhspec
