#include "nhspec/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nhspec {

namespace {

constexpr double kCornerExponentCap = 700.0;  // e^x overflows just above 709

void validate_common(int size, double alpha, double beta) {
  if (size < 2) {
    throw std::invalid_argument("lattice size must be at least 2, got " +
                                std::to_string(size));
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("couplings alpha, beta must be positive");
  }
  const double g = std::sqrt(alpha * beta);
  const double phi = 0.5 * std::log(alpha / beta);
  if (!std::isfinite(g) || !std::isfinite(phi)) {
    throw std::invalid_argument("derived g, phi must be finite");
  }
}

}  // namespace

ModelSpec ModelSpec::hermitian_flux_ring(int size, double kappa, double flux) {
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("ring coupling kappa must be positive");
  }
  if (!std::isfinite(flux)) {
    throw std::invalid_argument("flux must be finite");
  }
  // alpha = beta = kappa keeps the shared invariants intact and makes the
  // derived gauge parameters (g = kappa, phi = 0) consistent.
  validate_common(size, kappa, kappa);
  ModelSpec spec;
  spec.variant = Variant::HermitianFluxRing;
  spec.size = size;
  spec.alpha = kappa;
  spec.beta = kappa;
  spec.kappa = kappa;
  spec.flux = flux;
  return spec;
}

ModelSpec ModelSpec::asymmetric_ring(int size, double alpha, double beta) {
  validate_common(size, alpha, beta);
  ModelSpec spec;
  spec.variant = Variant::AsymmetricRing;
  spec.size = size;
  spec.alpha = alpha;
  spec.beta = beta;
  return spec;
}

ModelSpec ModelSpec::open_chain(int size, double alpha, double beta) {
  validate_common(size, alpha, beta);
  ModelSpec spec;
  spec.variant = Variant::OpenChain;
  spec.size = size;
  spec.alpha = alpha;
  spec.beta = beta;
  return spec;
}

ModelSpec ModelSpec::defect_ring(int size, double alpha, double beta,
                                 double defect) {
  validate_common(size, alpha, beta);
  if (!std::isfinite(defect)) {
    throw std::invalid_argument("defect scale J must be finite");
  }
  ModelSpec spec;
  spec.variant = Variant::DefectRing;
  spec.size = size;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.defect = defect;
  return spec;
}

DerivedParams ModelSpec::derived() const { return derived_params(*this); }

double ModelSpec::imaginary_flux() const {
  return static_cast<double>(size) * derived().phi;
}

DerivedParams derived_params(const ModelSpec& spec) {
  return {std::sqrt(spec.alpha * spec.beta),
          0.5 * std::log(spec.alpha / spec.beta)};
}

Eigen::MatrixXcd build_hamiltonian(const ModelSpec& spec) {
  const int n = spec.size;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);

  if (spec.variant == Variant::HermitianFluxRing) {
    const std::complex<double> forward =
        spec.kappa * std::exp(std::complex<double>(0.0, spec.flux));
    for (int j = 0; j < n; ++j) {
      const int next = (j + 1) % n;
      h(j, next) += forward;
      h(next, j) += std::conj(forward);
    }
    return h;
  }

  const int bulk_bonds = n - 1;
  for (int j = 0; j < bulk_bonds; ++j) {
    h(j, j + 1) += spec.alpha;
    h(j + 1, j) += spec.beta;
  }
  switch (spec.variant) {
    case Variant::OpenChain:
      break;
    case Variant::AsymmetricRing:
      h(n - 1, 0) += spec.alpha;
      h(0, n - 1) += spec.beta;
      break;
    case Variant::DefectRing:
      h(n - 1, 0) += spec.defect * spec.alpha;
      h(0, n - 1) += spec.defect * spec.beta;
      break;
    case Variant::HermitianFluxRing:
      break;  // handled above
  }
  return h;
}

Eigen::MatrixXcd gauge_transform_to_corner(const ModelSpec& spec) {
  if (spec.variant != Variant::AsymmetricRing &&
      spec.variant != Variant::DefectRing) {
    throw std::invalid_argument(
        "corner form exists only for the asymmetric and defect rings");
  }
  const auto [g, phi] = derived_params(spec);
  const int n = spec.size;
  if (std::abs(phi) * n > kCornerExponentCap) {
    throw std::invalid_argument(
        "corner form refused: |phi| N = " + std::to_string(std::abs(phi) * n) +
        " would overflow e^{N phi}; use the untransformed Hamiltonian");
  }
  const double corner_scale =
      spec.variant == Variant::DefectRing ? spec.defect : 1.0;

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    h(j, j + 1) += g;
    h(j + 1, j) += g;
  }
  h(n - 1, 0) += corner_scale * g * std::exp(n * phi);
  h(0, n - 1) += corner_scale * g * std::exp(-n * phi);
  return h;
}

}  // namespace nhspec
