#pragma once

#include <Eigen/Dense>

namespace nhspec {

/// The four lattice variants handled by the toolkit.
///
/// All of them are one-dimensional nearest-neighbour tight-binding systems
/// with N sites. The ring variants close periodically through the corner
/// bond between site N and site 1; the open chain leaves that bond out.
enum class Variant {
  HermitianFluxRing,  // uniform ring, coupling kappa, real Peierls phase
  AsymmetricRing,     // uniform ring, forward alpha / backward beta
  OpenChain,          // asymmetric couplings, no corner bond
  DefectRing,         // asymmetric ring with the corner bond rescaled by J
};

/// Gauge parameters derived from (alpha, beta):
///   g   = sqrt(alpha * beta)      symmetric coupling scale
///   phi = ln sqrt(alpha / beta)   imaginary gauge exponent per bond
/// so that alpha = g e^{phi} and beta = g e^{-phi}.
struct DerivedParams {
  double g;
  double phi;
};

struct ModelSpec {
  Variant variant = Variant::OpenChain;
  int size = 0;          // N, number of sites
  double alpha = 1.0;    // forward coupling (site j -> j+1 amplitude on row j)
  double beta = 1.0;     // backward coupling
  double kappa = 1.0;    // coupling of the Hermitian flux ring
  double flux = 0.0;     // real Peierls phase per bond (flux ring only)
  double defect = 1.0;   // corner-bond scale J (defect ring only)

  static ModelSpec hermitian_flux_ring(int size, double kappa, double flux);
  static ModelSpec asymmetric_ring(int size, double alpha, double beta);
  static ModelSpec open_chain(int size, double alpha, double beta);
  static ModelSpec defect_ring(int size, double alpha, double beta,
                               double defect);

  DerivedParams derived() const;

  /// Magnitude N*phi of the imaginary flux accumulated around the ring.
  /// Derived report quantity only; never an input parameter.
  double imaginary_flux() const;
};

DerivedParams derived_params(const ModelSpec& spec);

/// Dense N x N coupling matrix of a spec.
///
/// Index convention, used throughout the project: the entry (r, c) multiplies
/// the amplitude on site c and feeds site r. Site j of the physics maps to
/// row/column j-1. Hence H(j, j+1) carries the alpha-side coupling and
/// H(j+1, j) the beta side; ring variants additionally fill the corners
/// (N, 1) and (1, N). For N = 2 rings the corner bond and the bulk bond
/// connect the same pair of sites and their amplitudes are summed into
/// single entries.
Eigen::MatrixXcd build_hamiltonian(const ModelSpec& spec);

/// Similarity transform b_j = e^{j phi} a_j applied to a ring variant:
/// uniform symmetric bulk couplings g with corner entries
/// g J e^{N phi} at (N, 1) and g J e^{-N phi} at (1, N), J = 1 for the
/// plain asymmetric ring. The spectrum is unchanged. Refuses the open
/// chain (nothing to transform) and the Hermitian flux ring, and refuses
/// |phi| N > 700 where e^{N phi} leaves double range.
Eigen::MatrixXcd gauge_transform_to_corner(const ModelSpec& spec);

}  // namespace nhspec
