#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhspec/model.hpp"
#include "nhspec/spectral.hpp"

using namespace nhspec;

namespace {
constexpr double kLn105 = 0.04879016416943205;
constexpr double kPi = std::numbers::pi;

double max_imag(const Spectrum& s) {
  double worst = 0.0;
  for (const auto& value : s.eigenvalues) {
    worst = std::max(worst, std::abs(value.imag()));
  }
  return worst;
}
}  // namespace

TEST_CASE("2x2 dense solve reproduces the analytic pair") {
  Eigen::MatrixXcd h(2, 2);
  h << 0, 4, 1, 0;
  const Spectrum s = dense_eigensolve(h);
  REQUIRE(s.eigenvalues.size() == 2);
  CHECK(std::abs(s.eigenvalues[0] - std::complex<double>(-2.0)) < 1e-12);
  CHECK(std::abs(s.eigenvalues[1] - std::complex<double>(2.0)) < 1e-12);
}

TEST_CASE("asymmetric ring N=4, alpha=4, beta=1: {5, -5, 3i, -3i}") {
  const ModelSpec spec = ModelSpec::asymmetric_ring(4, 4.0, 1.0);
  const Spectrum closed = ring_spectrum_closed_form(spec);
  const std::vector<std::complex<double>> expected = {
      {5.0, 0.0}, {-5.0, 0.0}, {0.0, 3.0}, {0.0, -3.0}};
  CHECK(multiset_distance(closed.eigenvalues, expected) < 1e-12);
  CHECK(multiset_distance(closed,
                          dense_eigensolve(build_hamiltonian(spec))) < 1e-10);
}

TEST_CASE("flux ring N=8 at zero flux: {+-2, +-sqrt2 x2, 0 x2}") {
  const ModelSpec spec = ModelSpec::hermitian_flux_ring(8, 1.0, 0.0);
  const std::vector<std::complex<double>> expected = {
      {2.0, 0.0},          {-2.0, 0.0},          {std::sqrt(2.0), 0.0},
      {std::sqrt(2.0), 0.0}, {-std::sqrt(2.0), 0.0}, {-std::sqrt(2.0), 0.0},
      {0.0, 0.0},          {0.0, 0.0}};
  const Spectrum closed = ring_spectrum_closed_form(spec);
  CHECK(multiset_distance(closed.eigenvalues, expected) < 1e-12);
  CHECK(multiset_distance(closed,
                          dense_eigensolve(build_hamiltonian(spec))) < 1e-10);
}

TEST_CASE("flux pi negates every flux-ring level") {
  for (int n : {5, 8}) {
    const Spectrum at_zero =
        ring_spectrum_closed_form(ModelSpec::hermitian_flux_ring(n, 1.0, 0.0));
    const Spectrum at_pi =
        ring_spectrum_closed_form(ModelSpec::hermitian_flux_ring(n, 1.0, kPi));
    std::vector<std::complex<double>> negated;
    for (const auto& value : at_zero.eigenvalues) negated.push_back(-value);
    CHECK(multiset_distance(negated, at_pi.eigenvalues) < 1e-12);
  }
}

TEST_CASE("ring closed form rejects the wrong variants") {
  CHECK_THROWS_AS(ring_spectrum_closed_form(ModelSpec::open_chain(4, 1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ring_spectrum_closed_form(ModelSpec::defect_ring(4, 1, 1, 2)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ring_spectrum_closed_form(ModelSpec::asymmetric_ring(2, 1, 1)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      open_chain_spectrum_closed_form(ModelSpec::asymmetric_ring(4, 1, 1)),
      std::invalid_argument);
}

TEST_CASE("open chain N=3, alpha=4, beta=1: {2sqrt2, 0, -2sqrt2}") {
  const ModelSpec spec = ModelSpec::open_chain(3, 4.0, 1.0);
  const std::vector<std::complex<double>> expected = {
      {2.0 * std::sqrt(2.0), 0.0}, {0.0, 0.0}, {-2.0 * std::sqrt(2.0), 0.0}};
  const Spectrum closed = open_chain_spectrum_closed_form(spec);
  CHECK(multiset_distance(closed.eigenvalues, expected) < 1e-12);
  CHECK(multiset_distance(closed,
                          dense_eigensolve(build_hamiltonian(spec))) < 1e-10);
}

TEST_CASE("symmetric dimer: {1, -1}") {
  const Spectrum s =
      open_chain_spectrum_closed_form(ModelSpec::open_chain(2, 1.0, 1.0));
  const std::vector<std::complex<double>> expected = {{1.0, 0.0}, {-1.0, 0.0}};
  CHECK(multiset_distance(s.eigenvalues, expected) < 1e-15);
}

TEST_CASE("open-chain spectrum is gauge independent at fixed g") {
  const Spectrum reference = open_chain_spectrum_closed_form(
      ModelSpec::open_chain(20, 1.0, 1.0));
  for (double ratio : {1.3, 2.0, 9.0}) {
    const ModelSpec spec = ModelSpec::open_chain(20, ratio, 1.0 / ratio);
    CHECK(multiset_distance(reference,
                            open_chain_spectrum_closed_form(spec)) < 1e-12);
    const Eigen::MatrixXcd h = build_hamiltonian(spec);
    const Spectrum oracle = dense_eigensolve(h);
    CHECK(multiset_distance(reference, oracle) < 1e-9);
    CHECK(max_imag(oracle) <
          1e-10 * h.cwiseAbs().rowwise().sum().maxCoeff());
  }
}

TEST_CASE("chain eigenpair N=2 mode 1 satisfies H v = 2 v") {
  const ModelSpec spec = ModelSpec::open_chain(2, 4.0, 1.0);
  const ModeSet modes = open_chain_eigenpairs(spec);
  CHECK(modes.right(0, 0) ==
        doctest::Approx(std::sqrt(3.0) / 4.0).epsilon(1e-14));
  CHECK(modes.right(1, 0) ==
        doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-14));
  CHECK(modes.energies[0] == doctest::Approx(2.0));

  const Eigen::MatrixXd h = build_hamiltonian(spec).real();
  const Eigen::VectorXd v = modes.right.col(0);
  CHECK((h * v - 2.0 * v).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("chain modes 1 and 2 are sine orthogonal") {
  const ModeSet modes =
      open_chain_eigenpairs(ModelSpec::open_chain(2, 4.0, 1.0));
  const double overlap = modes.left.col(0).dot(modes.right.col(1));
  CHECK(std::abs(overlap) < 1e-15);
}

TEST_CASE("eigenpairs refuse left-state overflow; the right mode survives") {
  const ModelSpec spec =
      ModelSpec::open_chain(200, std::exp(4.0), std::exp(-4.0));
  CHECK_THROWS_AS(open_chain_eigenpairs(spec), std::invalid_argument);
  CHECK_NOTHROW(open_chain_right_mode(200, 4.0, 100));
}

TEST_CASE("at phi = 0 left and right chain modes coincide") {
  const ModeSet modes =
      open_chain_eigenpairs(ModelSpec::open_chain(7, 1.0, 1.0));
  CHECK((modes.left - modes.right).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigenpair residuals stay below 1e-10 ||H||") {
  for (int n : {3, 8, 17, 40}) {
    for (double ratio : {1.0, 1.35, 2.0}) {
      const ModelSpec spec = ModelSpec::open_chain(n, ratio, 1.0 / ratio);
      const Eigen::MatrixXd h = build_hamiltonian(spec).real();
      const double h_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
      const ModeSet modes = open_chain_eigenpairs(spec);
      for (int mode = 0; mode < n; ++mode) {
        const Eigen::VectorXd v =
            modes.right.col(mode) / modes.dirac_norms[mode];
        CHECK((h * v - modes.energies[mode] * v).norm() <= 1e-10 * h_norm);
      }
    }
  }
}

TEST_CASE("biorthogonal overlaps form the identity") {
  for (double phi : {0.0, 0.3, std::numbers::ln2}) {
    const ModeSet modes = open_chain_eigenpairs(
        ModelSpec::open_chain(40, std::exp(phi), std::exp(-phi)));
    const Eigen::MatrixXd gram = biorthogonal_gram(modes);
    CHECK((gram - Eigen::MatrixXd::Identity(40, 40)).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("uniform-ring residual factorizes to 2 sin k (cos kN - 1)") {
  const int n = 12;
  for (int level = 1; level <= n; ++level) {
    const double k = 2.0 * kPi * level / n;
    CHECK(std::abs(transcendental_residual({k, 0.0}, 1.0, 0.0, n)) < 1e-12);
  }
  const double probe = 0.77;
  const double expected =
      2.0 * std::sin(probe) * (std::cos(probe * n) - 1.0);
  CHECK(transcendental_residual({probe, 0.0}, 1.0, 0.0, n).real() ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("J=0 residual reduces to the open-chain quantization") {
  const int n = 9;
  for (int level = 1; level <= n; ++level) {
    const double k = kPi * level / (n + 1);
    CHECK(std::abs(transcendental_residual({k, 0.0}, 0.0, 0.3, n)) < 1e-12);
  }
}

TEST_CASE("oracle eigenvalues satisfy the momentum equation after inversion") {
  for (double defect : {0.5, 1.0, 2.0}) {
    const ModelSpec spec = ModelSpec::defect_ring(20, std::exp(kLn105),
                                                  std::exp(-kLn105), defect);
    const Spectrum oracle = dense_eigensolve(build_hamiltonian(spec));
    for (const auto& energy : oracle.eigenvalues) {
      CHECK(inversion_residual(energy, 1.0, defect, kLn105, 20) < 1e-8);
    }
  }
}

TEST_CASE("refinement lands on the i phi momentum family at J=1") {
  const std::complex<double> seed(kPi / 2.0, 0.01);
  const std::complex<double> root = refine_momentum(seed, 1.0, kLn105, 20);
  CHECK(std::abs(std::abs(root.imag()) - kLn105) < 1e-9);
  CHECK(std::abs(transcendental_residual(root, 1.0, kLn105, 20)) < 1e-12);
}

TEST_CASE("an exact seed passes through the refinement unchanged") {
  const int n = 14;
  const std::complex<double> seed(kPi / (n + 1), 0.0);
  const std::complex<double> root = refine_momentum(seed, 0.0, 0.2, n);
  CHECK(std::abs(root - seed) < 1e-12);
}

TEST_CASE("refined momenta rebuild the J=2 defect spectrum") {
  const double defect = 2.0;
  const ModelSpec spec = ModelSpec::defect_ring(20, std::exp(kLn105),
                                                std::exp(-kLn105), defect);
  const Spectrum oracle = dense_eigensolve(build_hamiltonian(spec));
  std::vector<std::complex<double>> rebuilt;
  for (const auto& energy : oracle.eigenvalues) {
    const auto seed = momentum_from_energy(energy, 1.0, defect, kLn105, 20);
    const auto root = refine_momentum(seed, defect, kLn105, 20);
    rebuilt.push_back(2.0 * std::cos(root));
  }
  CHECK(multiset_distance(rebuilt, oracle.eigenvalues) < 1e-8);
}

TEST_CASE("refinement reports a vanishing derivative") {
  // R(k) = -4 sin^3 k for N=2, J=1, phi=0: at k = pi/2 the residual is -4
  // while R' = 0.
  CHECK_THROWS_AS(refine_momentum({kPi / 2.0, 0.0}, 1.0, 0.0, 2),
                  std::runtime_error);
}

TEST_CASE("dense solver rejects bad input") {
  CHECK_THROWS_AS(dense_eigensolve(Eigen::MatrixXcd::Zero(2, 3)),
                  EigensolveError);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dense_eigensolve(bad), EigensolveError);
  CHECK_THROWS_AS(
      dense_eigensolve(Eigen::MatrixXcd::Zero(kDenseDimCap + 1,
                                              kDenseDimCap + 1)),
      EigensolveError);
}

TEST_CASE("canonical order sorts by real part then imaginary part") {
  std::vector<std::complex<double>> values = {
      {1.0, -1.0}, {0.0, 2.0}, {0.0, -2.0}, {-1.0, 0.0}};
  canonical_sort(values);
  CHECK(values[0] == std::complex<double>(-1.0, 0.0));
  CHECK(values[1] == std::complex<double>(0.0, -2.0));
  CHECK(values[2] == std::complex<double>(0.0, 2.0));
  CHECK(values[3] == std::complex<double>(1.0, -1.0));
}

TEST_CASE("multiset distance tolerates conjugate-pair rounding noise") {
  const std::vector<std::complex<double>> exact = {{0.0, 3.0}, {0.0, -3.0}};
  const std::vector<std::complex<double>> noisy = {{1e-17, -3.0},
                                                   {-1e-17, 3.0}};
  CHECK(multiset_distance(exact, noisy) < 1e-15);
  CHECK_THROWS_AS(multiset_distance(exact, {{0.0, 3.0}}),
                  std::invalid_argument);
}

TEST_CASE("dense solve of the corner form with wide dynamic range") {
  // corner entries differ by e^{2 N phi}; balancing keeps the oracle usable
  const ModelSpec spec = ModelSpec::asymmetric_ring(50, 1.05, 1.0 / 1.05);
  const double distance =
      multiset_distance(dense_eigensolve(gauge_transform_to_corner(spec)),
                        ring_spectrum_closed_form(spec));
  CHECK(distance < 1e-9);
}
