#include "nhspec/localization.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nhspec/parallel.hpp"

namespace nhspec {

namespace {

constexpr double kFitAmplitudeFloor = 1e-12;
constexpr std::size_t kFitMinPoints = 10;

double ipr_of_abs(const Eigen::VectorXd& magnitudes) {
  const double peak = magnitudes.maxCoeff();
  if (!(peak > 0.0)) {
    throw std::invalid_argument("IPR of a zero vector is undefined");
  }
  // Normalising by the peak keeps the sums in range for any envelope scale;
  // the ratio is scale invariant.
  double sum_sq = 0.0;
  double sum_quart = 0.0;
  for (Eigen::Index j = 0; j < magnitudes.size(); ++j) {
    const double a = magnitudes[j] / peak;
    const double a2 = a * a;
    sum_sq += a2;
    sum_quart += a2 * a2;
  }
  return sum_quart / (sum_sq * sum_sq);
}

/// Chain-mode site products |f~_j f_j| with the e^{+-phi j} envelopes
/// cancelled exactly: sin^2(k_n j). Stable at any phi N.
Eigen::VectorXd biorth_overlap(int size, int n) {
  const double k = std::numbers::pi * n / (size + 1);
  Eigen::VectorXd overlap(size);
  for (int j = 1; j <= size; ++j) {
    const double wave = std::sin(k * j);
    overlap[j - 1] = wave * wave;
  }
  return overlap;
}

double overlap_ipr(const Eigen::VectorXd& products) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index j = 0; j < products.size(); ++j) {
    sum += products[j];
    sum_sq += products[j] * products[j];
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("biorthogonal overlap sum vanishes");
  }
  return sum_sq / (sum * sum);
}

void require_open_chain(const ModelSpec& spec) {
  if (spec.variant != Variant::OpenChain) {
    throw std::invalid_argument("IPR averages are defined for the open chain");
  }
}

}  // namespace

double dirac_ipr(const Eigen::VectorXd& amplitudes) {
  return ipr_of_abs(amplitudes.cwiseAbs());
}

double dirac_ipr(const Eigen::VectorXcd& amplitudes) {
  return ipr_of_abs(amplitudes.cwiseAbs());
}

double biorthogonal_ipr(const Eigen::VectorXd& left,
                        const Eigen::VectorXd& right) {
  if (left.size() != right.size()) {
    throw std::invalid_argument("left/right vectors must have equal length");
  }
  return overlap_ipr(left.cwiseProduct(right).cwiseAbs());
}

double averaged_ipr(const ModelSpec& spec) {
  require_open_chain(spec);
  const double phi = derived_params(spec).phi;
  double total = 0.0;
  for (int n = 1; n <= spec.size; ++n) {
    total += dirac_ipr(open_chain_right_mode(spec.size, phi, n));
  }
  return total / spec.size;
}

double averaged_biorthogonal_ipr(const ModelSpec& spec) {
  require_open_chain(spec);
  double total = 0.0;
  for (int n = 1; n <= spec.size; ++n) {
    total += overlap_ipr(biorth_overlap(spec.size, n));
  }
  return total / spec.size;
}

double asymptotic_ipr(double phi) {
  const double t = std::tanh(std::abs(phi));
  const double sech = 1.0 / std::cosh(std::abs(phi));
  const double sech4 = sech * sech * sech * sech;
  return 0.25 * t * (sech4 * t - 8.0 * t + 6.0 * t * t + 6.0);
}

ModeProfile mode_profile(const ModeSet& modes, int mode) {
  if (mode < 0 || mode >= modes.size) {
    throw std::invalid_argument("mode index out of range");
  }
  ModeProfile profile;
  profile.mode = mode;
  profile.momentum = modes.momenta[mode];

  const double omega_sq =
      modes.dirac_norms[mode] * modes.dirac_norms[mode];
  profile.dirac_distribution.resize(modes.size);
  for (int j = 0; j < modes.size; ++j) {
    const double f = modes.right(j, mode);
    profile.dirac_distribution[j] = f * f / omega_sq;
  }

  // Unit-sum presentation of the left/right site products; the sinusoidal
  // shape survives any choice of overall prefactor.
  profile.biorth_distribution.resize(modes.size);
  double overlap_sum = 0.0;
  for (int j = 0; j < modes.size; ++j) {
    const double product =
        std::abs(modes.left(j, mode) * modes.right(j, mode));
    profile.biorth_distribution[j] = product;
    overlap_sum += product;
  }
  for (double& value : profile.biorth_distribution) value /= overlap_sum;

  try {
    profile.fitted_decay_rate = localization_length_fit(profile);
  } catch (const std::exception&) {
    profile.fitted_decay_rate = std::numeric_limits<double>::quiet_NaN();
  }
  return profile;
}

double envelope_decay_rate(const Eigen::VectorXd& amplitudes,
                           double momentum) {
  if (!(momentum > 0.0)) {
    throw std::invalid_argument("momentum must be positive");
  }
  const Eigen::Index n = amplitudes.size();
  const Eigen::Index window = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::llround(std::numbers::pi / momentum)));

  std::vector<std::pair<double, double>> points;  // (site, ln|f|)
  for (Eigen::Index start = 0; start < n; start += window) {
    const Eigen::Index stop = std::min(start + window, n);
    Eigen::Index best = start;
    for (Eigen::Index j = start + 1; j < stop; ++j) {
      if (std::abs(amplitudes[j]) > std::abs(amplitudes[best])) best = j;
    }
    const double magnitude = std::abs(amplitudes[best]);
    if (magnitude > kFitAmplitudeFloor) {
      points.emplace_back(static_cast<double>(best + 1), std::log(magnitude));
    }
  }
  if (points.size() < kFitMinPoints) {
    throw std::runtime_error(
        "envelope fit needs at least 10 usable antinodes, found " +
        std::to_string(points.size()));
  }

  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= points.size();
  mean_y /= points.size();
  double cov = 0.0, var = 0.0;
  for (const auto& [x, y] : points) {
    cov += (x - mean_x) * (y - mean_y);
    var += (x - mean_x) * (x - mean_x);
  }
  return -cov / var;
}

double localization_length_fit(const ModeProfile& profile) {
  Eigen::VectorXd amplitudes(profile.dirac_distribution.size());
  for (Eigen::Index j = 0; j < amplitudes.size(); ++j) {
    amplitudes[j] = std::sqrt(profile.dirac_distribution[j]);
  }
  return envelope_decay_rate(amplitudes, profile.momentum);
}

IprReport ipr_report(const ModelSpec& spec) {
  require_open_chain(spec);
  const double phi = derived_params(spec).phi;
  IprReport report;
  report.size = spec.size;
  report.phi = phi;
  report.per_mode_ipr.resize(spec.size);
  report.per_mode_biorth_ipr.resize(spec.size);
  for (int n = 1; n <= spec.size; ++n) {
    report.per_mode_ipr[n - 1] =
        dirac_ipr(open_chain_right_mode(spec.size, phi, n));
    report.per_mode_biorth_ipr[n - 1] = overlap_ipr(biorth_overlap(spec.size, n));
    report.averaged += report.per_mode_ipr[n - 1];
    report.averaged_biorth += report.per_mode_biorth_ipr[n - 1];
  }
  report.averaged /= spec.size;
  report.averaged_biorth /= spec.size;
  report.asymptotic = asymptotic_ipr(phi);
  return report;
}

std::vector<IprReport> scaling_study(const std::vector<double>& phis,
                                     const std::vector<int>& sizes,
                                     int workers) {
  if (phis.empty() || sizes.empty()) {
    throw std::invalid_argument("scaling study needs nonempty phi and N lists");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("N list must be strictly increasing");
    }
  }
  std::vector<IprReport> reports(phis.size() * sizes.size());
  run_indexed(reports.size(), workers, [&](std::size_t index) {
    const double phi = phis[index / sizes.size()];
    const int size = sizes[index % sizes.size()];
    reports[index] =
        ipr_report(ModelSpec::open_chain(size, std::exp(phi), std::exp(-phi)));
  });
  return reports;
}

}  // namespace nhspec
