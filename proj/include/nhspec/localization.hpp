#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nhspec/model.hpp"
#include "nhspec/spectral.hpp"

namespace nhspec {

/// Inverse participation ratio sum|f|^4 / (sum|f|^2)^2 of one mode.
/// Scale invariant; 1/N for a uniform state, 1 for a single occupied site.
double dirac_ipr(const Eigen::VectorXd& amplitudes);
double dirac_ipr(const Eigen::VectorXcd& amplitudes);

/// IPR built from the left/right site products,
///   sum|f~ f|^2 / (sum|f~ f|)^2.
/// For the chain modes the e^{+-phi j} envelopes cancel inside the product,
/// so the value matches the phi = 0 Dirac IPR of the same mode.
double biorthogonal_ipr(const Eigen::VectorXd& left,
                        const Eigen::VectorXd& right);

/// Mean Dirac IPR over all N chain modes.
double averaged_ipr(const ModelSpec& spec);

/// Mean biorthogonal IPR over all N chain modes, by direct summation of the
/// site products (with the envelopes cancelled exactly). Equals
/// 3/(2(N+1)) for even N; odd N picks up the k = pi/2 middle mode, which
/// contributes 2/(N+1) instead, giving (3N+1)/(2N(N+1)).
double averaged_biorthogonal_ipr(const ModelSpec& spec);

/// Large-N limit of the averaged Dirac IPR:
///   chi_c = (1/4) tanh phi (sech^4 phi tanh phi - 8 tanh phi
///           + 6 tanh^2 phi + 6),
/// evaluated at |phi| (both localization sides behave the same).
/// Monotone from 0 at phi = 0 to 1 as phi -> inf.
double asymptotic_ipr(double phi);

struct ModeProfile {
  int mode = 0;      // column index into the ModeSet; momentum label mode+1
  double momentum = 0.0;
  std::vector<double> dirac_distribution;   // |f_j|^2 / Omega^2, sums to 1
  std::vector<double> biorth_distribution;  // site products, unit sum
  double fitted_decay_rate = 0.0;           // NaN when the fit is undefined
};

ModeProfile mode_profile(const ModeSet& modes, int mode);

/// Least-squares decay rate of ln|f_j|, sampled at the envelope antinodes:
/// the largest |f| inside consecutive windows one half-period wide, skipping
/// sine zeros. Points below the 1e-12 amplitude floor are dropped and at
/// least 10 must survive. Returns the rate (~phi); 1/rate is the
/// localization length.
double envelope_decay_rate(const Eigen::VectorXd& amplitudes, double momentum);
double localization_length_fit(const ModeProfile& profile);

struct IprReport {
  int size = 0;
  double phi = 0.0;
  std::vector<double> per_mode_ipr;
  std::vector<double> per_mode_biorth_ipr;
  double averaged = 0.0;
  double averaged_biorth = 0.0;
  double asymptotic = 0.0;  // chi_c at this phi
};

IprReport ipr_report(const ModelSpec& spec);

/// Reports over the (phi, N) product grid, assembled in grid order
/// regardless of worker count.
std::vector<IprReport> scaling_study(const std::vector<double>& phis,
                                     const std::vector<int>& sizes,
                                     int workers = 1);

}  // namespace nhspec
