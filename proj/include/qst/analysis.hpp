#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qst/chain_model.hpp"
#include "qst/fidelity.hpp"

namespace qst {

inline constexpr double kDefaultThreshold = 0.97;

struct TransferResult {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  double tau = kNaN;          // first time F >= threshold
  double fbar_at_tau = kNaN;
  double threshold = kDefaultThreshold;
  double rabi_gap = kNaN;     // dw, NaN when no localized multiplet was found
  double tau_predicted = kNaN;  // pi / dw
  bool reached = false;
  double t_max = kNaN;        // end of the searched window
  // Maximum of F over the first above-threshold excursion; only filled when
  // TransferSearch::locate_peak is set.
  double t_peak = kNaN;
  double fbar_peak = kNaN;
};

struct TransferSearch {
  /// <= 0 selects the default: 20 pi/dw if a gap is known, else 1000 N.
  double t_max = 0.0;
  bool locate_peak = false;
};

/// Rabi gap used to predict the transfer time for a setup, if one applies:
/// the bi-local pair for (1)->(N), the sextet for (1,2)->(N-1,N) with N = 6n.
/// Returns NaN when the spectrum has no such structure.
double predicted_rabi_gap(const SpectralDecomposition& decomp, const TransferSetup& setup);

/// Two-stage search for the first threshold crossing of the average
/// fidelity: coarse scan at pi/(10 eps_max) flags candidates, which are
/// re-scanned at pi/(200 eps_max). Not reaching the threshold before t_max
/// is reported through `reached`, not thrown.
TransferResult find_transfer_time(const ChainSpec& chain, const TransferSetup& setup,
                                  double threshold, const TransferSearch& search = {});

struct SweepPoint {
  ProtocolKind kind;
  int n_sites;
  double xi;
  TransferResult result;
  std::string error;  // non-empty if this grid point failed numerically
};

struct SweepRequest {
  ProtocolKind kind = ProtocolKind::WeakBlock2Q;
  std::vector<int> n_list;
  std::vector<double> xi_list;
  double threshold = kDefaultThreshold;
  double t_max = 0.0;
  int jobs = 1;
};

/// find_transfer_time over the N x xi grid with the protocol's default
/// setup. Results come back in (N, xi) input order regardless of `jobs`.
std::vector<SweepPoint> sweep(const SweepRequest& request);

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> samples;
  int n_excluded = 0;
};

/// Least squares line through (log x, log tau): tau ~ prefactor * x^exponent.
ScalingFit fit_power_law(std::span<const std::pair<double, double>> samples);

/// Least squares line through (x, log tau): tau ~ prefactor * exp(exponent x).
ScalingFit fit_exponential(std::span<const std::pair<double, double>> samples);

enum class SweepAxis { Xi, N };
enum class FitModel { PowerLaw, Exponential };

/// Fits tau against one sweep axis, dropping points that did not reach the
/// threshold (counted in n_excluded). The other axis must hold one value.
ScalingFit fit_sweep(std::span<const SweepPoint> points, SweepAxis axis,
                     FitModel model = FitModel::PowerLaw);

/// Transfer-time exponent in the perturbation for the one-qubit weak-edge
/// and next-to-edge barrier protocols at fixed N.
ScalingFit scaling_exponent_1q(ProtocolKind kind, int n_sites, std::span<const double> xi_list,
                               double threshold = kDefaultThreshold, int jobs = 1);

/// {"exponent":..,"prefactor":..,"r_squared":..,"n_samples":..,"n_excluded":..}
std::string fit_json(const ScalingFit& fit);

}  // namespace qst
