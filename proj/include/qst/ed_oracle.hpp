#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qst/chain_model.hpp"
#include "qst/fidelity.hpp"

namespace qst::ed {

/// Largest chain the brute-force oracle accepts.
inline constexpr int kMaxSites = 14;

/// Spin configurations with 0, 1 or 2 flipped spins, stored as ascending
/// 1-based site lists in lexicographic order.
struct SectorBasis {
  int n_sites;
  int excitation_count;
  std::vector<std::vector<int>> states;

  static SectorBasis make(int n_sites, int excitation_count);
  int dimension() const noexcept { return static_cast<int>(states.size()); }
  /// Position of an ascending site list; throws IndexOutOfRange if absent.
  int index_of(const std::vector<int>& occupied) const;
};

/// XX Hamiltonian restricted to one excitation sector, built directly from
/// spin flips: -2 J_i between configurations that differ by one excitation
/// hopping across bond i, and sum of -2 h_n over occupied sites on the
/// diagonal.
Eigen::MatrixXd sector_hamiltonian(const ChainSpec& chain, const SectorBasis& sector);

/// exp(-iHt)|initial> by full dense diagonalisation of the sector matrix.
Eigen::VectorXcd sector_propagate(const Eigen::MatrixXd& hmat, int initial, double t);

/// Dense propagator of a sector, diagonalised once and reused across times.
class SectorPropagator {
 public:
  SectorPropagator(const ChainSpec& chain, int excitation_count);

  const SectorBasis& basis() const noexcept { return basis_; }
  /// Full exp(-iHt) in the sector basis.
  Eigen::MatrixXcd evolution(double t) const;

 private:
  SectorBasis basis_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

/// Two-qubit average fidelity evaluated on spin-basis amplitudes from the
/// sector propagators (no determinant identity, no tridiagonal solver).
double oracle_fidelity_2q(const SectorPropagator& one, const SectorPropagator& two,
                          const TransferSetup& setup, double t);

struct EquivalenceReport {
  int cases = 0;
  double max_dev_single = 0.0;
  double max_dev_pair = 0.0;
  double max_dev_fidelity = 0.0;
  double max_norm_error = 0.0;
};

struct EquivalenceOptions {
  int n_min = 4;
  int n_max = 10;
  int times_per_chain = 20;
  double t_max = 500.0;
  unsigned seed = 20240601u;
};

/// Compares every single- and two-particle amplitude and the two-qubit
/// fidelity of the spectral fast path against this oracle for all protocol
/// kinds and chain lengths in range, at random times.
EquivalenceReport run_equivalence(const EquivalenceOptions& options);

}  // namespace qst::ed
