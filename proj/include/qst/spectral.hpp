#pragma once

#include <span>
#include <string>
#include <vector>

#include "qst/chain_model.hpp"

namespace qst {

/// One-excitation block of the XX Hamiltonian in the site basis, with the
/// all-down state gauged to zero energy: diagonal -2 h_n, off-diagonal -2 J_n.
struct SingleExcitationHamiltonian {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  static SingleExcitationHamiltonian from_chain(const ChainSpec& chain);
  int size() const noexcept { return static_cast<int>(diagonal.size()); }
};

/// Eigenpairs of a symmetric tridiagonal matrix, eigenvalues ascending.
/// Eigenvector columns are normalised and signed so that their
/// largest-magnitude component is positive.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::vector<double> eigenvalues, std::vector<double> eigenvectors_col_major);

  int size() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  /// eps_k, 0-based k.
  double eigenvalue(int k) const noexcept { return eigenvalues_[k]; }
  /// <n|eps_k>, 0-based site n and state k.
  double component(int n, int k) const noexcept { return vectors_[std::size_t(k) * size() + n]; }
  /// Column k as a contiguous span of N components.
  std::span<const double> eigenvector(int k) const noexcept {
    return {vectors_.data() + std::size_t(k) * size(), std::size_t(size())};
  }
  double max_abs_eigenvalue() const noexcept;

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> vectors_;  // column-major, N x N
};

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// Throws ConvergenceFailure when an eigenvalue needs more than 50 sweeps.
SpectralDecomposition solve_tridiagonal(std::span<const double> diagonal,
                                        std::span<const double> off_diagonal);

/// Diagonalises the one-excitation Hamiltonian of `chain`. Mirror-symmetric
/// chains are split into their even and odd parity blocks first, which keeps
/// every eigenvector exactly (anti)symmetric even for quasi-degenerate pairs.
SpectralDecomposition diagonalize(const ChainSpec& chain);

enum class Parity { Even, Odd };

struct DegenerateSet {
  double energy;
  int multiplicity;
};

struct SpectralClass {
  Parity parity;
  int residue_mod6;  // N mod 6
  bool has_zero_mode;
  std::vector<DegenerateSet> degenerate_sets;  // clusters around -2 and +2

  /// Multiplicity of the clusters at +-2 when both agree, else 0.
  int edge_multiplicity() const noexcept;
  /// Short human-readable label, e.g. "N=6n, triple-degenerate".
  std::string label() const;
};

/// |eps_a - eps_b| below this counts as an exact degeneracy.
double degeneracy_tolerance(const SpectralDecomposition& decomp);

SpectralClass classify_spectrum(const SpectralDecomposition& decomp, int n_sites);

/// Sum of |<n|eps_k>|^2 over the given 1-based sites; k is 0-based.
double localization_weight(const SpectralDecomposition& decomp, std::span<const int> sites, int k);

enum class RabiMode { BiLocal1Q, SextetN6n };

/// The two eigenstates carrying most weight on sites {1, N}; `upper` has the
/// larger eigenvalue. Throws LocalizationNotFound unless both exceed 0.5.
struct BiLocalPair {
  int upper;
  int lower;
};
BiLocalPair find_bilocal_pair(const SpectralDecomposition& decomp);

/// 0-based indices of the six levels of the N = 6n quasi-degenerate triplets,
/// ascending in energy.
std::vector<int> sextet_indices(int n_sites);

/// Rabi splitting of the localized multiplet: eps_1 - eps_2 of the bi-local
/// pair, or half the width of the lower sextet triplet (checked against the
/// upper triplet to within 10%).
double rabi_gap(const SpectralDecomposition& decomp, RabiMode mode);

}  // namespace qst
