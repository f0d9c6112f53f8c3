#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qst/spectral.hpp"

namespace qst {

using Complex = std::complex<double>;

/// f_n^m(t) = <m| exp(-iHt) |n> for every pair of sites at one time.
/// Site arguments are 1-based.
class AmplitudeMatrix {
 public:
  AmplitudeMatrix(double time, int n_sites, std::vector<Complex> entries);

  double time() const noexcept { return time_; }
  int n_sites() const noexcept { return n_; }
  Complex operator()(int n, int m) const;
  /// Row n (1-based) as N contiguous values f_n^1 .. f_n^N.
  std::span<const Complex> row(int n) const;

 private:
  double time_;
  int n_;
  std::vector<Complex> entries_;  // row-major
};

/// sum_k exp(-i eps_k t) a[m][k] a[n][k]
Complex single_amplitude(const SpectralDecomposition& decomp, int n, int m, double t);

AmplitudeMatrix amplitude_matrix(const SpectralDecomposition& decomp, double t);

/// g_{nm}^{pq} = f_n^p f_m^q - f_n^q f_m^p for ordered pairs n < m, p < q.
Complex two_particle_amplitude(const AmplitudeMatrix& ampl, int n, int m, int p, int q);

/// Same determinant from two rows f_{s1}^., f_{s2}^. (0-based p, q). No
/// ordering check; swapping p and q flips the sign.
inline Complex pair_determinant(std::span<const Complex> row1, std::span<const Complex> row2,
                                int p, int q) {
  return row1[p] * row2[q] - row1[q] * row2[p];
}

/// Time-grid evaluation of selected amplitude rows from one decomposition.
/// Stateless apart from the reference; safe to share across threads.
class Propagator {
 public:
  explicit Propagator(const SpectralDecomposition& decomp) : decomp_(decomp) {}

  const SpectralDecomposition& decomposition() const noexcept { return decomp_; }
  int n_sites() const noexcept { return decomp_.size(); }

  /// out[k] = exp(-i eps_k t)
  void phases(double t, std::span<Complex> out) const;
  /// out[m] = f_source^{m+1} for a 1-based source site, given phases(t).
  void row(int source, std::span<const Complex> phases, std::span<Complex> out) const;
  /// f_source^target(t), both 1-based; O(N).
  Complex amplitude(int source, int target, double t) const;

 private:
  const SpectralDecomposition& decomp_;
};

}  // namespace qst
