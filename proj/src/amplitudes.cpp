#include "qst/amplitudes.hpp"

#include <cmath>
#include <string>

#include "qst/error.hpp"

namespace qst {

namespace {

void check_site(int site, int n) {
  if (site < 1 || site > n) throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(site));
}

Complex phase(double energy, double t) { return {std::cos(energy * t), -std::sin(energy * t)}; }

}  // namespace

AmplitudeMatrix::AmplitudeMatrix(double time, int n_sites, std::vector<Complex> entries)
    : time_(time), n_(n_sites), entries_(std::move(entries)) {
  if (entries_.size() != std::size_t(n_) * n_) {
    throw Error(ErrorCode::InvalidArgument, "amplitude table must be N x N");
  }
}

Complex AmplitudeMatrix::operator()(int n, int m) const {
  check_site(n, n_);
  check_site(m, n_);
  return entries_[std::size_t(n - 1) * n_ + (m - 1)];
}

std::span<const Complex> AmplitudeMatrix::row(int n) const {
  check_site(n, n_);
  return {entries_.data() + std::size_t(n - 1) * n_, std::size_t(n_)};
}

Complex single_amplitude(const SpectralDecomposition& decomp, int n, int m, double t) {
  const int size = decomp.size();
  check_site(n, size);
  check_site(m, size);
  Complex sum = 0.0;
  for (int k = 0; k < size; ++k) {
    sum += phase(decomp.eigenvalue(k), t) * (decomp.component(m - 1, k) * decomp.component(n - 1, k));
  }
  return sum;
}

AmplitudeMatrix amplitude_matrix(const SpectralDecomposition& decomp, double t) {
  const int n = decomp.size();
  std::vector<Complex> entries(std::size_t(n) * n, Complex(0.0));
  // Sum of phase-weighted outer products a_k a_k^T, filling the upper
  // triangle and mirroring.
  for (int k = 0; k < n; ++k) {
    const Complex ph = phase(decomp.eigenvalue(k), t);
    const auto v = decomp.eigenvector(k);
    for (int i = 0; i < n; ++i) {
      const Complex pv = ph * v[i];
      Complex* row = entries.data() + std::size_t(i) * n;
      for (int j = i; j < n; ++j) row[j] += pv * v[j];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) entries[std::size_t(i) * n + j] = entries[std::size_t(j) * n + i];
  }
  return AmplitudeMatrix(t, n, std::move(entries));
}

Complex two_particle_amplitude(const AmplitudeMatrix& ampl, int n, int m, int p, int q) {
  if (n >= m || p >= q) {
    throw Error(ErrorCode::UnorderedPair, "site pairs must be given as (n < m), (p < q)");
  }
  return pair_determinant(ampl.row(n), ampl.row(m), p - 1, q - 1);
}

void Propagator::phases(double t, std::span<Complex> out) const {
  for (int k = 0; k < decomp_.size(); ++k) out[k] = phase(decomp_.eigenvalue(k), t);
}

void Propagator::row(int source, std::span<const Complex> phases, std::span<Complex> out) const {
  const int n = decomp_.size();
  check_site(source, n);
  for (int m = 0; m < n; ++m) out[m] = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex w = phases[k] * decomp_.component(source - 1, k);
    const auto v = decomp_.eigenvector(k);
    for (int m = 0; m < n; ++m) out[m] += w * v[m];
  }
}

Complex Propagator::amplitude(int source, int target, double t) const {
  return single_amplitude(decomp_, source, target, t);
}

}  // namespace qst
