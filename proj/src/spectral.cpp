#include "qst/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qst/error.hpp"

namespace qst {

namespace {

constexpr int kMaxSweepsPerEigenvalue = 50;

void fix_column_signs(std::vector<double>& vectors, int n) {
  for (int k = 0; k < n; ++k) {
    double* col = vectors.data() + std::size_t(k) * n;
    int arg = 0;
    for (int i = 1; i < n; ++i) {
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    }
    if (col[arg] < 0.0) {
      for (int i = 0; i < n; ++i) col[i] = -col[i];
    }
  }
}

void check_unit_columns(std::vector<double>& vectors, int n) {
  for (int k = 0; k < n; ++k) {
    double* col = vectors.data() + std::size_t(k) * n;
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    for (int i = 0; i < n; ++i) col[i] /= norm;
  }
}

// Eigenpairs sorted ascending; ties keep their incoming order.
SpectralDecomposition sorted_decomposition(const std::vector<double>& values,
                                           const std::vector<double>& vectors, int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  std::vector<double> sorted_values(n);
  std::vector<double> sorted_vectors(std::size_t(n) * n);
  for (int k = 0; k < n; ++k) {
    sorted_values[k] = values[order[k]];
    std::copy_n(vectors.begin() + std::ptrdiff_t(order[k]) * n, n,
                sorted_vectors.begin() + std::ptrdiff_t(k) * n);
  }
  fix_column_signs(sorted_vectors, n);
  return SpectralDecomposition(std::move(sorted_values), std::move(sorted_vectors));
}

// QL with implicit shifts (EISPACK tql2 lineage). Works in place on d (the
// diagonal, overwritten by eigenvalues) and z (column-major, identity on
// entry, eigenvectors on exit). e holds the off-diagonal in e[0..n-2].
void tql2(std::vector<double>& d, std::vector<double> e, std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;

  const double eps = std::numeric_limits<double>::epsilon();
  double shift_total = 0.0;
  double tst1 = 0.0;
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > kMaxSweepsPerEigenvalue) {
          throw Error(ErrorCode::ConvergenceFailure,
                      "QL iteration did not converge for eigenvalue " + std::to_string(l));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        shift_total += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);

          double* zi = z.data() + std::size_t(i) * n;
          double* zi1 = zi + n;
          for (int k = 0; k < n; ++k) {
            const double t = zi1[k];
            zi1[k] = s * zi[k] + c * t;
            zi[k] = c * zi[k] - s * t;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0.0;
  }
}

struct Eigenpairs {
  std::vector<double> values;
  std::vector<double> vectors;  // column-major
};

Eigenpairs raw_tridiagonal(std::span<const double> diagonal, std::span<const double> off) {
  const int n = static_cast<int>(diagonal.size());
  Eigenpairs out;
  out.values.assign(diagonal.begin(), diagonal.end());
  out.vectors.assign(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) out.vectors[std::size_t(i) * n + i] = 1.0;
  tql2(out.values, std::vector<double>(off.begin(), off.end()), out.vectors);
  return out;
}

SpectralDecomposition diagonalize_by_parity(const SingleExcitationHamiltonian& h) {
  const int n = h.size();
  const int half = n / 2;
  const bool odd = (n % 2) == 1;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // Even block: (|i> + |N-1-i>)/sqrt2 for i < half, plus the centre site
  // when N is odd. Odd block: (|i> - |N-1-i>)/sqrt2 for i < half.
  const int even_size = half + (odd ? 1 : 0);
  std::vector<double> even_diag(h.diagonal.begin(), h.diagonal.begin() + even_size);
  std::vector<double> even_off(h.off_diagonal.begin(),
                               h.off_diagonal.begin() + std::max(even_size - 1, 0));
  std::vector<double> odd_diag(h.diagonal.begin(), h.diagonal.begin() + half);
  std::vector<double> odd_off(h.off_diagonal.begin(),
                              h.off_diagonal.begin() + std::max(half - 1, 0));
  if (odd) {
    even_off[half - 1] = std::sqrt(2.0) * h.off_diagonal[half - 1];
  } else {
    even_diag[half - 1] += h.off_diagonal[half - 1];
    odd_diag[half - 1] -= h.off_diagonal[half - 1];
  }

  const Eigenpairs even = raw_tridiagonal(even_diag, even_off);
  const Eigenpairs oddp = raw_tridiagonal(odd_diag, odd_off);

  std::vector<double> values;
  std::vector<double> vectors;
  values.reserve(n);
  vectors.reserve(std::size_t(n) * n);
  for (int k = 0; k < even_size; ++k) {
    values.push_back(even.values[k]);
    const double* v = even.vectors.data() + std::size_t(k) * even_size;
    std::vector<double> col(n, 0.0);
    for (int i = 0; i < half; ++i) {
      col[i] = v[i] * inv_sqrt2;
      col[n - 1 - i] = v[i] * inv_sqrt2;
    }
    if (odd) col[half] = v[half];
    vectors.insert(vectors.end(), col.begin(), col.end());
  }
  for (int k = 0; k < half; ++k) {
    values.push_back(oddp.values[k]);
    const double* v = oddp.vectors.data() + std::size_t(k) * half;
    std::vector<double> col(n, 0.0);
    for (int i = 0; i < half; ++i) {
      col[i] = v[i] * inv_sqrt2;
      col[n - 1 - i] = -v[i] * inv_sqrt2;
    }
    vectors.insert(vectors.end(), col.begin(), col.end());
  }
  check_unit_columns(vectors, n);
  return sorted_decomposition(values, vectors, n);
}

std::vector<double> weights_on(const SpectralDecomposition& decomp, std::span<const int> sites0) {
  std::vector<double> w(decomp.size(), 0.0);
  for (int k = 0; k < decomp.size(); ++k) {
    for (int s : sites0) w[k] += decomp.component(s, k) * decomp.component(s, k);
  }
  return w;
}

}  // namespace

SingleExcitationHamiltonian SingleExcitationHamiltonian::from_chain(const ChainSpec& chain) {
  SingleExcitationHamiltonian h;
  h.diagonal.reserve(chain.n_sites());
  for (double field : chain.fields()) h.diagonal.push_back(-2.0 * field);
  h.off_diagonal.reserve(chain.n_sites() - 1);
  for (double j : chain.couplings()) h.off_diagonal.push_back(-2.0 * j);
  return h;
}

SpectralDecomposition::SpectralDecomposition(std::vector<double> eigenvalues,
                                             std::vector<double> eigenvectors_col_major)
    : eigenvalues_(std::move(eigenvalues)), vectors_(std::move(eigenvectors_col_major)) {
  if (vectors_.size() != eigenvalues_.size() * eigenvalues_.size()) {
    throw Error(ErrorCode::InvalidArgument, "eigenvector table must be N x N");
  }
}

double SpectralDecomposition::max_abs_eigenvalue() const noexcept {
  double m = 0.0;
  for (double e : eigenvalues_) m = std::max(m, std::abs(e));
  return m;
}

SpectralDecomposition solve_tridiagonal(std::span<const double> diagonal,
                                        std::span<const double> off_diagonal) {
  const int n = static_cast<int>(diagonal.size());
  if (n == 0 || off_diagonal.size() + 1 != diagonal.size()) {
    throw Error(ErrorCode::InvalidLength, "tridiagonal matrix needs N >= 1 and N-1 off-diagonals");
  }
  Eigenpairs raw = raw_tridiagonal(diagonal, off_diagonal);
  return sorted_decomposition(raw.values, raw.vectors, n);
}

SpectralDecomposition diagonalize(const ChainSpec& chain) {
  const auto h = SingleExcitationHamiltonian::from_chain(chain);
  if (chain.is_mirror_symmetric()) return diagonalize_by_parity(h);
  return solve_tridiagonal(h.diagonal, h.off_diagonal);
}

double degeneracy_tolerance(const SpectralDecomposition& decomp) {
  const auto& e = decomp.eigenvalues();
  return 1e-8 * (e.back() - e.front());
}

int SpectralClass::edge_multiplicity() const noexcept {
  if (degenerate_sets.size() != 2) return 0;
  if (degenerate_sets[0].multiplicity != degenerate_sets[1].multiplicity) return 0;
  return degenerate_sets[0].multiplicity;
}

std::string SpectralClass::label() const {
  std::string out = "N mod 6 = " + std::to_string(residue_mod6);
  if (residue_mod6 == 0) out = "N=6n";
  switch (edge_multiplicity()) {
    case 3: out += ", triple-degenerate"; break;
    case 2: out += ", double-degenerate"; break;
    default: out += ", no degenerate set at +-2"; break;
  }
  if (has_zero_mode) out += ", zero mode";
  return out;
}

SpectralClass classify_spectrum(const SpectralDecomposition& decomp, int n_sites) {
  if (n_sites != decomp.size()) {
    throw Error(ErrorCode::InvalidArgument, "decomposition size does not match n_sites");
  }
  SpectralClass cls;
  cls.parity = (n_sites % 2 == 0) ? Parity::Even : Parity::Odd;
  cls.residue_mod6 = n_sites % 6;

  const double tol = degeneracy_tolerance(decomp);
  cls.has_zero_mode = std::any_of(decomp.eigenvalues().begin(), decomp.eigenvalues().end(),
                                  [&](double e) { return std::abs(e) < tol; });

  // The +-2 multiplets are split by the weak coupling, so they are grouped
  // within a fraction of the bulk level spacing rather than at `tol`.
  const auto& e = decomp.eigenvalues();
  const double window = (e.back() - e.front()) / (4.0 * (n_sites + 1));
  for (double centre : {-2.0, 2.0}) {
    int count = 0;
    double sum = 0.0;
    for (double v : e) {
      if (std::abs(v - centre) <= window) {
        ++count;
        sum += v;
      }
    }
    if (count >= 2) cls.degenerate_sets.push_back({sum / count, count});
  }
  return cls;
}

double localization_weight(const SpectralDecomposition& decomp, std::span<const int> sites, int k) {
  if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "site list is empty");
  if (k < 0 || k >= decomp.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "eigenstate index " + std::to_string(k));
  }
  double w = 0.0;
  for (int s : sites) {
    if (s < 1 || s > decomp.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(s));
    }
    w += decomp.component(s - 1, k) * decomp.component(s - 1, k);
  }
  return w;
}

BiLocalPair find_bilocal_pair(const SpectralDecomposition& decomp) {
  const int n = decomp.size();
  const int ends[] = {0, n - 1};
  const std::vector<double> w = weights_on(decomp, ends);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] > w[b]; });
  if (n < 2 || w[order[1]] <= 0.5) {
    throw Error(ErrorCode::LocalizationNotFound, "no eigenpair with weight > 0.5 on sites {1,N}");
  }
  const int a = order[0], b = order[1];
  return decomp.eigenvalue(a) >= decomp.eigenvalue(b) ? BiLocalPair{a, b} : BiLocalPair{b, a};
}

std::vector<int> sextet_indices(int n_sites) {
  if (n_sites < 6 || n_sites % 6 != 0) {
    throw Error(ErrorCode::InvalidLength, "sextet structure needs N = 6n");
  }
  const int third = n_sites / 3;
  return {third - 2, third - 1, third, 2 * third - 1, 2 * third, 2 * third + 1};
}

double rabi_gap(const SpectralDecomposition& decomp, RabiMode mode) {
  if (mode == RabiMode::BiLocal1Q) {
    const BiLocalPair pair = find_bilocal_pair(decomp);
    return decomp.eigenvalue(pair.upper) - decomp.eigenvalue(pair.lower);
  }

  const int n = decomp.size();
  const std::vector<int> k = sextet_indices(n);
  const int block[] = {0, 1, n - 2, n - 1};
  const std::vector<double> w = weights_on(decomp, block);
  double sextet_weight = 0.0;
  for (int i : k) sextet_weight += w[i];
  // Four block sites in total; the sextet must carry at least half of them.
  if (sextet_weight < 2.0) {
    throw Error(ErrorCode::LocalizationNotFound, "sextet is not localized on the end blocks");
  }
  const double lower = 0.5 * (decomp.eigenvalue(k[2]) - decomp.eigenvalue(k[0]));
  const double upper = 0.5 * (decomp.eigenvalue(k[5]) - decomp.eigenvalue(k[3]));
  if (std::abs(lower - upper) > 0.1 * std::max(std::abs(lower), std::abs(upper))) {
    throw Error(ErrorCode::SextetMismatch, "triplet half-widths " + std::to_string(lower) +
                                               " and " + std::to_string(upper) + " differ");
  }
  return lower;
}

}  // namespace qst
