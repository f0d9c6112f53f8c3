#include "qst/ed_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qst/amplitudes.hpp"
#include "qst/error.hpp"
#include "qst/spectral.hpp"

namespace qst::ed {

SectorBasis SectorBasis::make(int n_sites, int excitation_count) {
  if (n_sites > kMaxSites) {
    throw Error(ErrorCode::SizeCapExceeded, "oracle is limited to N <= " + std::to_string(kMaxSites));
  }
  if (n_sites < 1 || excitation_count < 0 || excitation_count > 2) {
    throw Error(ErrorCode::InvalidArgument, "sector must have 0, 1 or 2 excitations");
  }
  SectorBasis basis{n_sites, excitation_count, {}};
  switch (excitation_count) {
    case 0: basis.states.push_back({}); break;
    case 1:
      for (int a = 1; a <= n_sites; ++a) basis.states.push_back({a});
      break;
    case 2:
      for (int a = 1; a <= n_sites; ++a)
        for (int b = a + 1; b <= n_sites; ++b) basis.states.push_back({a, b});
      break;
  }
  return basis;
}

int SectorBasis::index_of(const std::vector<int>& occupied) const {
  const auto it = std::lower_bound(states.begin(), states.end(), occupied);
  if (it == states.end() || *it != occupied) {
    throw Error(ErrorCode::IndexOutOfRange, "configuration not in sector");
  }
  return static_cast<int>(it - states.begin());
}

Eigen::MatrixXd sector_hamiltonian(const ChainSpec& chain, const SectorBasis& sector) {
  if (chain.n_sites() != sector.n_sites) {
    throw Error(ErrorCode::InvalidArgument, "sector basis built for a different chain length");
  }
  if (chain.n_sites() > kMaxSites) {
    throw Error(ErrorCode::SizeCapExceeded, "oracle is limited to N <= " + std::to_string(kMaxSites));
  }
  const int dim = sector.dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const auto& occ = sector.states[col];
    for (int site : occ) h(col, col) += -2.0 * chain.field(site);
    // Move each excitation to an empty neighbouring site.
    for (std::size_t which = 0; which < occ.size(); ++which) {
      for (int step : {-1, +1}) {
        const int to = occ[which] + step;
        if (to < 1 || to > chain.n_sites()) continue;
        if (std::find(occ.begin(), occ.end(), to) != occ.end()) continue;
        std::vector<int> moved = occ;
        moved[which] = to;
        std::sort(moved.begin(), moved.end());
        const int bond = std::min(occ[which], to);
        h(sector.index_of(moved), col) = -2.0 * chain.coupling(bond);
      }
    }
  }
  return h;
}

namespace {

void eigen_decompose(const Eigen::MatrixXd& hmat, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hmat);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "dense sector diagonalisation failed");
  }
  values = solver.eigenvalues();
  vectors = solver.eigenvectors();
}

Eigen::VectorXcd phases(const Eigen::VectorXd& values, double t) {
  Eigen::VectorXcd out(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    out[k] = std::complex<double>(std::cos(values[k] * t), -std::sin(values[k] * t));
  }
  return out;
}

}  // namespace

Eigen::VectorXcd sector_propagate(const Eigen::MatrixXd& hmat, int initial, double t) {
  if (initial < 0 || initial >= hmat.rows()) {
    throw Error(ErrorCode::IndexOutOfRange, "initial basis index " + std::to_string(initial));
  }
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  eigen_decompose(hmat, values, vectors);
  const Eigen::VectorXcd overlap = vectors.row(initial).transpose().cast<std::complex<double>>();
  return vectors.cast<std::complex<double>>() * phases(values, t).cwiseProduct(overlap);
}

SectorPropagator::SectorPropagator(const ChainSpec& chain, int excitation_count)
    : basis_(SectorBasis::make(chain.n_sites(), excitation_count)) {
  eigen_decompose(sector_hamiltonian(chain, basis_), values_, vectors_);
}

Eigen::MatrixXcd SectorPropagator::evolution(double t) const {
  const Eigen::MatrixXcd v = vectors_.cast<std::complex<double>>();
  return v * phases(values_, t).asDiagonal() * v.transpose();
}

double oracle_fidelity_2q(const SectorPropagator& one, const SectorPropagator& two,
                          const TransferSetup& setup, double t) {
  if (setup.qubits() != 2) throw Error(ErrorCode::SetupArityMismatch, "oracle fidelity is two-qubit");
  const int n = one.basis().n_sites;
  setup.validate(n);
  const Eigen::MatrixXcd u1 = one.evolution(t);
  const Eigen::MatrixXcd u2 = two.evolution(t);
  const auto& pairs = two.basis();

  // f(from, to) = <to|U|from>, g(to_a, to_b) = <{to_a,to_b}|U|{s1,s2}>.
  auto f = [&](int from, int to) { return u1(to - 1, from - 1); };
  const int s1 = setup.senders[0], s2 = setup.senders[1];
  const int start = pairs.index_of({std::min(s1, s2), std::max(s1, s2)});
  auto g = [&](int a, int b) { return u2(pairs.index_of({std::min(a, b), std::max(a, b)}), start); };

  const int r1 = setup.receivers[0], r2 = setup.receivers[1];
  const std::complex<double> f11 = f(s1, r1), f22 = f(s2, r2), f21 = f(s2, r1), f12 = f(s1, r2);
  const std::complex<double> g0 = g(r1, r2);

  double value = 0.25;
  value += 5.0 / 54.0 * (f11 + f22).real();
  value += 7.0 / 54.0 * (f22 * std::conj(f11)).real();
  value += 5.0 / 54.0 * ((f11 + f22) * std::conj(g0)).real();
  value += (std::norm(f21) + std::norm(f12)) / 54.0;
  value += 5.0 * (std::norm(f22) + std::norm(f11)) / 108.0;
  value += std::norm(g0) / 36.0 + 7.0 * g0.real() / 54.0;
  for (int site = 1; site <= n; ++site) {
    if (site == r1 || site == r2) continue;
    const std::complex<double> ga = g(site, r1), gb = g(site, r2);
    value -= (std::norm(ga) + std::norm(gb)) / 54.0;
    value -= (std::conj(f(s2, site)) * ga + std::conj(f(s1, site)) * gb).real() / 27.0;
  }
  return value;
}

EquivalenceReport run_equivalence(const EquivalenceOptions& options) {
  EquivalenceReport report;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> weak(1e-3, 1e-1);
  std::uniform_real_distribution<double> barrier(1.0, 20.0);
  std::uniform_real_distribution<double> when(0.0, options.t_max);

  for (int n = options.n_min; n <= options.n_max; ++n) {
    for (ProtocolKind kind : kAllProtocolKinds) {
      ProtocolConfig config{kind, 0.0, n};
      if (kind != ProtocolKind::Uniform) config.perturbation = is_weak_kind(kind) ? weak(rng) : barrier(rng);
      const ChainSpec chain = build_chain(config);
      const SpectralDecomposition decomp = diagonalize(chain);
      const SectorPropagator one(chain, 1);
      const SectorPropagator two(chain, 2);
      const TransferSetup setup = TransferSetup::default_for(2, n);
      const auto& pairs = two.basis().states;

      for (int rep = 0; rep < options.times_per_chain; ++rep) {
        const double t = when(rng);
        const AmplitudeMatrix fast = amplitude_matrix(decomp, t);
        const Eigen::MatrixXcd u1 = one.evolution(t);
        const Eigen::MatrixXcd u2 = two.evolution(t);
        for (int a = 1; a <= n; ++a)
          for (int b = 1; b <= n; ++b)
            report.max_dev_single = std::max(report.max_dev_single, std::abs(fast(a, b) - u1(b - 1, a - 1)));
        for (std::size_t from = 0; from < pairs.size(); ++from) {
          report.max_norm_error = std::max(report.max_norm_error, std::abs(u2.col(from).norm() - 1.0));
          for (std::size_t to = 0; to < pairs.size(); ++to) {
            const auto fast_g = two_particle_amplitude(fast, pairs[from][0], pairs[from][1], pairs[to][0], pairs[to][1]);
            report.max_dev_pair = std::max(report.max_dev_pair, std::abs(fast_g - u2(to, from)));
          }
        }
        const double fid_fast = fidelity_2q_exact(fast, setup);
        const double fid_oracle = oracle_fidelity_2q(one, two, setup, t);
        report.max_dev_fidelity = std::max(report.max_dev_fidelity, std::abs(fid_fast - fid_oracle));
        ++report.cases;
      }
    }
  }
  return report;
}

}  // namespace qst::ed
