#include "qst/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>

#include "qst/error.hpp"
#include "qst/format.hpp"

namespace qst {

namespace {

// Spin-basis amplitude <{a,b}| U |{s1,s2}> for distinct sites (0-based),
// i.e. the determinant with both pairs in ascending order.
Complex pair_amplitude(std::span<const Complex> row_lo, std::span<const Complex> row_hi, int a,
                       int b) {
  return a < b ? pair_determinant(row_lo, row_hi, a, b) : pair_determinant(row_lo, row_hi, b, a);
}

void require_qubits(const TransferSetup& setup, int qubits) {
  if (setup.qubits() != qubits) {
    throw Error(ErrorCode::SetupArityMismatch,
                "expected a " + std::to_string(qubits) + "-qubit setup, got " +
                    std::to_string(setup.qubits()));
  }
}

}  // namespace

void TransferSetup::validate(int n_sites) const {
  if (senders.size() != receivers.size() || senders.empty() || senders.size() > 2) {
    throw Error(ErrorCode::InvalidArgument, "senders and receivers must both list 1 or 2 sites");
  }
  std::vector<int> all = senders;
  all.insert(all.end(), receivers.begin(), receivers.end());
  for (int s : all) {
    if (s < 1 || s > n_sites) throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(s));
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw Error(ErrorCode::InvalidArgument, "sender and receiver sites must be distinct");
  }
}

TransferSetup TransferSetup::default_for(int qubits, int n_sites) {
  TransferSetup setup;
  if (qubits == 1) {
    setup = {{1}, {n_sites}};
  } else if (qubits == 2) {
    setup = {{1, 2}, {n_sites - 1, n_sites}};
  } else {
    throw Error(ErrorCode::SetupArityMismatch, "only 1- and 2-qubit transfer is supported");
  }
  setup.validate(n_sites);
  return setup;
}

double fidelity_1q_from_amplitude(Complex f) {
  const double a = std::abs(f);
  // One division keeps |f| = 1 -> 1 and f = 0 -> 1/2 exact.
  return (3.0 + 2.0 * a + a * a) / 6.0;
}

double fidelity_1q(const AmplitudeMatrix& ampl, const TransferSetup& setup) {
  require_qubits(setup, 1);
  setup.validate(ampl.n_sites());
  return fidelity_1q_from_amplitude(ampl(setup.senders[0], setup.receivers[0]));
}

double fidelity_2q_from_rows(std::span<const Complex> row_s1, std::span<const Complex> row_s2,
                             const TransferSetup& setup) {
  require_qubits(setup, 2);
  const int n = static_cast<int>(row_s1.size());
  const int s1 = setup.senders[0] - 1, s2 = setup.senders[1] - 1;
  const int r1 = setup.receivers[0] - 1, r2 = setup.receivers[1] - 1;
  const auto row_lo = s1 < s2 ? row_s1 : row_s2;
  const auto row_hi = s1 < s2 ? row_s2 : row_s1;

  const Complex f11 = row_s1[r1];
  const Complex f22 = row_s2[r2];
  const Complex f21 = row_s2[r1];
  const Complex f12 = row_s1[r2];
  const Complex g = pair_amplitude(row_lo, row_hi, r1, r2);

  double fbar = 0.25 +
                5.0 / 54.0 * std::real(f11 + f22 + 1.4 * f22 * std::conj(f11) + (f11 + f22) * std::conj(g)) +
                1.0 / 54.0 * (std::norm(f21) + std::norm(f12)) +
                5.0 / 108.0 * (std::norm(f22) + std::norm(f11)) + 1.0 / 36.0 * std::norm(g) +
                7.0 / 54.0 * std::real(g);

  double leak = 0.0;
  double cross = 0.0;
  for (int m = 0; m < n; ++m) {
    if (m == r1 || m == r2) continue;
    const Complex g1 = pair_amplitude(row_lo, row_hi, m, r1);
    const Complex g2 = pair_amplitude(row_lo, row_hi, m, r2);
    leak += std::norm(g1) + std::norm(g2);
    cross += std::real(std::conj(row_s2[m]) * g1 + std::conj(row_s1[m]) * g2);
  }
  return fbar - leak / 54.0 - cross / 27.0;
}

double fidelity_2q_exact(const AmplitudeMatrix& ampl, const TransferSetup& setup) {
  require_qubits(setup, 2);
  setup.validate(ampl.n_sites());
  return fidelity_2q_from_rows(ampl.row(setup.senders[0]), ampl.row(setup.senders[1]), setup);
}

double fidelity_2q_perturbative(Complex a, Complex b, Complex c) {
  const double re_a = a.real();
  const double abs2_a = std::norm(a);
  return 0.25 + (10.0 * re_a + 7.0 * std::real(a * a) + 12.0 * abs2_a + 2.0 * std::norm(b) +
                 10.0 * abs2_a * re_a - 10.0 * std::real(std::conj(a) * b * c) -
                 7.0 * std::real(b * c)) /
                    54.0;
}

double fidelity_2q_perturbative(const AmplitudeMatrix& ampl) {
  const int n = ampl.n_sites();
  if (n < 4) throw Error(ErrorCode::InvalidLength, "two-qubit transfer needs N >= 4");
  return fidelity_2q_perturbative(ampl(1, n - 1), ampl(1, n), ampl(2, n - 1));
}

double sextet_re_f1_nm1(const SpectralDecomposition& decomp, double t) {
  const int n = decomp.size();
  double sum = 0.0;
  for (int k : sextet_indices(n)) {
    sum += std::cos(decomp.eigenvalue(k) * t) * decomp.component(0, k) * decomp.component(n - 2, k);
  }
  return sum;
}

double ref1N_closed_form(const SpectralDecomposition& decomp, double t) {
  const double dw = rabi_gap(decomp, RabiMode::SextetN6n);
  return 0.5 * std::cos(2.0 * t) * (1.0 + std::cos(dw * t));
}

Complex rabi_amplitude_1q(const SpectralDecomposition& decomp, double t) {
  const BiLocalPair pair = find_bilocal_pair(decomp);
  const int last = decomp.size() - 1;
  Complex f = 0.0;
  for (int k : {pair.upper, pair.lower}) {
    const double e = decomp.eigenvalue(k);
    f += Complex(std::cos(e * t), -std::sin(e * t)) * (decomp.component(last, k) * decomp.component(0, k));
  }
  return f;
}

FidelityEvaluator::FidelityEvaluator(const SpectralDecomposition& decomp, TransferSetup setup)
    : prop_(decomp), setup_(std::move(setup)) {
  setup_.validate(decomp.size());
  const int n = decomp.size();
  phases_.resize(n);
  if (setup_.qubits() == 1) {
    // row1_ holds a_{s,k} a_{r,k}; f = sum_k phase_k row1_[k].
    row1_.resize(n);
    for (int k = 0; k < n; ++k) {
      row1_[k] = decomp.component(setup_.senders[0] - 1, k) * decomp.component(setup_.receivers[0] - 1, k);
    }
  } else {
    row1_.resize(n);
    row2_.resize(n);
  }
}

FidelityEvaluator::Sample FidelityEvaluator::operator()(double t) {
  prop_.phases(t, phases_);
  if (setup_.qubits() == 1) {
    Complex f = 0.0;
    for (std::size_t k = 0; k < phases_.size(); ++k) f += phases_[k] * row1_[k];
    return {fidelity_1q_from_amplitude(f), f, 0.0};
  }
  prop_.row(setup_.senders[0], phases_, row1_);
  prop_.row(setup_.senders[1], phases_, row2_);
  const int r1 = setup_.receivers[0] - 1, r2 = setup_.receivers[1] - 1;
  const bool ordered = setup_.senders[0] < setup_.senders[1];
  const auto& lo = ordered ? row1_ : row2_;
  const auto& hi = ordered ? row2_ : row1_;
  const Complex g = r1 < r2 ? pair_determinant(lo, hi, r1, r2) : pair_determinant(lo, hi, r2, r1);
  return {fidelity_2q_from_rows(row1_, row2_, setup_), row1_[r1], g};
}

FidelityTrace fidelity_trace(const SpectralDecomposition& decomp, const TransferSetup& setup,
                             std::span<const double> times, int jobs) {
  const std::size_t count = times.size();
  FidelityTrace trace;
  trace.times.assign(times.begin(), times.end());
  trace.fbar.resize(count);
  trace.re_f.resize(count);
  trace.abs_f.resize(count);
  const bool two = setup.qubits() == 2;
  if (two) trace.abs_g.resize(count);

  auto work = [&](std::size_t begin, std::size_t end) {
    FidelityEvaluator eval(decomp, setup);
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = eval(times[i]);
      trace.fbar[i] = s.fbar;
      trace.re_f[i] = s.f_s1r1.real();
      trace.abs_f[i] = std::abs(s.f_s1r1);
      if (two) trace.abs_g[i] = std::abs(s.g);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    work(0, count);
    return trace;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) threads.emplace_back(work, begin, end);
  }
  for (auto& th : threads) th.join();
  return trace;
}

void write_trace_csv(std::ostream& out, const FidelityTrace& trace) {
  out << "time,fbar,re_f_s1r1,abs_f_s1r1,abs_g\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_number(trace.times[i]) << ',' << format_number(trace.fbar[i]) << ','
        << format_number(trace.re_f[i]) << ',' << format_number(trace.abs_f[i]) << ',';
    if (!trace.abs_g.empty()) out << format_number(trace.abs_g[i]);
    out << '\n';
  }
}

}  // namespace qst
