#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qst/error.hpp"
#include "qst/fidelity.hpp"

using namespace qst;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralDecomposition decomp_of(ProtocolKind kind, double xi, int n) { return diagonalize(build_chain({kind, xi, n})); }

}  // namespace

TEST_CASE("transfer setups") {
  CHECK(TransferSetup::default_for(1, 9).receivers == std::vector<int>{9});
  CHECK(TransferSetup::default_for(2, 9).senders == std::vector<int>{1, 2});
  CHECK(TransferSetup::default_for(2, 9).receivers == std::vector<int>{8, 9});
  CHECK_THROWS_AS(TransferSetup::default_for(3, 9), Error);
  CHECK_THROWS_AS(TransferSetup::default_for(2, 3), Error);
  CHECK_THROWS_AS((TransferSetup{{1, 2}, {2, 5}}.validate(6)), Error);
  CHECK_THROWS_AS((TransferSetup{{1}, {7}}.validate(6)), Error);
  CHECK_THROWS_AS((TransferSetup{{1, 2}, {5}}.validate(6)), Error);
  CHECK_NOTHROW((TransferSetup{{2, 1}, {6, 5}}.validate(6)));
}

TEST_CASE("one-qubit fidelity formula") {
  CHECK(fidelity_1q_from_amplitude(0.0) == 0.5);
  CHECK(fidelity_1q_from_amplitude(1.0) == 1.0);
  CHECK(fidelity_1q_from_amplitude(Complex(0.0, -1.0)) == 1.0);
  CHECK(fidelity_1q_from_amplitude(0.5) == doctest::Approx(0.5 + 0.5 / 3.0 + 0.25 / 6.0));
  CHECK(fidelity_1q_from_amplitude(Complex(0.6, 0.8)) == doctest::Approx(1.0));

  // Perfect transfer across a two-site chain at t = pi/4.
  const SpectralDecomposition d = decomp_of(ProtocolKind::Uniform, 0.0, 2);
  CHECK(fidelity_1q(amplitude_matrix(d, kPi / 4.0), TransferSetup::default_for(1, 2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity_1q(amplitude_matrix(d, 0.1), TransferSetup::default_for(2, 4)), Error);
}

TEST_CASE("two-qubit fidelity at reference points") {
  const TransferSetup setup = TransferSetup::default_for(2, 5);
  std::vector<Complex> s1(5), s2(5);

  // Ideal transfer: f_{s1}^{r1} = f_{s2}^{r2} = 1, hence g = 1.
  s1[3] = 1.0;
  s2[4] = 1.0;
  CHECK(fidelity_2q_from_rows(s1, s2, setup) == doctest::Approx(1.0).epsilon(1e-15));

  // Nothing moves: F = 1/4.
  std::fill(s1.begin(), s1.end(), 0.0);
  std::fill(s2.begin(), s2.end(), 0.0);
  s1[0] = 1.0;
  s2[1] = 1.0;
  CHECK(fidelity_2q_from_rows(s1, s2, setup) == doctest::Approx(0.25));

  // Both qubits swapped onto the wrong receiver: g = -1.
  std::fill(s1.begin(), s1.end(), 0.0);
  std::fill(s2.begin(), s2.end(), 0.0);
  s1[4] = 1.0;
  s2[3] = 1.0;
  const double swapped = 0.25 + (2.0 / 54.0) + 1.0 / 36.0 - 7.0 / 54.0;
  CHECK(fidelity_2q_from_rows(s1, s2, setup) == doctest::Approx(swapped));

  for (ProtocolKind kind : kAllProtocolKinds) {
    const SpectralDecomposition d = decomp_of(kind, is_weak_kind(kind) ? 0.02 : 4.0, 10);
    CHECK(fidelity_2q_exact(amplitude_matrix(d, 0.0), TransferSetup::default_for(2, 10)) ==
          doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("two-qubit fidelity stays inside [0, 1] and is sender-order aware") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.05, 12);
  const TransferSetup forward{{1, 2}, {11, 12}};
  const TransferSetup crossed{{1, 2}, {12, 11}};
  bool crossed_differs = false;
  for (double t = 0.0; t < 400.0; t += 3.3) {
    const AmplitudeMatrix a = amplitude_matrix(d, t);
    const double f = fidelity_2q_exact(a, forward);
    CHECK(f >= -1e-12);
    CHECK(f <= 1.0 + 1e-12);
    if (std::abs(f - fidelity_2q_exact(a, crossed)) > 1e-6) crossed_differs = true;
  }
  CHECK(crossed_differs);
}

TEST_CASE("perturbative two-qubit fidelity") {
  CHECK(fidelity_2q_perturbative(1.0, 0.0, 0.0) == doctest::Approx(0.25 + 39.0 / 54.0));
  CHECK(fidelity_2q_perturbative(0.0, 0.0, 0.0) == doctest::Approx(0.25));

  // Around the transfer time the chain is mirror symmetric and leakage is
  // negligible, so the approximation differs from the exact value by the
  // |g|^2/36 term it omits, which alone is worth 1/36 at the fidelity peak.
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.001, 24);
  const double tau = kPi / rabi_gap(d, RabiMode::SextetN6n);
  const TransferSetup setup = TransferSetup::default_for(2, 24);
  double residual = 0.0, gap = 0.0;
  for (double t = tau - 20.0; t <= tau + 20.0; t += 0.25) {
    const AmplitudeMatrix a = amplitude_matrix(d, t);
    const double diff = fidelity_2q_exact(a, setup) - fidelity_2q_perturbative(a);
    residual = std::max(residual, std::abs(diff - std::norm(two_particle_amplitude(a, 1, 2, 23, 24)) / 36.0));
    gap = std::max(gap, std::abs(diff));
  }
  CHECK(residual < 1e-3);
  CHECK(gap == doctest::Approx(1.0 / 36.0).epsilon(0.01));
}

TEST_CASE("two-level truncation tracks f_1^N on the weak-edge chain") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakEdge1Q, 0.01, 20);
  const double period = 2.0 * kPi / rabi_gap(d, RabiMode::BiLocal1Q);
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = period * i / 4000.0;
    worst = std::max(worst, std::abs(rabi_amplitude_1q(d, t) - single_amplitude(d, 1, 20, t)));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("sextet-restricted Re f_1^{N-1}") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.01, 12);
  const double dw = rabi_gap(d, RabiMode::SextetN6n);
  CHECK(sextet_re_f1_nm1(d, 0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  CHECK(ref1N_closed_form(d, 0.0) == doctest::Approx(1.0));
  // Envelope -cos(2t)/2 (1 - cos dw t): vanishes at t = 0 and peaks in
  // magnitude at half a Rabi period.
  double worst = 0.0, peak = 0.0, closed_peak = 0.0;
  for (double t = 0.0; t <= 2.0 * kPi / dw; t += 0.05) {
    const double re = sextet_re_f1_nm1(d, t);
    worst = std::max(worst, std::abs(re + 0.5 * std::cos(2.0 * t) * (1.0 - std::cos(dw * t))));
    peak = std::max(peak, std::abs(re));
    closed_peak = std::max(closed_peak, std::abs(ref1N_closed_form(d, t)));
  }
  CHECK(worst < 0.05);
  CHECK(std::abs(peak - closed_peak) < 0.05);
}

TEST_CASE("fidelity traces do not depend on the number of jobs") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.01, 12);
  std::vector<double> times;
  for (int i = 0; i < 997; ++i) times.push_back(0.37 * i);
  const TransferSetup setup = TransferSetup::default_for(2, 12);
  const FidelityTrace one = fidelity_trace(d, setup, times, 1);
  const FidelityTrace many = fidelity_trace(d, setup, times, 7);
  CHECK(one.fbar == many.fbar);
  CHECK(one.abs_g == many.abs_g);

  FidelityEvaluator eval(d, setup);
  const AmplitudeMatrix a = amplitude_matrix(d, times[500]);
  CHECK(one.fbar[500] == doctest::Approx(fidelity_2q_exact(a, setup)).epsilon(1e-13));
  CHECK(eval.fbar(times[500]) == doctest::Approx(one.fbar[500]).epsilon(1e-15));

  std::ostringstream csv;
  write_trace_csv(csv, fidelity_trace(d, setup, std::vector<double>{0.0, 0.5}, 1));
  const std::string text = csv.str();
  CHECK(text.rfind("time,fbar,re_f_s1r1,abs_f_s1r1,abs_g\n0,0.25,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);

  // One-qubit traces leave the pair column empty.
  std::ostringstream csv1;
  write_trace_csv(csv1, fidelity_trace(d, TransferSetup::default_for(1, 12), std::vector<double>{0.0}, 1));
  CHECK(csv1.str().rfind("time,fbar,re_f_s1r1,abs_f_s1r1,abs_g\n0,0.5,", 0) == 0);
  CHECK(csv1.str().back() == '\n');
  CHECK(csv1.str()[csv1.str().size() - 2] == ',');
}
