#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qst/analysis.hpp"
#include "qst/error.hpp"
#include "qst/spectral.hpp"

using namespace qst;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::pair<double, double>> samples(std::initializer_list<double> xs, auto&& tau) {
  std::vector<std::pair<double, double>> out;
  for (double x : xs) out.emplace_back(x, tau(x));
  return out;
}

}  // namespace

TEST_CASE("power-law and exponential fits on synthetic data") {
  const ScalingFit inv = fit_power_law(samples({1, 2, 5, 10, 40}, [](double x) { return 7.0 / x; }));
  CHECK(inv.exponent == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(inv.prefactor == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(inv.r_squared == doctest::Approx(1.0));
  CHECK(inv.samples.size() == 5);

  const ScalingFit sq = fit_power_law(samples({10, 20, 30, 40, 50}, [](double x) { return x * x; }));
  CHECK(sq.exponent == doctest::Approx(2.0).epsilon(1e-12));

  const ScalingFit ex = fit_exponential(samples({4, 5, 6, 7}, [](double x) { return 3.0 * std::pow(5.0, x); }));
  CHECK(ex.exponent == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(ex.prefactor == doctest::Approx(3.0).epsilon(1e-10));

  const ScalingFit noisy = fit_power_law(std::vector<std::pair<double, double>>{{1, 1.0}, {2, 3.0}, {3, 2.0}});
  CHECK(noisy.r_squared < 1.0);

  CHECK_THROWS_AS(fit_power_law(samples({1, 2}, [](double x) { return x; })), Error);
  CHECK_THROWS_AS(fit_power_law(samples({1, 2, -3}, [](double x) { return x * x; })), Error);
  CHECK_THROWS_AS(fit_power_law(samples({1, 2, 3}, [](double) { return 0.0; })), Error);
  try {
    fit_power_law(samples({2, 2, 2}, [](double x) { return x; }));
    FAIL("expected DegenerateSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSamples);
  }
  // Exponential fits accept non-positive abscissae.
  CHECK_NOTHROW(fit_exponential(samples({-1, 0, 1}, [](double x) { return std::exp(x); })));
}

TEST_CASE("fit JSON layout") {
  ScalingFit fit{-1.0000000000001, 7.0, 1.0, {{1, 7}, {2, 3.5}, {3, 7.0 / 3}}, 2};
  CHECK(fit_json(fit) == R"({"exponent":-1.0,"prefactor":7.0,"r_squared":1.0,"n_samples":3,"n_excluded":2})");
}

TEST_CASE("two-site chain transfers at pi/4") {
  const ChainSpec chain = build_chain({ProtocolKind::Uniform, 0.0, 2});
  const TransferResult r = find_transfer_time(chain, TransferSetup::default_for(1, 2), 0.999, {10.0, true});
  REQUIRE(r.reached);
  CHECK(r.tau <= kPi / 4.0);
  CHECK(r.tau > kPi / 4.0 - 0.05);
  CHECK(r.fbar_at_tau >= 0.999);
  CHECK(r.t_peak == doctest::Approx(kPi / 4.0).epsilon(1e-3));
  CHECK(r.fbar_peak == doctest::Approx(1.0).epsilon(1e-5));
  // Both levels are bi-localized on a two-site chain: dw = 4, pi/dw = pi/4.
  CHECK(r.tau_predicted == doctest::Approx(kPi / 4.0));
}

TEST_CASE("transfer search reports not-reached and rejects bad thresholds") {
  const ChainSpec chain = build_chain({ProtocolKind::Uniform, 0.0, 24});
  const TransferResult r = find_transfer_time(chain, TransferSetup::default_for(2, 24), 0.97, {200.0, false});
  CHECK_FALSE(r.reached);
  CHECK(std::isnan(r.tau));
  CHECK(r.t_max == 200.0);
  CHECK_THROWS_AS(find_transfer_time(chain, TransferSetup::default_for(2, 24), 1.0), Error);
  CHECK_THROWS_AS(find_transfer_time(chain, TransferSetup::default_for(2, 24), 0.0), Error);
  // Default window without a predicted gap.
  CHECK(find_transfer_time(chain, TransferSetup::default_for(2, 24), 0.97).t_max == 24000.0);
}

TEST_CASE("transfer time is monotone in the threshold") {
  const ChainSpec chain = build_chain({ProtocolKind::WeakBlock2Q, 0.01, 12});
  const TransferSetup setup = TransferSetup::default_for(2, 12);
  double previous = 0.0;
  for (double threshold : {0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.93, 0.95, 0.97, 0.98}) {
    const TransferResult r = find_transfer_time(chain, setup, threshold);
    REQUIRE(r.reached);
    CHECK(r.tau >= previous);
    CHECK(r.fbar_at_tau >= threshold);
    previous = r.tau;
  }
}

TEST_CASE("N = 6n weak-block transfer time tracks pi/dw") {
  const ChainSpec chain = build_chain({ProtocolKind::WeakBlock2Q, 0.005, 18});
  const TransferResult r = find_transfer_time(chain, TransferSetup::default_for(2, 18), 0.97, {0.0, true});
  REQUIRE(r.reached);
  CHECK(r.t_max == doctest::Approx(20.0 * r.tau_predicted));
  CHECK(std::abs(r.t_peak - r.tau_predicted) < 10.0);
  CHECK(r.tau <= r.t_peak);
  CHECK(r.fbar_peak > 0.97);
}

TEST_CASE("fidelity peak of N = 6n chains lies within a few fast periods of pi/dw") {
  // O(1) offset in units of the fast period: |t_peak - pi/dw| <= pi/4 * 10.
  for (int n : {12, 18, 24, 30, 36}) {
    for (double j0 : {0.01, 0.005, 0.002, 0.001}) {
      CAPTURE(n);
      CAPTURE(j0);
      const TransferResult r = find_transfer_time(build_chain({ProtocolKind::WeakBlock2Q, j0, n}),
                                                  TransferSetup::default_for(2, n), 0.97, {0.0, true});
      REQUIRE(r.reached);
      CHECK(std::abs(r.t_peak - r.tau_predicted) <= kPi / 4.0 * 10.0);
    }
  }
}

TEST_CASE("peak location agrees with a dense scan") {
  const ChainSpec chain = build_chain({ProtocolKind::WeakBlock2Q, 0.005, 12});
  const TransferSetup setup = TransferSetup::default_for(2, 12);
  const TransferResult r = find_transfer_time(chain, setup, 0.97, {0.0, true});
  REQUIRE(r.reached);
  const SpectralDecomposition d = diagonalize(chain);
  FidelityEvaluator eval(d, setup);
  double best = 0.0;
  for (double t = r.tau; t <= r.tau + 300.0; t += 1e-3) best = std::max(best, eval.fbar(t));
  CHECK(r.fbar_peak >= best - 1e-9);
  CHECK(eval.fbar(r.t_peak) == doctest::Approx(r.fbar_peak).epsilon(1e-15));
}

TEST_CASE("sweeps are ordered, deterministic and independent of jobs") {
  SweepRequest req{ProtocolKind::WeakBlock2Q, {12, 18}, {0.02, 0.01}, 0.97, 0.0, 1};
  const auto serial = sweep(req);
  req.jobs = 3;
  const auto parallel = sweep(req);
  REQUIRE(serial.size() == 4);
  CHECK(serial[1].n_sites == 12);
  CHECK(serial[1].xi == 0.01);
  CHECK(serial[2].n_sites == 18);
  std::ostringstream a, b;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("protocol,N,xi,threshold,tau,fbar_at_tau,delta_omega,tau_predicted,reached\n"
                      "weak-block-2q,12,0.02,0.97,",
                      0) == 0);

  std::ostringstream empty;
  write_sweep_csv(empty, sweep({ProtocolKind::WeakBlock2Q, {}, {}, 0.97, 0.0, 2}));
  CHECK(empty.str() == "protocol,N,xi,threshold,tau,fbar_at_tau,delta_omega,tau_predicted,reached\n");

  CHECK_THROWS_AS(sweep({ProtocolKind::WeakBlock2Q, {3}, {0.01}, 0.97, 0.0, 1}), Error);
}

TEST_CASE("fit_sweep excludes unreached points and checks the axis") {
  std::vector<SweepPoint> points;
  for (double xi : {0.01, 0.02, 0.04, 0.08}) {
    SweepPoint p{ProtocolKind::WeakBlock2Q, 24, xi, {}, {}};
    p.result.reached = xi != 0.08;
    p.result.tau = 5.0 / xi;
    points.push_back(p);
  }
  const ScalingFit fit = fit_sweep(points, SweepAxis::Xi);
  CHECK(fit.exponent == doctest::Approx(-1.0));
  CHECK(fit.n_excluded == 1);
  CHECK(fit.samples.size() == 3);
  CHECK_THROWS_AS(fit_sweep(points, SweepAxis::N), Error);

  CHECK_THROWS_AS(scaling_exponent_1q(ProtocolKind::WeakBlock2Q, 20, std::vector<double>{0.1, 0.2, 0.3}), Error);
}
