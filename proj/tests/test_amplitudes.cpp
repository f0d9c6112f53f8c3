#include <cmath>
#include <complex>

#include "doctest.h"
#include "qst/amplitudes.hpp"
#include "qst/error.hpp"

using namespace qst;

namespace {

SpectralDecomposition decomp_of(ProtocolKind kind, double xi, int n) { return diagonalize(build_chain({kind, xi, n})); }

}  // namespace

TEST_CASE("two-site chain: f_1^2(t) = i sin 2t") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::Uniform, 0.0, 2);
  for (double t : {0.0, 0.3, 0.785398163397448, 2.0, 17.5}) {
    const Complex f = single_amplitude(d, 1, 2, t);
    CHECK(std::abs(f - Complex(0.0, std::sin(2.0 * t))) < 1e-14);
    CHECK(std::abs(single_amplitude(d, 1, 1, t) - std::cos(2.0 * t)) < 1e-14);
  }
}

TEST_CASE("amplitude matrix is unitary, symmetric and the identity at t = 0") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.01, 13);
  const AmplitudeMatrix zero = amplitude_matrix(d, 0.0);
  for (int n = 1; n <= 13; ++n)
    for (int m = 1; m <= 13; ++m) CHECK(std::abs(zero(n, m) - (n == m ? 1.0 : 0.0)) < 1e-14);

  for (double t : {0.7, 31.0, 812.25}) {
    const AmplitudeMatrix a = amplitude_matrix(d, t);
    for (int n = 1; n <= 13; ++n) {
      for (int m = 1; m <= 13; ++m) {
        CHECK(a(n, m) == a(m, n));
        Complex dot = 0.0;
        for (int j = 1; j <= 13; ++j) dot += a(n, j) * std::conj(a(m, j));
        CHECK(std::abs(dot - (n == m ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("group property U(t1 + t2) = U(t1) U(t2)") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::BarrierNN1Q, 10.0, 9);
  const double t1 = 3.7, t2 = 121.9;
  const AmplitudeMatrix a = amplitude_matrix(d, t1), b = amplitude_matrix(d, t2);
  const AmplitudeMatrix ab = amplitude_matrix(d, t1 + t2);
  for (int n = 1; n <= 9; ++n) {
    for (int m = 1; m <= 9; ++m) {
      Complex sum = 0.0;
      for (int j = 1; j <= 9; ++j) sum += a(n, j) * b(j, m);
      CHECK(std::abs(sum - ab(n, m)) < 1e-12);
    }
  }
}

TEST_CASE("propagator rows agree with the amplitude matrix") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakEdge1Q, 0.05, 11);
  const Propagator p(d);
  std::vector<Complex> phases(11), row(11);
  const double t = 57.3;
  p.phases(t, phases);
  const AmplitudeMatrix a = amplitude_matrix(d, t);
  for (int source = 1; source <= 11; ++source) {
    p.row(source, phases, row);
    for (int m = 1; m <= 11; ++m) {
      CHECK(std::abs(row[m - 1] - a(source, m)) < 1e-14);
      CHECK(std::abs(p.amplitude(source, m, t) - a(source, m)) < 1e-14);
    }
  }
  CHECK_THROWS_AS(a(0, 1), Error);
  CHECK_THROWS_AS(a.row(12), Error);
}

TEST_CASE("two-particle amplitude is the ordered-pair determinant") {
  const SpectralDecomposition d = decomp_of(ProtocolKind::WeakBlock2Q, 0.1, 8);
  const AmplitudeMatrix a = amplitude_matrix(d, 9.1);
  const Complex g = two_particle_amplitude(a, 1, 2, 7, 8);
  CHECK(std::abs(g - (a(1, 7) * a(2, 8) - a(1, 8) * a(2, 7))) < 1e-15);
  CHECK(pair_determinant(a.row(1), a.row(2), 7, 6) == -pair_determinant(a.row(1), a.row(2), 6, 7));
  CHECK(pair_determinant(a.row(2), a.row(1), 6, 7) == -pair_determinant(a.row(1), a.row(2), 6, 7));
  CHECK(pair_determinant(a.row(1), a.row(2), 3, 3) == Complex(0.0));

  // At t = 0 the pair amplitude is a Kronecker delta on ordered pairs.
  const AmplitudeMatrix z = amplitude_matrix(d, 0.0);
  CHECK(std::abs(two_particle_amplitude(z, 2, 5, 2, 5) - 1.0) < 1e-14);
  CHECK(std::abs(two_particle_amplitude(z, 2, 5, 2, 6)) < 1e-14);

  try {
    two_particle_amplitude(a, 2, 1, 7, 8);
    FAIL("expected UnorderedPair");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnorderedPair);
  }
  CHECK_THROWS_AS(two_particle_amplitude(a, 1, 2, 8, 8), Error);
}
