#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "qst/amplitudes.hpp"

namespace qst {

/// Best two-qubit average fidelity reachable with local operations and
/// classical communication; a quantum channel must beat it.
inline constexpr double kLoccFidelity = 2.0 / 5.0;

/// Sender and receiver sites (1-based, same length, 1 or 2 each). The qubit
/// on senders[i] is meant to arrive on receivers[i].
struct TransferSetup {
  std::vector<int> senders;
  std::vector<int> receivers;

  int qubits() const noexcept { return static_cast<int>(senders.size()); }
  /// Throws InvalidArgument / IndexOutOfRange if the lists are malformed.
  void validate(int n_sites) const;

  /// (1) -> (N) for one qubit, (1,2) -> (N-1,N) for two.
  static TransferSetup default_for(int qubits, int n_sites);
};

/// 1/2 + |f|/3 + |f|^2/6
double fidelity_1q_from_amplitude(Complex f);
double fidelity_1q(const AmplitudeMatrix& ampl, const TransferSetup& setup);

/// Two-qubit average fidelity from the single- and two-particle amplitudes.
/// The leakage sums run over every site outside the receiver pair, sender
/// sites included. Two-particle amplitudes are taken between unordered site
/// pairs, i.e. in the spin basis.
double fidelity_2q_exact(const AmplitudeMatrix& ampl, const TransferSetup& setup);

/// Same quantity from the two sender rows only: row_s1[m] = f_{s1}^{m+1}.
double fidelity_2q_from_rows(std::span<const Complex> row_s1, std::span<const Complex> row_s2,
                             const TransferSetup& setup);

/// Weak-coupling approximation for the default (1,2) -> (N-1,N) blocks built
/// from f_1^{N-1}, f_1^N and f_2^{N-1} alone.
double fidelity_2q_perturbative(const AmplitudeMatrix& ampl);
double fidelity_2q_perturbative(Complex f_1_nm1, Complex f_1_n, Complex f_2_nm1);

/// Re f_1^{N-1} restricted to the six quasi-degenerate levels of an N = 6n
/// weak-block chain.
double sextet_re_f1_nm1(const SpectralDecomposition& decomp, double t);

/// cos(2t)/2 * (1 + cos(dw t)), with dw the sextet Rabi gap.
double ref1N_closed_form(const SpectralDecomposition& decomp, double t);

/// Two-level truncation of f_1^N(t) on the bi-localized pair, each level
/// carrying its own phase exp(-i eps_j t).
Complex rabi_amplitude_1q(const SpectralDecomposition& decomp, double t);

/// F(t) samples with per-time diagnostics. abs_g is empty for one-qubit
/// setups.
struct FidelityTrace {
  std::vector<double> times;
  std::vector<double> fbar;
  std::vector<double> re_f;
  std::vector<double> abs_f;
  std::vector<double> abs_g;
};

/// Evaluates the trace on `times`, reusing the decomposition; `jobs` > 1
/// splits the grid across threads (output does not depend on it).
FidelityTrace fidelity_trace(const SpectralDecomposition& decomp, const TransferSetup& setup,
                             std::span<const double> times, int jobs = 1);

/// Columns time,fbar,re_f_s1r1,abs_f_s1r1,abs_g.
void write_trace_csv(std::ostream& out, const FidelityTrace& trace);

/// Reusable evaluator of F(t) for a fixed setup; not thread-safe (owns
/// scratch buffers), create one per thread.
class FidelityEvaluator {
 public:
  FidelityEvaluator(const SpectralDecomposition& decomp, TransferSetup setup);

  struct Sample {
    double fbar;
    Complex f_s1r1;
    Complex g;  // zero for one-qubit setups
  };
  Sample operator()(double t);
  double fbar(double t) { return (*this)(t).fbar; }
  const TransferSetup& setup() const noexcept { return setup_; }

 private:
  Propagator prop_;
  TransferSetup setup_;
  std::vector<Complex> phases_;
  std::vector<Complex> row1_;
  std::vector<Complex> row2_;
};

}  // namespace qst
