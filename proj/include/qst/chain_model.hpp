#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qst {

/// Open XX chain with nearest-neighbour couplings J_i (i = 1..N-1) and
/// local fields h_i (i = 1..N). Energies are in units of the bulk coupling.
///
/// Immutable once constructed; the constructor enforces N >= 2, the vector
/// sizes and J_i > 0.
class ChainSpec {
 public:
  ChainSpec(std::vector<double> couplings, std::vector<double> fields);

  int n_sites() const noexcept { return static_cast<int>(fields_.size()); }
  const std::vector<double>& couplings() const noexcept { return couplings_; }
  const std::vector<double>& fields() const noexcept { return fields_; }

  /// J_i, 1-based bond index i in 1..N-1.
  double coupling(int bond) const;
  /// h_i, 1-based site index i in 1..N.
  double field(int site) const;

  /// J_i == J_{N-i} and h_i == h_{N+1-i}, compared exactly.
  bool is_mirror_symmetric() const noexcept;

  bool operator==(const ChainSpec&) const = default;

 private:
  std::vector<double> couplings_;
  std::vector<double> fields_;
};

enum class ProtocolKind {
  Uniform,
  WeakEdge1Q,      // J_1 = J_{N-1} = xi
  BarrierEdge1Q,   // h_1 = h_N = xi
  BarrierNN1Q,     // h_2 = h_{N-1} = xi
  WeakBlock2Q,     // J_2 = J_{N-2} = xi
  BarrierBlock2Q,  // h_3 = h_{N-2} = xi
};

inline constexpr ProtocolKind kAllProtocolKinds[] = {
    ProtocolKind::Uniform,     ProtocolKind::WeakEdge1Q,  ProtocolKind::BarrierEdge1Q,
    ProtocolKind::BarrierNN1Q, ProtocolKind::WeakBlock2Q, ProtocolKind::BarrierBlock2Q,
};

/// Command-line spelling, e.g. "weak-block-2q".
std::string_view protocol_name(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol(std::string_view name);

/// Number of sender (= receiver) qubits the protocol is designed for.
int protocol_qubits(ProtocolKind kind);
bool is_weak_kind(ProtocolKind kind);
/// Smallest chain length the protocol can be built on.
int min_sites(ProtocolKind kind);

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::Uniform;
  /// J0 for the weak kinds, the barrier field for the barrier kinds; ignored
  /// for Uniform.
  double perturbation = 0.0;
  int n_sites = 2;
};

ChainSpec build_chain(const ProtocolConfig& config);

/// Hard-core (U -> infinity) mapping of an extended Bose-Hubbard chain onto
/// the XXZ model: K = 2t(f + 1/2), anisotropy Delta = V / K.
struct EffectiveXXZParams {
  double coupling_k;
  double anisotropy_delta;
};

EffectiveXXZParams bose_hubbard_to_xxz(double hopping_t, double nn_interaction_v, double filling_f);

}  // namespace qst
