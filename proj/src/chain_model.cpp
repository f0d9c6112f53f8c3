#include "qst/chain_model.hpp"

#include <cmath>
#include <string>

#include "qst/error.hpp"

namespace qst {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::NonPositivePerturbation: return "NonPositivePerturbation";
    case ErrorCode::NonHalfIntegerFilling: return "NonHalfIntegerFilling";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnorderedPair: return "UnorderedPair";
    case ErrorCode::LocalizationNotFound: return "LocalizationNotFound";
    case ErrorCode::SextetMismatch: return "SextetMismatch";
    case ErrorCode::SetupArityMismatch: return "SetupArityMismatch";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::DegenerateSamples: return "DegenerateSamples";
  }
  return "Unknown";
}

ChainSpec::ChainSpec(std::vector<double> couplings, std::vector<double> fields)
    : couplings_(std::move(couplings)), fields_(std::move(fields)) {
  if (fields_.size() < 2) {
    throw Error(ErrorCode::InvalidLength, "a chain needs at least 2 sites");
  }
  if (couplings_.size() + 1 != fields_.size()) {
    throw Error(ErrorCode::InvalidLength, "expected N-1 couplings for N = " +
                                              std::to_string(fields_.size()) + " sites, got " +
                                              std::to_string(couplings_.size()));
  }
  for (double j : couplings_) {
    if (!(j > 0.0) || !std::isfinite(j)) {
      throw Error(ErrorCode::NonPositivePerturbation, "couplings must be finite and positive");
    }
  }
  for (double h : fields_) {
    if (!std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "fields must be finite");
  }
}

double ChainSpec::coupling(int bond) const {
  if (bond < 1 || bond >= n_sites()) {
    throw Error(ErrorCode::IndexOutOfRange, "bond " + std::to_string(bond));
  }
  return couplings_[bond - 1];
}

double ChainSpec::field(int site) const {
  if (site < 1 || site > n_sites()) {
    throw Error(ErrorCode::IndexOutOfRange, "site " + std::to_string(site));
  }
  return fields_[site - 1];
}

bool ChainSpec::is_mirror_symmetric() const noexcept {
  const std::size_t n = fields_.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    if (fields_[i] != fields_[n - 1 - i]) return false;
  }
  const std::size_t b = couplings_.size();
  for (std::size_t i = 0; i < b / 2; ++i) {
    if (couplings_[i] != couplings_[b - 1 - i]) return false;
  }
  return true;
}

std::string_view protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Uniform: return "uniform";
    case ProtocolKind::WeakEdge1Q: return "weak-edge-1q";
    case ProtocolKind::BarrierEdge1Q: return "barrier-edge-1q";
    case ProtocolKind::BarrierNN1Q: return "barrier-nn-1q";
    case ProtocolKind::WeakBlock2Q: return "weak-block-2q";
    case ProtocolKind::BarrierBlock2Q: return "barrier-block-2q";
  }
  return "unknown";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  for (ProtocolKind kind : kAllProtocolKinds) {
    if (protocol_name(kind) == name) return kind;
  }
  return std::nullopt;
}

int protocol_qubits(ProtocolKind kind) {
  return (kind == ProtocolKind::WeakBlock2Q || kind == ProtocolKind::BarrierBlock2Q) ? 2 : 1;
}

bool is_weak_kind(ProtocolKind kind) {
  return kind == ProtocolKind::WeakEdge1Q || kind == ProtocolKind::WeakBlock2Q;
}

int min_sites(ProtocolKind kind) {
  return protocol_qubits(kind) == 2 ? 4 : 2;
}

ChainSpec build_chain(const ProtocolConfig& config) {
  const int n = config.n_sites;
  if (n < min_sites(config.kind)) {
    throw Error(ErrorCode::InvalidLength, std::string(protocol_name(config.kind)) +
                                              " needs at least " +
                                              std::to_string(min_sites(config.kind)) + " sites");
  }
  const double xi = config.perturbation;
  if (is_weak_kind(config.kind) && !(xi > 0.0)) {
    throw Error(ErrorCode::NonPositivePerturbation, "weak coupling must be positive");
  }
  if (!std::isfinite(xi)) throw Error(ErrorCode::InvalidArgument, "perturbation must be finite");

  std::vector<double> j(n - 1, 1.0);
  std::vector<double> h(n, 0.0);
  switch (config.kind) {
    case ProtocolKind::Uniform: break;
    case ProtocolKind::WeakEdge1Q:
      j.front() = xi;
      j.back() = xi;
      break;
    case ProtocolKind::BarrierEdge1Q:
      h.front() = xi;
      h.back() = xi;
      break;
    case ProtocolKind::BarrierNN1Q:
      h[1] = xi;
      h[n - 2] = xi;
      break;
    case ProtocolKind::WeakBlock2Q:
      j[1] = xi;
      j[n - 3] = xi;
      break;
    case ProtocolKind::BarrierBlock2Q:
      h[2] = xi;
      h[n - 3] = xi;
      break;
  }
  return ChainSpec(std::move(j), std::move(h));
}

EffectiveXXZParams bose_hubbard_to_xxz(double hopping_t, double nn_interaction_v,
                                       double filling_f) {
  if (!(hopping_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "hopping must be positive");
  const double twice = 2.0 * filling_f;
  if (!(filling_f > 0.0) || std::abs(twice - std::round(twice)) > 1e-12 ||
      static_cast<long long>(std::llround(twice)) % 2 == 0) {
    throw Error(ErrorCode::NonHalfIntegerFilling, "filling must be a positive half-integer");
  }
  const double k = 2.0 * hopping_t * (filling_f + 0.5);
  return {k, nn_interaction_v / k};
}

}  // namespace qst
