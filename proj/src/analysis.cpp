#include "qst/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "json.hpp"
#include "qst/error.hpp"
#include "qst/format.hpp"
#include "qst/spectral.hpp"

namespace qst {

namespace {

constexpr double kPi = std::numbers::pi;
// Coarse samples this far below the threshold are re-scanned finely; covers
// the worst-case drop of a fast oscillation between two coarse samples.
constexpr double kCandidateMargin = 0.05;

bool is_default_setup(const TransferSetup& setup, int n) {
  const TransferSetup def = TransferSetup::default_for(setup.qubits(), n);
  return setup.senders == def.senders && setup.receivers == def.receivers;
}

template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateSamples, "all x values are identical");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss_res += r * r;
  }
  double r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res == 0.0 ? 1.0 : 0.0);
  return {slope, intercept, std::clamp(r2, 0.0, 1.0)};
}

void check_samples(std::span<const std::pair<double, double>> samples, bool positive_x) {
  if (samples.size() < 3) throw Error(ErrorCode::DegenerateSamples, "need at least 3 samples");
  for (const auto& [x, tau] : samples) {
    if (!std::isfinite(x) || !std::isfinite(tau) || !(tau > 0.0) || (positive_x && !(x > 0.0))) {
      throw Error(ErrorCode::InvalidArgument, "samples must be finite and positive");
    }
  }
}

}  // namespace

double predicted_rabi_gap(const SpectralDecomposition& decomp, const TransferSetup& setup) {
  const int n = decomp.size();
  if (!is_default_setup(setup, n)) return TransferResult::kNaN;
  try {
    if (setup.qubits() == 1) return rabi_gap(decomp, RabiMode::BiLocal1Q);
    if (n % 6 == 0) return rabi_gap(decomp, RabiMode::SextetN6n);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConvergenceFailure) throw;
  }
  return TransferResult::kNaN;
}

TransferResult find_transfer_time(const ChainSpec& chain, const TransferSetup& setup,
                                  double threshold, const TransferSearch& search) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1)");
  }
  setup.validate(chain.n_sites());
  const SpectralDecomposition decomp = diagonalize(chain);

  TransferResult result;
  result.threshold = threshold;
  result.rabi_gap = predicted_rabi_gap(decomp, setup);
  if (std::isfinite(result.rabi_gap) && result.rabi_gap > 0.0) {
    result.tau_predicted = kPi / result.rabi_gap;
  }
  double t_max = search.t_max;
  if (!(t_max > 0.0)) {
    t_max = std::isfinite(result.tau_predicted) ? 20.0 * result.tau_predicted
                                                : 1000.0 * chain.n_sites();
  }
  result.t_max = t_max;

  // Both scans sample one lattice t = j * fine, coarse points being every
  // kRefine-th node, so a higher threshold can never cross earlier.
  constexpr long long kRefine = 20;
  const double e_max = std::max(decomp.max_abs_eigenvalue(), 1e-12);
  const double fine = kPi / (200.0 * e_max);
  const double coarse = fine * kRefine;
  FidelityEvaluator fbar(decomp, setup);

  const long long last_fine = static_cast<long long>(std::floor(t_max / fine));
  long long refined_until = -1;
  for (long long i = 0; i * kRefine <= last_fine && !result.reached; ++i) {
    if (fbar.fbar(static_cast<double>(i * kRefine) * fine) < threshold - kCandidateMargin) continue;
    const long long lo = std::max((i - 1) * kRefine, refined_until + 1);
    const long long hi = std::min((i + 1) * kRefine, last_fine);
    for (long long j = std::max(lo, 0LL); j <= hi; ++j) {
      const double tf = static_cast<double>(j) * fine;
      const double value = fbar.fbar(tf);
      if (value >= threshold) {
        result.reached = true;
        result.tau = tf;
        result.fbar_at_tau = value;
        break;
      }
    }
    refined_until = hi;
  }

  if (result.reached && search.locate_peak) {
    // Neighbouring fast-oscillation maxima can differ by less than the error
    // of a coarse sample, so every coarse local maximum is refined on the
    // fine lattice and then polished by Brent's method.
    double best_t = result.tau, best_f = result.fbar_at_tau;
    auto refine = [&](double centre) {
      double t_fine = centre, f_fine = fbar.fbar(centre);
      for (long long j = -kRefine; j <= kRefine; ++j) {
        const double t = centre + static_cast<double>(j) * fine;
        if (t < 0.0 || t > t_max) continue;
        const double value = fbar.fbar(t);
        if (value > f_fine) {
          f_fine = value;
          t_fine = t;
        }
      }
      const auto [t_opt, neg_f] = boost::math::tools::brent_find_minima(
          [&](double t) { return -fbar.fbar(t); }, std::max(0.0, t_fine - fine), std::min(t_max, t_fine + fine),
          std::numeric_limits<double>::digits / 2);
      if (-neg_f > f_fine) {
        f_fine = -neg_f;
        t_fine = t_opt;
      }
      if (f_fine > best_f) {
        best_f = f_fine;
        best_t = t_fine;
      }
    };

    // The excursion ends once F stays below threshold for longer than a few
    // periods of the fastest oscillation.
    const double gap = 20.0 * kPi / e_max;
    double last_above = result.tau;
    const long long first = static_cast<long long>(std::ceil(result.tau / coarse));
    double before = fbar.fbar(static_cast<double>(first - 1) * coarse);
    double here = fbar.fbar(static_cast<double>(first) * coarse);
    for (long long i = first;; ++i) {
      const double t = static_cast<double>(i) * coarse;
      if (t > t_max || t - last_above > gap) break;
      if (here >= threshold) last_above = t;
      const double after = fbar.fbar(t + coarse);
      if (here >= before && here >= after && here >= threshold - kCandidateMargin) refine(t);
      before = here;
      here = after;
    }
    result.t_peak = best_t;
    result.fbar_peak = best_f;
  }
  return result;
}

std::vector<SweepPoint> sweep(const SweepRequest& request) {
  std::vector<SweepPoint> points;
  for (int n : request.n_list) {
    for (double xi : request.xi_list) {
      // Building every chain up front surfaces invalid (N, xi) before any work.
      build_chain({request.kind, xi, n});
      points.push_back({request.kind, n, xi, {}, {}});
    }
  }
  parallel_for(points.size(), request.jobs, [&](std::size_t i) {
    SweepPoint& p = points[i];
    const ChainSpec chain = build_chain({p.kind, p.xi, p.n_sites});
    const TransferSetup setup = TransferSetup::default_for(protocol_qubits(p.kind), p.n_sites);
    try {
      p.result = find_transfer_time(chain, setup, request.threshold, {request.t_max, false});
    } catch (const Error& e) {
      p.result.threshold = request.threshold;
      p.error = e.what();
    }
  });
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "protocol,N,xi,threshold,tau,fbar_at_tau,delta_omega,tau_predicted,reached\n";
  auto opt = [](double v) { return std::isfinite(v) ? format_number(v) : std::string(); };
  for (const auto& p : points) {
    const auto& r = p.result;
    out << protocol_name(p.kind) << ',' << p.n_sites << ',' << format_number(p.xi) << ','
        << format_number(r.threshold) << ',' << (r.reached ? opt(r.tau) : "") << ','
        << (r.reached ? opt(r.fbar_at_tau) : "") << ',' << opt(r.rabi_gap) << ','
        << opt(r.tau_predicted) << ',' << (r.reached ? "true" : "false") << '\n';
  }
}

ScalingFit fit_power_law(std::span<const std::pair<double, double>> samples) {
  check_samples(samples, true);
  std::vector<double> lx, ly;
  for (const auto& [x, tau] : samples) {
    lx.push_back(std::log(x));
    ly.push_back(std::log(tau));
  }
  const LineFit line = least_squares(lx, ly);
  return {line.slope, std::exp(line.intercept), line.r_squared, {samples.begin(), samples.end()}, 0};
}

ScalingFit fit_exponential(std::span<const std::pair<double, double>> samples) {
  check_samples(samples, false);
  std::vector<double> xs, ly;
  for (const auto& [x, tau] : samples) {
    xs.push_back(x);
    ly.push_back(std::log(tau));
  }
  const LineFit line = least_squares(xs, ly);
  return {line.slope, std::exp(line.intercept), line.r_squared, {samples.begin(), samples.end()}, 0};
}

ScalingFit fit_sweep(std::span<const SweepPoint> points, SweepAxis axis, FitModel model) {
  std::vector<std::pair<double, double>> samples;
  int excluded = 0;
  for (const auto& p : points) {
    const double other = axis == SweepAxis::Xi ? double(p.n_sites) : p.xi;
    const double first = axis == SweepAxis::Xi ? double(points[0].n_sites) : points[0].xi;
    if (other != first) {
      throw Error(ErrorCode::InvalidArgument, "fit axis must be the only varying sweep parameter");
    }
    if (!p.result.reached) {
      ++excluded;
      continue;
    }
    samples.emplace_back(axis == SweepAxis::Xi ? p.xi : double(p.n_sites), p.result.tau);
  }
  ScalingFit fit = model == FitModel::PowerLaw ? fit_power_law(samples) : fit_exponential(samples);
  fit.n_excluded = excluded;
  return fit;
}

ScalingFit scaling_exponent_1q(ProtocolKind kind, int n_sites, std::span<const double> xi_list,
                               double threshold, int jobs) {
  if (kind != ProtocolKind::WeakEdge1Q && kind != ProtocolKind::BarrierNN1Q) {
    throw Error(ErrorCode::InvalidArgument, "1-qubit scaling is defined for weak-edge and barrier-nn");
  }
  SweepRequest request{kind, {n_sites}, {xi_list.begin(), xi_list.end()}, threshold, 0.0, jobs};
  return fit_sweep(sweep(request), SweepAxis::Xi);
}

std::string fit_json(const ScalingFit& fit) {
  nlohmann::ordered_json j;
  j["exponent"] = round_to_output(fit.exponent);
  j["prefactor"] = round_to_output(fit.prefactor);
  j["r_squared"] = round_to_output(fit.r_squared);
  j["n_samples"] = fit.samples.size();
  j["n_excluded"] = fit.n_excluded;
  return j.dump();
}

}  // namespace qst
