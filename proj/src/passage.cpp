#include "passlab/passage.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"
#include "passlab/numeric.hpp"

namespace passlab {

namespace {

constexpr double kEntryLowQuantile = 5e-4;
constexpr double kEntryHighQuantile = 1.0 - 5e-4;
constexpr double kRegimeDetection = 0.9;
constexpr double kNegativeMomentumLimit = 1e-6;

double velocity_width(const ExperimentConfig& cfg) {
  return momentum_width(cfg.packet, cfg.particle) / cfg.particle.mass;
}

double slow_velocity(const ExperimentConfig& cfg) {
  const double v = cfg.packet.mean_velocity_v0 - 5.0 * velocity_width(cfg);
  if (!(v > 0.0)) throw RegimeError("packet velocity spread too large for automatic time spans");
  return v;
}

double stage2_step(const ExperimentConfig& cfg) { return cfg.stage2_dt > 0.0 ? cfg.stage2_dt : cfg.dt; }

double resolved_start(const ExperimentConfig& cfg) {
  return std::isnan(cfg.t_start)
             ? auto_start_time(cfg.packet, cfg.particle, cfg.detector1.profile.support_begin())
             : cfg.t_start;
}

double resolved_end(const ExperimentConfig& cfg) {
  if (!std::isnan(cfg.t_end)) return cfg.t_end;
  const double b1 = cfg.detector1.profile.support_end();
  const double a = cfg.detector1.rates.decay_a;
  return (b1 - cfg.packet.center_x0) / slow_velocity(cfg) + 10.0 / std::max(a, 1e-300);
}

double resolved_tau_max(const ExperimentConfig& cfg) {
  if (!cfg.tau_grid.empty()) return cfg.tau_grid.back();
  if (!std::isnan(cfg.tau_max)) return cfg.tau_max;
  const double span = cfg.detector2.profile.support_end() - cfg.detector1.profile.support_begin();
  return span / slow_velocity(cfg) + 10.0 / cfg.detector2.rates.decay_a;
}

struct StageOneRun {
  DetectionRecord record;
  double h = 0.0;
};

std::vector<double> linear_interpolate(const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& at) {
  std::vector<double> out(at.size(), 0.0);
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double t = at[i];
    if (t < x.front() || t > x.back()) continue;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.end()) {
      out[i] = y.back();
      continue;
    }
    const auto j = static_cast<std::size_t>(it - x.begin());
    const double s = (t - x[j - 1]) / (x[j] - x[j - 1]);
    out[i] = (1.0 - s) * y[j - 1] + s * y[j];
  }
  return out;
}

// Entry indices (stage-1 step numbers) and trapezoid weights.
void choose_entries(const ExperimentConfig& cfg, const DetectionRecord& rec, double h,
                    std::vector<std::size_t>& idx, std::vector<double>& weights) {
  idx.clear();
  weights.clear();
  const double t0 = rec.times.front();
  const std::size_t last = rec.size() - 1;
  if (!cfg.entry_times.empty()) {
    for (double t : cfg.entry_times) {
      const double s = std::round((t - t0) / h);
      if (s < 0.0 || s > static_cast<double>(last))
        throw InvalidArgument("entry time outside the stage-1 time span");
      const auto i = static_cast<std::size_t>(s);
      if (!idx.empty() && i <= idx.back()) throw InvalidArgument("entry times must increase by at least one step");
      idx.push_back(i);
    }
  } else {
    const double lo = quantile(rec.times, rec.density_w1, kEntryLowQuantile);
    const double hi = quantile(rec.times, rec.density_w1, kEntryHighQuantile);
    const auto i_lo = static_cast<std::size_t>(std::floor((lo - t0) / h));
    const auto i_hi = std::min(last, static_cast<std::size_t>(std::ceil((hi - t0) / h)));
    const std::size_t n = std::max<std::size_t>(cfg.n_entry, 2);
    const std::size_t stride = std::max<std::size_t>(1, (i_hi - i_lo + n - 2) / (n - 1));
    for (std::size_t i = i_lo; i <= i_hi && idx.size() < n; i += stride) idx.push_back(i);
    if (idx.back() < i_hi && idx.back() + stride <= last) idx.push_back(idx.back() + stride);
  }
  if (idx.size() < 2) throw InvalidArgument("entry grid needs at least two times");
  weights.assign(idx.size(), 0.0);
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const double w = 0.5 * h * static_cast<double>(idx[k + 1] - idx[k]);
    weights[k] += w;
    weights[k + 1] += w;
  }
}

std::vector<double> tau_axis(std::size_t n, double h) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * h;
  return t;
}

void accumulate(std::vector<double>& g, const StageTwoTrace& trace, double weight) {
  for (std::size_t i = 0; i < trace.w1.size(); ++i) g[i] += weight * trace.w1[i];
}

}  // namespace

double ExperimentConfig::distance() const {
  return detector2.profile.support_begin() - detector1.profile.support_begin();
}

void validate(const ExperimentConfig& cfg) {
  const auto& p1 = cfg.detector1.profile;
  const auto& p2 = cfg.detector2.profile;
  if (!(p1.support_end() <= p2.support_begin()))
    throw InvalidArgument("detector 2 must lie downstream of detector 1 without overlap");
  const double lo = cfg.grid.x(0);
  const double hi = cfg.grid.x(cfg.grid.size() - 1) + cfg.grid.dx();
  if (p1.support_begin() < lo || p2.support_end() > hi) throw GridError("detectors must lie inside the grid");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw InvalidArgument("dt must be positive");
  if (!(cfg.stage2_dt >= 0.0) || !std::isfinite(cfg.stage2_dt)) throw InvalidArgument("stage2_dt must be >= 0");
  if (!(cfg.stop_fraction >= 0.0 && cfg.stop_fraction < 1.0)) throw InvalidArgument("stop_fraction must be in [0, 1)");
  if (!(cfg.ensemble_tolerance >= 0.0 && cfg.ensemble_tolerance < 1.0))
    throw InvalidArgument("ensemble_tolerance must be in [0, 1)");
  if (cfg.entry_times.empty() && cfg.n_entry < 2) throw InvalidArgument("n_entry must be at least 2");
  if (!std::is_sorted(cfg.tau_grid.begin(), cfg.tau_grid.end()) ||
      (!cfg.tau_grid.empty() && !(cfg.tau_grid.front() >= 0.0)))
    throw InvalidArgument("tau_grid must be increasing and non-negative");
  if (!(cfg.detector2.rates.decay_a > 0.0)) throw InvalidArgument("detector 2 needs a positive decay rate");
}

double auto_start_time(const GaussianPacketSpec& packet, const ParticleSpec& particle, double detector_start) {
  const double sv = momentum_width(packet, particle) / particle.mass;
  const double v0 = packet.mean_velocity_v0;
  if (!(v0 > 6.0 * sv)) {
    std::ostringstream os;
    os << "packet spreads faster than it moves (v0=" << v0 << " m/s, 6 sigma_v=" << 6.0 * sv << " m/s)";
    throw RegimeError(os.str());
  }
  // Leading edge x0 + v0 t + 6 sigma(t) is increasing in t when v0 > 6 sigma_v.
  auto edge = [&](double t) { return packet.center_x0 + v0 * t + 6.0 * free_width(packet, particle, t) - detector_start; };
  double scale = packet.sigma_x / v0;
  double lo = -scale;
  while (edge(lo) > 0.0) lo *= 2.0;
  double hi = scale;
  while (edge(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * scale; ++i) {
    const double mid = 0.5 * (lo + hi);
    (edge(mid) > 0.0 ? hi : lo) = mid;
  }
  return lo;
}

ArrivalResult arrival_stage(const ExperimentConfig& cfg) {
  validate(cfg);
  if (!(cfg.detector1.rates.decay_a > 0.0)) throw ZeroOverlapError("no detection: detector 1 has zero decay rate");
  const double t0 = resolved_start(cfg);
  const double t1 = resolved_end(cfg);
  if (!(t1 > t0)) throw InvalidArgument("stage-1 end must follow its start");
  const auto psi0 = gaussian_free_state(cfg.packet, cfg.particle, t0, cfg.grid);
  const auto pot = cfg.detector1.potential(cfg.grid, cfg.include_shift);

  EvolveOptions opt;
  opt.absorber = cfg.absorber;
  opt.stop_below_survival = cfg.stop_fraction;
  auto first = evolve_conditional(psi0, pot, cfg.particle, t1, cfg.dt, opt);

  ArrivalResult out;
  out.record = std::move(first.record);
  const auto& rec = out.record;
  out.detected = rec.cumulative_detected.back();
  out.transmitted = rec.survival_p0.back();
  out.boundary_loss = rec.boundary_absorbed.back();
  if (!(out.detected > kZeroOverlapThreshold)) throw ZeroOverlapError("no detection in detector 1");
  if (out.detected < kRegimeDetection) {
    std::ostringstream os;
    os << "detector 1 detects only " << out.detected << " of the packet (transmission/reflection not negligible)";
    out.warnings.push_back(os.str());
  }

  const double h = rec.size() > 1 ? rec.times[1] - rec.times[0] : cfg.dt;
  std::vector<std::size_t> idx;
  choose_entries(cfg, rec, h, idx, out.entry_weights);
  for (std::size_t i : idx) out.entry_times.push_back(rec.times[i]);

  // Second pass: the same deterministic evolution, stopping at the entry steps.
  out.reset_states.reserve(idx.size());
  std::size_t next = 0;
  if (idx[0] == 0) {
    out.reset_states.push_back(reset(psi0, cfg.detector1));
    ++next;
  }
  if (next < idx.size()) {
    EvolveOptions snap;
    snap.absorber = cfg.absorber;
    snap.sample_stride = std::numeric_limits<std::size_t>::max();
    snap.observer = [&](std::size_t s, const WaveFunction& psi) {
      if (next < idx.size() && s == idx[next]) {
        out.reset_states.push_back(reset(psi, cfg.detector1));
        out.reset_states.back().set_time(rec.times[s]);
        ++next;
      }
    };
    evolve_conditional(psi0, pot, cfg.particle, rec.times[idx.back()], h * (1.0 + 1e-12), snap);
  }
  if (out.reset_states.size() != idx.size()) throw InvalidArgument("entry snapshots incomplete");

  for (std::size_t k = 0; k < idx.size(); ++k) out.entry_coverage += out.entry_weights[k] * rec.density_w1[idx[k]];
  return out;
}

StageTwoTrace stage_two(const ExperimentConfig& cfg, const WaveFunction& reset_state) {
  const double tau_max = resolved_tau_max(cfg);
  const double dt = stage2_step(cfg);
  const auto n_steps = static_cast<std::size_t>(std::ceil(tau_max / dt - 1e-9));
  StageTwoTrace out;
  out.step = tau_max / static_cast<double>(n_steps);
  SplitStepPropagator prop(cfg.detector2.potential(cfg.grid, cfg.include_shift), cfg.particle, out.step,
                           cfg.absorber);
  WaveFunction psi = reset_state;
  psi.set_time(0.0);
  const double initial = psi.norm_sq();
  const double floor = cfg.stop_fraction * initial;
  out.w1.reserve(n_steps + 1);
  out.w1.push_back(prop.detection_density(psi));
  for (std::size_t s = 1; s <= n_steps; ++s) {
    out.boundary_loss += prop.step(psi);
    out.w1.push_back(prop.detection_density(psi));
    if (s % 64 == 0 || s == n_steps) {
      const double norm = psi.norm_sq();
      if (!std::isfinite(norm)) throw InstabilityError("stage-2 evolution became unstable");
      out.residual = norm;
      if (norm < floor) break;
    }
  }
  psi.validate(initial);
  out.residual = psi.norm_sq();
  return out;
}

PassageDistribution passage_distribution(const ExperimentConfig& cfg, const ArrivalResult& arrival) {
  validate(cfg);
  const std::size_t n_entries = arrival.reset_states.size();
  const double tau_max = resolved_tau_max(cfg);
  const double dt = stage2_step(cfg);
  const auto n_steps = static_cast<std::size_t>(std::ceil(tau_max / dt - 1e-9));
  const double h = tau_max / static_cast<double>(n_steps);

  PassageDistribution out;
  out.warnings = arrival.warnings;
  std::vector<double> g(n_steps + 1, 0.0);
  double residual = 0.0;
  double boundary = 0.0;
  double kept_trace = 0.0;

  if (cfg.method == PassageMethod::per_entry) {
    std::vector<StageTwoTrace> traces(n_entries);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < n_entries; ++k) traces[k] = stage_two(cfg, arrival.reset_states[k]);
    for (std::size_t k = 0; k < n_entries; ++k) {
      const double w = arrival.entry_weights[k];
      accumulate(g, traces[k], w);
      residual += w * traces[k].residual;
      boundary += w * traces[k].boundary_loss;
      kept_trace += w * arrival.reset_states[k].norm_sq();
    }
    out.propagated_states = n_entries;
  } else {
    const auto& grid = cfg.grid;
    const std::size_t lo = grid.lower_index(cfg.detector1.profile.support_begin());
    const std::size_t hi = std::min(grid.size(), grid.lower_index(cfg.detector1.profile.support_end()) + 1);
    const auto rows = static_cast<Eigen::Index>(hi - lo);
    Eigen::MatrixXcd m(rows, static_cast<Eigen::Index>(n_entries));
    for (std::size_t k = 0; k < n_entries; ++k) {
      const double scale = std::sqrt(arrival.entry_weights[k] * grid.dx());
      const auto a = arrival.reset_states[k].amplitudes();
      for (Eigen::Index r = 0; r < rows; ++r) m(r, static_cast<Eigen::Index>(k)) = scale * a[lo + static_cast<std::size_t>(r)];
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double total = 0.0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) total += sv(j) * sv(j);
    // Smallest rank whose dropped eigenvalue tail is within tolerance.
    std::size_t rank = static_cast<std::size_t>(sv.size());
    double tail = 0.0;
    while (rank > 1) {
      const double lam = sv(static_cast<Eigen::Index>(rank - 1)) * sv(static_cast<Eigen::Index>(rank - 1));
      if (tail + lam > cfg.ensemble_tolerance * total) break;
      tail += lam;
      --rank;
    }
    std::vector<WaveFunction> modes;
    std::vector<double> lambda;
    modes.reserve(rank);
    const double inv = 1.0 / std::sqrt(grid.dx());
    for (std::size_t j = 0; j < rank; ++j) {
      std::vector<cplx> e(grid.size(), cplx(0.0, 0.0));
      for (Eigen::Index r = 0; r < rows; ++r)
        e[lo + static_cast<std::size_t>(r)] = svd.matrixU()(r, static_cast<Eigen::Index>(j)) * inv;
      modes.emplace_back(grid, std::move(e), 0.0);
      lambda.push_back(sv(static_cast<Eigen::Index>(j)) * sv(static_cast<Eigen::Index>(j)));
    }
    std::vector<StageTwoTrace> traces(rank);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < rank; ++j) traces[j] = stage_two(cfg, modes[j]);
    for (std::size_t j = 0; j < rank; ++j) {
      accumulate(g, traces[j], lambda[j]);
      residual += lambda[j] * traces[j].residual;
      boundary += lambda[j] * traces[j].boundary_loss;
      kept_trace += lambda[j];
    }
    out.propagated_states = rank;
  }

  const auto steps = tau_axis(n_steps + 1, h);
  if (cfg.tau_grid.empty()) {
    out.tau = steps;
    out.g_tau = std::move(g);
  } else {
    out.tau = cfg.tau_grid;
    out.g_tau = linear_interpolate(steps, g, cfg.tau_grid);
  }
  for (double& v : out.g_tau) v = std::max(v, 0.0);
  const auto mom = density_moments(out.tau, out.g_tau);
  out.total_probability = mom.mass;
  out.mean_tau = mom.mean;
  out.std_tau = mom.std;

  out.leakage.undetected_transmission = 1.0 - arrival.detected;
  out.leakage.entry_truncation = arrival.detected - kept_trace;
  out.leakage.residual_norm = residual;
  out.leakage.boundary_loss = boundary;
  if (residual > 1e-3 * kept_trace) {
    std::ostringstream os;
    os << "tau range too short: " << residual / kept_trace << " of the reset mixture is still undetected";
    out.warnings.push_back(os.str());
  }
  if (boundary > 1e-2 * kept_trace) {
    std::ostringstream os;
    os << "boundary absorber removed " << boundary / kept_trace
       << " of the reset mixture (backward motion or transmission through detector 2)";
    out.warnings.push_back(os.str());
  }
  return out;
}

PassageDistribution passage_distribution(const ExperimentConfig& cfg) {
  return passage_distribution(cfg, arrival_stage(cfg));
}

std::vector<double> classical_passage(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                      double distance, const std::vector<double>& tau) {
  const double p0 = particle.mass * packet.mean_velocity_v0;
  const double sp = momentum_width(packet, particle);
  const double negative = 0.5 * std::erfc(p0 / (std::sqrt(2.0) * sp));
  if (negative > kNegativeMomentumLimit) {
    std::ostringstream os;
    os << "momentum distribution has " << negative << " of its weight at p <= 0";
    throw RegimeError(os.str());
  }
  if (!(distance > 0.0)) throw InvalidArgument("passage distance must be positive");
  std::vector<double> out(tau.size(), 0.0);
  const double norm = 1.0 / (std::sqrt(2.0 * kPi) * sp);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0)) continue;
    const double p = particle.mass * distance / tau[i];
    const double z = (p - p0) / sp;
    out[i] = norm * std::exp(-0.5 * z * z) * p / tau[i];
  }
  return out;
}

std::vector<double> kijowski_distribution(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                          double x, const std::vector<double>& t) {
  const double sigma = packet.sigma_x;
  const double k0 = particle.mass * packet.mean_velocity_v0 / particle.hbar;
  const double sk = 1.0 / (2.0 * sigma);
  const double negative = 0.5 * std::erfc(k0 / (std::sqrt(2.0) * sk));
  if (negative > kNegativeMomentumLimit) {
    std::ostringstream os;
    os << "momentum distribution has " << negative << " of its weight at p <= 0";
    throw RegimeError(os.str());
  }
  const double k_lo = std::max(0.0, k0 - 12.0 * sk);
  const double k_hi = k0 + 12.0 * sk;
  const double hbar_m = particle.hbar / particle.mass;
  const double amp = std::pow(2.0 * sigma * sigma / kPi, 0.25);
  std::vector<double> out(t.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < t.size(); ++i) {
    // Phase slope d/dk [k (x - x0) - hbar k^2 t / 2m] bounds the node spacing.
    const double slope = std::abs(x - packet.center_x0) + hbar_m * k_hi * std::abs(t[i]);
    const auto n = std::max<std::size_t>(
        4001, static_cast<std::size_t>(std::ceil((k_hi - k_lo) * (slope + 10.0 * sigma) / 0.05)) + 1);
    const double dk = (k_hi - k_lo) / static_cast<double>(n - 1);
    cplx sum(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double k = k_lo + static_cast<double>(j) * dk;
      const double q = k - k0;
      const double phase = q * (x - packet.center_x0) + k0 * x - 0.5 * hbar_m * k * k * t[i];
      const double w = (j == 0 || j + 1 == n) ? 0.5 * dk : dk;
      sum += w * std::sqrt(k) * amp * std::exp(-sigma * sigma * q * q) * std::polar(1.0, phase);
    }
    out[i] = hbar_m / (2.0 * kPi) * std::norm(sum);
  }
  return out;
}

ResetSnapshot reset_snapshot(const ExperimentConfig& cfg, const DetectorSpec& detector, double time) {
  const double t0 = std::isnan(cfg.t_start)
                        ? auto_start_time(cfg.packet, cfg.particle, detector.profile.support_begin())
                        : cfg.t_start;
  if (!(time > t0)) throw InvalidArgument("snapshot time must follow the start time");
  const auto psi0 = gaussian_free_state(cfg.packet, cfg.particle, t0, cfg.grid);
  EvolveOptions opt;
  opt.absorber = cfg.absorber;
  opt.sample_stride = std::numeric_limits<std::size_t>::max();
  const auto run = evolve_conditional(psi0, detector.potential(cfg.grid, cfg.include_shift), cfg.particle, time,
                                      cfg.dt, opt);
  WaveFunction r = reset(run.state, detector);
  const double w1 = r.norm_sq();
  const double scale = 1.0 / std::sqrt(w1);
  for (auto& z : r.data()) z *= scale;
  auto free = gaussian_free_state(cfg.packet, cfg.particle, time, cfg.grid);
  auto rm = observables(r);
  auto fm = observables(free);
  return ResetSnapshot{time, w1, std::move(r), std::move(free), rm, fm};
}

}  // namespace passlab
