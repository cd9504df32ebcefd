#include "passlab/run.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "json.hpp"
#include "passlab/config.hpp"
#include "passlab/errors.hpp"
#include "passlab/output.hpp"
#include "passlab/precision.hpp"

namespace passlab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Bundle {
  json results = json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> files;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

// Full width at half maximum by linear interpolation of the crossings.
double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (y.empty()) return 0.0;
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  std::size_t l = peak, r = peak;
  while (l > 0 && y[l - 1] >= half) --l;
  while (r + 1 < y.size() && y[r + 1] >= half) ++r;
  double xl = x[l], xr = x[r];
  if (l > 0) xl = x[l - 1] + (half - y[l - 1]) / (y[l] - y[l - 1]) * (x[l] - x[l - 1]);
  if (r + 1 < y.size()) xr = x[r] + (y[r] - half) / (y[r] - y[r + 1]) * (x[r + 1] - x[r]);
  return xr - xl;
}

json shape_json(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = density_moments(x, y);
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  json j = {{"integral", m.mass}, {"mean", m.mean}, {"std", m.std}, {"peak_at", x[peak]}, {"peak_value", y[peak]},
            {"fwhm", fwhm(x, y)}};
  if (m.mass > 0.0) {
    j["q05"] = quantile(x, y, 0.05);
    j["q25"] = quantile(x, y, 0.25);
    j["median"] = quantile(x, y, 0.5);
    j["q75"] = quantile(x, y, 0.75);
    j["q95"] = quantile(x, y, 0.95);
  }
  return j;
}

json moments_json(const Moments& m) {
  return {{"norm_sq", m.norm_sq}, {"mean_x", m.mean_x}, {"std_x", m.std_x}, {"mean_p", m.mean_p}, {"std_p", m.std_p}};
}

void csv(Bundle& b, const fs::path& dir, const std::string& name, const std::vector<CsvColumn>& cols,
         std::size_t stride) {
  write_csv(dir / name, cols, stride);
  b.files.push_back(name);
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

void run_arrival(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto a = arrival_stage(c.experiment);
  const auto& r = a.record;
  csv(b, dir, "arrival.csv",
      {{"t_s", r.times}, {"w1_per_s", r.density_w1}, {"survival", r.survival_p0},
       {"detected_cumulative", r.cumulative_detected}},
      c.output_stride);
  b.results = {{"density", shape_json(r.times, r.density_w1)},
               {"detected", a.detected},
               {"transmitted", a.transmitted},
               {"boundary_loss", a.boundary_loss},
               {"entry_points", a.entry_times.size()},
               {"entry_coverage", a.entry_coverage}};
  append(b.warnings, a.warnings);
}

void run_passage(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto& e = c.experiment;
  const auto g = passage_distribution(e);
  const auto g_cl = classical_passage(e.packet, e.particle, e.distance(), g.tau);
  csv(b, dir, "passage.csv", {{"tau_s", g.tau}, {"g_per_s", g.g_tau}, {"g_classical_per_s", g_cl}}, c.output_stride);
  json shape = shape_json(g.tau, g.g_tau);
  b.results = {{"total_probability", g.total_probability},
               {"mean_tau", g.mean_tau},
               {"std_tau", g.std_tau},
               {"shape", shape},
               {"classical", shape_json(g.tau, g_cl)},
               {"transit_time", e.distance() / e.packet.mean_velocity_v0},
               {"propagated_states", g.propagated_states},
               {"leakage",
                {{"undetected_transmission", g.leakage.undetected_transmission},
                 {"entry_truncation", g.leakage.entry_truncation},
                 {"residual_norm", g.leakage.residual_norm},
                 {"boundary_loss", g.leakage.boundary_loss},
                 {"total", g.leakage.total()}}},
               {"balance", g.total_probability + g.leakage.total()}};
  append(b.warnings, g.warnings);
}

void run_reset_state(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto& e = c.experiment;
  if (c.snapshots.empty()) throw ConfigError("reset_state.snapshots", "no snapshots requested");
  json list = json::array();
  for (std::size_t i = 0; i < c.snapshots.size(); ++i) {
    const auto& req = c.snapshots[i];
    const auto det = DetectorSpec::direct(e.detector1.profile, req.rate, e.detector1.rates.shift);
    const auto s = reset_snapshot(e, det, req.time);
    const auto& grid = s.reset.grid();
    const auto x = grid.positions();
    std::vector<double> rx(x.size()), fx(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      rx[k] = std::norm(s.reset.amplitudes()[k]);
      fx[k] = std::norm(s.free.amplitudes()[k]);
    }
    const std::string tag = "reset_" + std::to_string(i);
    csv(b, dir, tag + "_x.csv", {{"x_m", x}, {"reset_per_m", rx}, {"free_per_m", fx}}, c.output_stride);
    const auto mr = momentum_density(s.reset);
    const auto mf = momentum_density(s.free);
    const double hbar = e.particle.hbar;
    std::vector<double> p(mr.k.size()), rp(mr.k.size()), fp(mr.k.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] = hbar * mr.k[k];
      rp[k] = mr.density[k] / hbar;
      fp[k] = mf.density[k] / hbar;
    }
    csv(b, dir, tag + "_p.csv", {{"p_kg_m_per_s", p}, {"reset_per_kg_m_per_s", rp}, {"free_per_kg_m_per_s", fp}},
        c.output_stride);
    list.push_back({{"rate", req.rate},
                    {"time", req.time},
                    {"w1", s.w1},
                    {"reset", moments_json(s.reset_moments)},
                    {"free", moments_json(s.free_moments)}});
  }
  b.results = {{"snapshots", list}};
}

void run_discrete(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto& d = c.discrete;
  const auto disc = discrete_reset_density(d.config, d.grid);
  const auto cont = continuum_reset_density(d.config, d.grid);
  const double edge = d.config.edge;
  const auto m = compare_densities(disc, cont, {edge - d.exclusion, edge + d.exclusion});
  const auto x = d.grid.positions();
  std::vector<double> a(x.size()), f(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a[i] = disc.values[i] / disc.normalization;
    f[i] = cont.values[i] / cont.normalization;
  }
  csv(b, dir, "discrete_compare.csv", {{"x_m", x}, {"discrete_per_m", a}, {"continuum_per_m", f}}, c.output_stride);
  const auto rates = continuum_rates(d.config.bath);
  b.results = {{"l1_masked", m.l1_masked},
               {"l1_full", m.l1_full},
               {"exclusion", {m.exclusion.first, m.exclusion.second}},
               {"discrete_normalization", disc.normalization},
               {"continuum_normalization", cont.normalization},
               {"continuum_rate", rates.decay_a},
               {"continuum_shift", rates.shift}};
}

void run_kijowski(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto& e = c.experiment;
  const auto& k = c.kijowski;
  const auto t = linspace(k.t_min, k.t_max, k.points);
  const auto pi = kijowski_distribution(e.packet, e.particle, k.x, t);
  csv(b, dir, "kijowski.csv", {{"t_s", t}, {"density_per_s", pi}}, c.output_stride);
  b.results = {{"x", k.x}, {"density", shape_json(t, pi)}};
}

void run_sweep(const RunConfig& c, const fs::path& dir, Bundle& b) {
  const auto& e = c.experiment;
  const auto r = scaling_sweep(e, c.sweep_v0);
  std::vector<double> v, en, sd, opt, mean, tot;
  json pts = json::array();
  for (const auto& p : r.points) {
    v.push_back(p.v0);
    en.push_back(p.energy);
    sd.push_back(p.std_tau);
    opt.push_back(p.delta_tau_opt);
    mean.push_back(p.mean_tau);
    tot.push_back(p.total_probability);
    pts.push_back({{"v0", p.v0},
                   {"energy", p.energy},
                   {"std_tau", p.std_tau},
                   {"mean_tau", p.mean_tau},
                   {"total_probability", p.total_probability},
                   {"delta_tau_opt", p.delta_tau_opt},
                   {"rate", p.a},
                   {"delta_x", p.delta_x},
                   {"detector_length", p.detector_length},
                   {"propagated_states", p.propagated_states}});
    for (const auto& w : p.warnings) b.warnings.push_back("v0=" + format_number(p.v0) + ": " + w);
  }
  csv(b, dir, "precision_sweep.csv",
      {{"v0_m_per_s", v},
       {"energy_J", en},
       {"std_tau_s", sd},
       {"delta_tau_opt_s", opt},
       {"mean_tau_s", mean},
       {"total_probability", tot}},
      1);
  const auto plan = optimal_plan(e.distance(), e.particle, e.packet.mean_velocity_v0);
  b.results = {{"exponent", r.exponent()},
               {"intercept", r.fit.intercept},
               {"points", pts},
               {"reference_plan",
                {{"v0", e.packet.mean_velocity_v0},
                 {"delta_x_opt", plan.delta_x_opt},
                 {"a_opt", plan.a_opt},
                 {"a_opt_for_packet", optimal_rate(e.packet.sigma_x, e.packet.mean_velocity_v0)},
                 {"delta_tau_opt", plan.delta_tau_opt},
                 {"energy", plan.energy},
                 {"detection_length", plan.detection_length_L}}}};
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PASSLAB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return 0;
}

}  // namespace

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  for (auto s : {Subcommand::arrival, Subcommand::passage, Subcommand::reset_state, Subcommand::discrete_compare,
                 Subcommand::kijowski, Subcommand::precision_sweep})
    if (subcommand_name(s) == name) return s;
  return std::nullopt;
}

std::string subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::arrival: return "arrival";
    case Subcommand::passage: return "passage";
    case Subcommand::reset_state: return "reset-state";
    case Subcommand::discrete_compare: return "discrete-compare";
    case Subcommand::kijowski: return "kijowski";
    case Subcommand::precision_sweep: return "precision-sweep";
  }
  return "";
}

RunOutcome run(const RunOptions& options, std::ostream& log) {
  RunOutcome out;
  RunConfig cfg;
  try {
    cfg = options.config_path.empty() ? default_run_config() : load_run_config(options.config_path);
  } catch (const std::ios_base::failure& e) {
    log << "error: " << e.what() << '\n';
    out.exit_code = kExitUsage;
    return out;
  } catch (const ConfigError& e) {
    log << "config error in '" << options.config_path << "': " << e.what() << '\n';
    out.exit_code = kExitConfig;
    return out;
  }

  const fs::path dir(options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    log << "error: cannot create output directory '" << dir.string() << "'\n";
    out.exit_code = kExitUsage;
    return out;
  }
  if (const int n = resolve_threads(options.threads); n > 0) omp_set_num_threads(n);

  Bundle b;
  try {
    switch (options.subcommand) {
      case Subcommand::arrival: run_arrival(cfg, dir, b); break;
      case Subcommand::passage: run_passage(cfg, dir, b); break;
      case Subcommand::reset_state: run_reset_state(cfg, dir, b); break;
      case Subcommand::discrete_compare: run_discrete(cfg, dir, b); break;
      case Subcommand::kijowski: run_kijowski(cfg, dir, b); break;
      case Subcommand::precision_sweep: run_sweep(cfg, dir, b); break;
    }
  } catch (const std::ios_base::failure& e) {
    log << "error: " << e.what() << '\n';
    out.exit_code = kExitUsage;
    return out;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    out.exit_code = kExitConfig;
    return out;
  } catch (const RegimeError& e) {
    log << "regime error: " << e.what() << '\n';
    out.exit_code = kExitRegime;
    return out;
  } catch (const Error& e) {
    log << "numerical failure: " << e.what() << '\n';
    out.exit_code = kExitNumerical;
    return out;
  }

  for (const auto& w : b.warnings) log << "warning: " << w << '\n';
  out.exit_code = b.warnings.empty() ? kExitOk : kExitRegime;
  if (options.emit_plots) {
    write_text(dir / "plot.py", plot_script(b.files));
    b.files.push_back("plot.py");
  }
  b.files.push_back("summary.json");
  json summary = {{"subcommand", subcommand_name(options.subcommand)},
                  {"exit_code", out.exit_code},
                  {"warnings", b.warnings},
                  {"results", b.results},
                  {"files", b.files},
                  {"config", json::parse(echo_run_config(cfg))}};
  out.summary = summary.dump(2) + "\n";
  try {
    write_text(dir / "summary.json", out.summary);
  } catch (const std::ios_base::failure& e) {
    log << "error: " << e.what() << '\n';
    out.exit_code = kExitUsage;
    return out;
  }
  out.files = b.files;
  return out;
}

}  // namespace passlab
