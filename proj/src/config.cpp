#include "passlab/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "passlab/errors.hpp"
#include "passlab/units.hpp"

namespace passlab {

namespace {

using json = nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Object reader that tracks the field path and rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string path(const char* key) const { return join(path_, key); }

  void quantity(const char* key, Dimension dim, double& out) const {
    if (!has(key)) return;
    out = to_quantity(at(key), path(key), dim);
  }

  // "auto" or null leaves NaN.
  void optional_quantity(const char* key, Dimension dim, double& out) const {
    if (!has(key)) return;
    const auto& v = at(key);
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) {
      out = kNan;
      return;
    }
    out = to_quantity(v, path(key), dim);
  }

  void count(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path(key), "expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void flag(const char* key, bool& out) const {
    if (!has(key)) return;
    if (!at(key).is_boolean()) throw ConfigError(path(key), "expected true or false");
    out = at(key).get<bool>();
  }

  void list(const char* key, Dimension dim, std::vector<double>& out) const {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(to_quantity(v[i], path(key) + "[" + std::to_string(i) + "]", dim));
  }

  static double to_quantity(const json& v, const std::string& where, Dimension dim) {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(where, "value must be finite");
      return x;
    }
    if (!v.is_string()) throw ConfigError(where, "expected a number or a string with unit");
    try {
      return parse_quantity(v.get<std::string>(), dim);
    } catch (const Error& e) {
      throw ConfigError(where, e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
};

template <class F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

GaussianPacketSpec read_packet(const json& j, const std::string& path, const GaussianPacketSpec& base) {
  Section s(j, path, {"x0", "sigma", "v0"});
  double x0 = base.center_x0, sigma = base.sigma_x, v0 = base.mean_velocity_v0;
  s.quantity("x0", Dimension::length, x0);
  s.quantity("sigma", Dimension::length, sigma);
  s.quantity("v0", Dimension::velocity, v0);
  return guarded(path, [&] { return GaussianPacketSpec(x0, sigma, v0); });
}

SpatialGrid read_grid(const json& j, const std::string& path, const SpatialGrid& base) {
  Section s(j, path, {"x_min", "x_max", "points"});
  double lo = base.x_min(), hi = base.x_max();
  std::size_t n = base.size();
  s.quantity("x_min", Dimension::length, lo);
  s.quantity("x_max", Dimension::length, hi);
  s.count("points", n);
  return guarded(path, [&] { return build_grid(lo, hi, n); });
}

DiscreteBathSpec read_bath(const json& j, const std::string& path, const DiscreteBathSpec& base) {
  Section s(j, path, {"modes", "omega_max", "coupling", "omega_0"});
  std::size_t n = base.n_modes;
  double wm = base.omega_max, g = base.coupling_G, w0 = base.omega_0;
  s.count("modes", n);
  s.quantity("omega_max", Dimension::rate, wm);
  s.quantity("coupling", Dimension::coupling, g);
  s.quantity("omega_0", Dimension::rate, w0);
  return guarded(path, [&] { return DiscreteBathSpec(n, wm, g, w0); });
}

DetectorSpec read_detector(const json& j, const std::string& path, const DetectorSpec& base) {
  Section s(j, path, {"start", "end", "chi", "rate", "shift", "correlation_time", "bath"});
  double a = base.profile.support_begin(), b = base.profile.support_end();
  s.quantity("start", Dimension::length, a);
  s.quantity("end", Dimension::length, b);
  auto profile = base.profile;
  if (s.has("chi")) {
    Section t(s.at("chi"), s.path("chi"), {"x", "values"});
    std::vector<double> x, chi;
    t.list("x", Dimension::length, x);
    t.list("values", Dimension::dimensionless, chi);
    if (s.has("start") || s.has("end")) throw ConfigError(path, "give either start/end or chi, not both");
    profile = guarded(s.path("chi"), [&] { return SensitivityProfile::tabulated(x, chi); });
  } else if (s.has("start") || s.has("end")) {
    profile = guarded(path, [&] { return SensitivityProfile::rectangular(a, b); });
  }
  if (s.has("bath")) {
    if (s.has("rate") || s.has("shift")) throw ConfigError(path, "give either bath or rate/shift, not both");
    const auto bath = read_bath(s.at("bath"), s.path("bath"), DiscreteBathSpec(15, 4.6 * 2.38e12, 2.782e3, 2.38e12));
    return guarded(s.path("bath"), [&] { return DetectorSpec::from_bath(profile, bath); });
  }
  double rate = base.rates.decay_a, shift = base.rates.shift, tc = base.rates.correlation_time;
  s.quantity("rate", Dimension::rate, rate);
  s.quantity("shift", Dimension::rate, shift);
  s.quantity("correlation_time", Dimension::time, tc);
  auto det = guarded(path, [&] { return DetectorSpec::direct(profile, rate, shift); });
  det.rates.correlation_time = tc;
  return det;
}

json packet_json(const GaussianPacketSpec& p) {
  return {{"x0", p.center_x0}, {"sigma", p.sigma_x}, {"v0", p.mean_velocity_v0}};
}

json grid_json(const SpatialGrid& g) { return {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"points", g.size()}}; }

json detector_json(const DetectorSpec& d) {
  json j;
  if (const auto* r = std::get_if<RectangularProfile>(&d.profile.shape())) {
    j["start"] = r->a;
    j["end"] = r->b;
  } else {
    const auto& t = std::get<TabulatedProfile>(d.profile.shape());
    j["chi"] = {{"x", t.x}, {"values", t.chi}};
  }
  j["rate"] = d.rates.decay_a;
  j["shift"] = d.rates.shift;
  j["correlation_time"] = d.rates.correlation_time;
  return j;
}

json optional_json(double v) { return std::isnan(v) ? json("auto") : json(v); }

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  auto& e = c.experiment;
  e.absorber = BoundaryAbsorber{10e-6, 1e5};
  e.stage2_dt = 2e-6;
  e.tau_max = 64e-3;
  c.output_stride = 10;
  c.kijowski = KijowskiRequest{0.0, -0.5e-3, 1.0e-3, 3001};
  c.snapshots = {{2.3895e4, 0.041e-3}, {1.4337e3, 0.167e-3}};
  c.sweep_v0 = {3e-3, 5.48e-3, 10e-3, 18.3e-3, 30e-3};
  return c;
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    const auto p = msg.find("syntax error");
    throw ConfigError(location(text, e.byte == 0 ? 0 : e.byte - 1), p == std::string::npos ? msg : msg.substr(p));
  }
  RunConfig c = default_run_config();
  auto& e = c.experiment;
  Section top(root, "", {"particle", "packet", "detector1", "detector2", "grid", "solver", "output", "kijowski",
                         "reset_state", "discrete", "sweep"});

  if (top.has("particle")) {
    Section s(top.at("particle"), "particle", {"mass", "hbar"});
    double m = e.particle.mass, hb = e.particle.hbar;
    s.quantity("mass", Dimension::mass, m);
    s.quantity("hbar", Dimension::action, hb);
    e.particle = guarded("particle", [&] { return ParticleSpec(m, hb); });
  }
  if (top.has("packet")) e.packet = read_packet(top.at("packet"), "packet", e.packet);
  if (top.has("detector1")) e.detector1 = read_detector(top.at("detector1"), "detector1", e.detector1);
  if (top.has("detector2")) e.detector2 = read_detector(top.at("detector2"), "detector2", e.detector2);
  if (top.has("grid")) e.grid = read_grid(top.at("grid"), "grid", e.grid);
  if (top.has("solver")) {
    Section s(top.at("solver"), "solver",
              {"dt", "stage2_dt", "include_shift", "t_start", "t_end", "tau_max", "stop_fraction", "entry_points",
               "entry_times", "tau_grid", "method", "ensemble_tolerance", "absorber_width", "absorber_strength"});
    s.quantity("dt", Dimension::time, e.dt);
    s.quantity("stage2_dt", Dimension::time, e.stage2_dt);
    s.flag("include_shift", e.include_shift);
    s.optional_quantity("t_start", Dimension::time, e.t_start);
    s.optional_quantity("t_end", Dimension::time, e.t_end);
    s.optional_quantity("tau_max", Dimension::time, e.tau_max);
    s.quantity("stop_fraction", Dimension::dimensionless, e.stop_fraction);
    s.count("entry_points", e.n_entry);
    s.list("entry_times", Dimension::time, e.entry_times);
    s.list("tau_grid", Dimension::time, e.tau_grid);
    if (s.has("method")) {
      const auto& m = s.at("method");
      if (m == "ensemble") {
        e.method = PassageMethod::ensemble;
      } else if (m == "per_entry") {
        e.method = PassageMethod::per_entry;
      } else {
        throw ConfigError(s.path("method"), "expected \"ensemble\" or \"per_entry\"");
      }
    }
    s.quantity("ensemble_tolerance", Dimension::dimensionless, e.ensemble_tolerance);
    s.quantity("absorber_width", Dimension::length, e.absorber.width);
    s.quantity("absorber_strength", Dimension::rate, e.absorber.strength);
    if (e.absorber.width < 0.0 || e.absorber.strength < 0.0)
      throw ConfigError("solver", "absorber width and strength must be non-negative");
  }
  guarded("experiment", [&] {
    validate(e);
    return 0;
  });

  if (top.has("output")) {
    Section s(top.at("output"), "output", {"stride"});
    s.count("stride", c.output_stride);
    if (c.output_stride == 0) throw ConfigError("output.stride", "must be at least 1");
  }
  if (top.has("kijowski")) {
    Section s(top.at("kijowski"), "kijowski", {"x", "t_min", "t_max", "points"});
    s.quantity("x", Dimension::length, c.kijowski.x);
    s.quantity("t_min", Dimension::time, c.kijowski.t_min);
    s.quantity("t_max", Dimension::time, c.kijowski.t_max);
    s.count("points", c.kijowski.points);
  }
  if (!(c.kijowski.t_max > c.kijowski.t_min) || c.kijowski.points < 2)
    throw ConfigError("kijowski", "need t_max > t_min and at least 2 points");
  if (top.has("reset_state")) {
    Section s(top.at("reset_state"), "reset_state", {"snapshots"});
    if (s.has("snapshots")) {
      const auto& arr = s.at("snapshots");
      if (!arr.is_array()) throw ConfigError(s.path("snapshots"), "expected an array");
      c.snapshots.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = "reset_state.snapshots[" + std::to_string(i) + "]";
        Section item(arr[i], p, {"rate", "time"});
        SnapshotRequest r;
        if (!item.has("rate") || !item.has("time")) throw ConfigError(p, "needs rate and time");
        item.quantity("rate", Dimension::rate, r.rate);
        item.quantity("time", Dimension::time, r.time);
        if (!(r.rate > 0.0)) throw ConfigError(p + ".rate", "must be positive");
        c.snapshots.push_back(r);
      }
    }
  }
  if (top.has("discrete")) {
    Section s(top.at("discrete"), "discrete",
              {"bath", "packet", "delta_t", "samples", "edge", "check_convergence", "grid", "exclusion"});
    auto& d = c.discrete;
    if (s.has("bath")) d.config.bath = read_bath(s.at("bath"), "discrete.bath", d.config.bath);
    if (s.has("packet")) d.config.packet = read_packet(s.at("packet"), "discrete.packet", d.config.packet);
    if (s.has("grid")) d.grid = read_grid(s.at("grid"), "discrete.grid", d.grid);
    s.quantity("delta_t", Dimension::time, d.config.delta_t);
    s.count("samples", d.config.n_time_samples);
    s.quantity("edge", Dimension::length, d.config.edge);
    s.flag("check_convergence", d.config.check_convergence);
    s.quantity("exclusion", Dimension::length, d.exclusion);
  }
  c.discrete.config.particle = e.particle;
  guarded("discrete", [&] {
    validate(c.discrete.config);
    return 0;
  });
  if (top.has("sweep")) {
    Section s(top.at("sweep"), "sweep", {"v0"});
    s.list("v0", Dimension::velocity, c.sweep_v0);
  }
  for (double v : c.sweep_v0)
    if (!(v > 0.0)) throw ConfigError("sweep.v0", "velocities must be positive");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string echo_run_config(const RunConfig& c) {
  const auto& e = c.experiment;
  json j;
  j["particle"] = {{"mass", e.particle.mass}, {"hbar", e.particle.hbar}};
  j["packet"] = packet_json(e.packet);
  j["detector1"] = detector_json(e.detector1);
  j["detector2"] = detector_json(e.detector2);
  j["grid"] = grid_json(e.grid);
  j["solver"] = {{"dt", e.dt},
                 {"stage2_dt", e.stage2_dt},
                 {"include_shift", e.include_shift},
                 {"t_start", optional_json(e.t_start)},
                 {"t_end", optional_json(e.t_end)},
                 {"tau_max", optional_json(e.tau_max)},
                 {"stop_fraction", e.stop_fraction},
                 {"entry_points", e.n_entry},
                 {"entry_times", e.entry_times},
                 {"tau_grid", e.tau_grid},
                 {"method", e.method == PassageMethod::ensemble ? "ensemble" : "per_entry"},
                 {"ensemble_tolerance", e.ensemble_tolerance},
                 {"absorber_width", e.absorber.width},
                 {"absorber_strength", e.absorber.strength}};
  j["output"] = {{"stride", c.output_stride}};
  j["kijowski"] = {{"x", c.kijowski.x}, {"t_min", c.kijowski.t_min}, {"t_max", c.kijowski.t_max},
                   {"points", c.kijowski.points}};
  json snaps = json::array();
  for (const auto& s : c.snapshots) snaps.push_back({{"rate", s.rate}, {"time", s.time}});
  j["reset_state"] = {{"snapshots", snaps}};
  const auto& d = c.discrete;
  j["discrete"] = {{"bath",
                    {{"modes", d.config.bath.n_modes},
                     {"omega_max", d.config.bath.omega_max},
                     {"coupling", d.config.bath.coupling_G},
                     {"omega_0", d.config.bath.omega_0}}},
                   {"packet", packet_json(d.config.packet)},
                   {"delta_t", d.config.delta_t},
                   {"samples", d.config.n_time_samples},
                   {"edge", d.config.edge},
                   {"check_convergence", d.config.check_convergence},
                   {"grid", grid_json(d.grid)},
                   {"exclusion", d.exclusion}};
  j["sweep"] = {{"v0", c.sweep_v0}};
  return j.dump(2);
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto& x = a.experiment;
  const auto& y = b.experiment;
  const bool experiment =
      x.particle == y.particle && x.packet == y.packet && x.detector1 == y.detector1 && x.detector2 == y.detector2 &&
      x.grid == y.grid && x.absorber == y.absorber && x.dt == y.dt && x.stage2_dt == y.stage2_dt &&
      x.include_shift == y.include_shift && same(x.t_start, y.t_start) && same(x.t_end, y.t_end) &&
      same(x.tau_max, y.tau_max) && x.stop_fraction == y.stop_fraction && x.entry_times == y.entry_times &&
      x.n_entry == y.n_entry && x.tau_grid == y.tau_grid && x.method == y.method &&
      x.ensemble_tolerance == y.ensemble_tolerance;
  const auto& p = a.discrete;
  const auto& q = b.discrete;
  const bool discrete = p.config.bath == q.config.bath && p.config.packet == q.config.packet &&
                        p.config.particle == q.config.particle && p.config.delta_t == q.config.delta_t &&
                        p.config.n_time_samples == q.config.n_time_samples && p.config.edge == q.config.edge &&
                        p.config.check_convergence == q.config.check_convergence && p.grid == q.grid &&
                        p.exclusion == q.exclusion;
  return experiment && discrete && a.output_stride == b.output_stride && a.kijowski == b.kijowski &&
         a.snapshots == b.snapshots && a.sweep_v0 == b.sweep_v0;
}

}  // namespace passlab
