#include "stvf/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stvf {

using nlohmann::json;

Tolerances RunConfig::tolerances() const {
  Tolerances t = Tolerances::level(tol_level);
  if (tol_h) t.h = *tol_h;
  if (tol_tau) t.tau = *tol_tau;
  return t;
}

SchemeVariant RunConfig::variant() const {
  return SchemeVariant::parse(scheme, fp_tol, fp_max_iters);
}

TimeStepLimits RunConfig::limits() const { return {tau_min, tau_max.value_or(T / 10.0)}; }

void RunConfig::validate() const {
  const auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid config: ") + what);
  };
  need(T > 0.0, "T must be positive");
  need(lambda >= 0.0, "lambda must be >= 0");
  need(eps > 0.0, "eps must be positive");
  need(sigma_amplitude >= 0.0, "sigma_amplitude must be >= 0");
  need(tau0 > 0.0, "tau0 must be positive");
  need(macro_n >= 1, "macro_n must be >= 1");
  need(tol_level >= 0, "tol_level must be >= 0");
  need(!tol_h || *tol_h > 0.0, "tol_h must be positive");
  need(!tol_tau || *tol_tau > 0.0, "tol_tau must be positive");
  need(fp_tol > 0.0, "fp_tol must be positive");
  need(fp_max_iters >= 1, "fp_max_iters must be >= 1");
  need(scheme == "si" || scheme == "fix3" || scheme == "fix", "scheme must be si, fix3 or fix");
  need(cg_tol > 0.0, "cg_tol must be positive");
  need(paths >= 1, "paths must be >= 1");
  need(noise == "paper-sines" || noise == "none", "noise must be paper-sines or none");
  need(data_perturbation >= 0.0, "data_perturbation must be >= 0");
  need(tau_min > 0.0, "tau_min must be positive");
  need(limits().max >= tau_min, "tau_max must be >= tau_min");
  for (double s : snapshot_times) need(s >= 0.0 && s <= T, "snapshot_times must lie in [0, T]");
}

namespace {

template <typename V>
void read(const json& j, const char* key, V& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename V>
void read(const json& j, const char* key, std::optional<V>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  V v{};
  read(j, key, v);
  out = v;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "T",        "lambda",       "eps",         "sigma_amplitude", "tau0",
      "macro_n",  "tol_level",    "tol_h",       "tol_tau",         "fp_tol",
      "fp_max_iters", "scheme",   "cg_tol",      "paths",           "seed",
      "snapshot_times", "output_dir", "adapt_space", "adapt_time",  "noise",
      "data_perturbation", "tau_min", "tau_max"};
  return keys;
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known_keys().contains(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }
  RunConfig c;
  read(j, "T", c.T);
  read(j, "lambda", c.lambda);
  read(j, "eps", c.eps);
  read(j, "sigma_amplitude", c.sigma_amplitude);
  read(j, "tau0", c.tau0);
  read(j, "macro_n", c.macro_n);
  read(j, "tol_level", c.tol_level);
  read(j, "tol_h", c.tol_h);
  read(j, "tol_tau", c.tol_tau);
  read(j, "fp_tol", c.fp_tol);
  read(j, "fp_max_iters", c.fp_max_iters);
  read(j, "scheme", c.scheme);
  read(j, "cg_tol", c.cg_tol);
  read(j, "paths", c.paths);
  read(j, "seed", c.seed);
  read(j, "snapshot_times", c.snapshot_times);
  read(j, "output_dir", c.output_dir);
  read(j, "adapt_space", c.adapt_space);
  read(j, "adapt_time", c.adapt_time);
  read(j, "noise", c.noise);
  read(j, "data_perturbation", c.data_perturbation);
  read(j, "tau_min", c.tau_min);
  read(j, "tau_max", c.tau_max);
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string RunConfig::to_json() const {
  json j{{"T", T},
         {"lambda", lambda},
         {"eps", eps},
         {"sigma_amplitude", sigma_amplitude},
         {"tau0", tau0},
         {"macro_n", macro_n},
         {"tol_level", tol_level},
         {"fp_tol", fp_tol},
         {"fp_max_iters", fp_max_iters},
         {"scheme", scheme},
         {"cg_tol", cg_tol},
         {"paths", paths},
         {"seed", seed},
         {"snapshot_times", snapshot_times},
         {"output_dir", output_dir},
         {"adapt_space", adapt_space},
         {"adapt_time", adapt_time},
         {"noise", noise},
         {"data_perturbation", data_perturbation},
         {"tau_min", tau_min}};
  if (tol_h) j["tol_h"] = *tol_h;
  if (tol_tau) j["tol_tau"] = *tol_tau;
  if (tau_max) j["tau_max"] = *tau_max;
  return j.dump(2);
}

}  // namespace stvf
