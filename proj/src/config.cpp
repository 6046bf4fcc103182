#include "hmcf/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace hmcf {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& v, double& out) {
  const std::string t = trim(v);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_int(const std::string& v, int& out) {
  const std::string t = trim(v);
  if (t.empty()) return false;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && p == t.data() + t.size();
}

bool parse_bool(const std::string& v, bool& out) {
  const std::string t = trim(v);
  if (t == "on" || t == "true" || t == "1") {
    out = true;
    return true;
  }
  if (t == "off" || t == "false" || t == "0") {
    out = false;
    return true;
  }
  return false;
}

bool parse_double_list(const std::string& v, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double d;
    if (!parse_double(item, d)) return false;
    out.push_back(d);
  }
  return !out.empty();
}

bool parse_int_list(const std::string& v, std::vector<int>& out) {
  out.clear();
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int d;
    if (!parse_int(item, d)) return false;
    out.push_back(d);
  }
  return !out.empty();
}

using Setter = std::function<bool(SimConfig&, const std::string&, std::string&)>;

// One entry per key: parse + range check; the error string names the field
// and its allowed range.
const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"experiment",
       [](SimConfig& c, const std::string& v, std::string& err) {
         const std::string t = trim(v);
         for (const char* k : {"simulate", "oracle", "verify", "minkowski", "stability"}) {
           if (t == k) {
             c.experiment = t;
             return true;
           }
         }
         err = "experiment must be one of simulate|oracle|verify|minkowski|stability";
         return false;
       }},
      {"geometry",
       [](SimConfig& c, const std::string& v, std::string& err) {
         const std::string t = trim(v);
         for (const char* k :
              {"circle", "ellipse", "sphere_band", "cylinder", "torus_band", "flat_band", "graph"}) {
           if (t == k) {
             c.geometry = t;
             return true;
           }
         }
         err = "geometry must be one of "
               "circle|ellipse|sphere_band|cylinder|torus_band|flat_band|graph";
         return false;
       }},
      {"n1",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int(v, c.n1) || c.n1 < 8) {
           err = "n1 must be an integer >= 8";
           return false;
         }
         return true;
       }},
      {"n2",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int(v, c.n2) || (c.n2 != 0 && c.n2 < 8)) {
           err = "n2 must be 0 (auto) or an integer >= 8";
           return false;
         }
         return true;
       }},
      {"radius",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.radius) || !(c.radius > 0.0)) {
           err = "radius must be > 0";
           return false;
         }
         return true;
       }},
      {"ellipse_a",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.ellipse_a) || !(c.ellipse_a > 0.0)) {
           err = "ellipse_a must be > 0";
           return false;
         }
         return true;
       }},
      {"ellipse_b",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.ellipse_b) || !(c.ellipse_b > 0.0)) {
           err = "ellipse_b must be > 0";
           return false;
         }
         return true;
       }},
      {"alpha_max",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.alpha_max) || !(c.alpha_max > 0.0 && c.alpha_max < 1.4)) {
           err = "alpha_max must lie in (0, 1.4)";
           return false;
         }
         return true;
       }},
      {"length",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.length) || !(c.length > 0.0)) {
           err = "length must be > 0";
           return false;
         }
         return true;
       }},
      {"torus_major",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.torus_major) || !(c.torus_major > 0.0)) {
           err = "torus_major must be > 0";
           return false;
         }
         return true;
       }},
      {"torus_minor",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.torus_minor) || !(c.torus_minor > 0.0)) {
           err = "torus_minor must be > 0";
           return false;
         }
         return true;
       }},
      {"r0",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.r0) || !(c.r0 > 0.0)) {
           err = "r0 must be > 0";
           return false;
         }
         return true;
       }},
      {"r1",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.r1)) {
           err = "r1 must be a finite number";
           return false;
         }
         return true;
       }},
      {"c",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.c) || !(c.c > 0.0)) {
           err = "c must be > 0";
           return false;
         }
         return true;
       }},
      {"velocity",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.velocity)) {
           err = "velocity must be a finite number";
           return false;
         }
         return true;
       }},
      {"epsilon",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.epsilon) || !(c.epsilon >= 0.0)) {
           err = "epsilon must be >= 0";
           return false;
         }
         return true;
       }},
      {"eps_list",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double_list(v, c.eps_list)) {
           err = "eps_list must be a comma-separated list of numbers";
           return false;
         }
         return true;
       }},
      {"horizon",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.horizon) || !(c.horizon > 0.0)) {
           err = "horizon must be > 0";
           return false;
         }
         return true;
       }},
      {"profile",
       [](SimConfig& c, const std::string& v, std::string& err) {
         const std::string t = trim(v);
         for (const char* k : {"sine_height", "sine_mixed", "bump"}) {
           if (t == k) {
             c.profile = t;
             return true;
           }
         }
         err = "profile must be one of sine_height|sine_mixed|bump";
         return false;
       }},
      {"mode_k",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int(v, c.mode_k) || c.mode_k < 1) {
           err = "mode_k must be an integer >= 1";
           return false;
         }
         return true;
       }},
      {"cfl_safety",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.cfl_safety) || !(c.cfl_safety > 0.0 && c.cfl_safety <= 0.9)) {
           err = "cfl_safety must lie in (0, 0.9]";
           return false;
         }
         return true;
       }},
      {"det_floor",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.det_floor) || !(c.det_floor > 0.0)) {
           err = "det_floor must be > 0";
           return false;
         }
         return true;
       }},
      {"h_max",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.h_max) || !(c.h_max > 0.0)) {
           err = "h_max must be > 0";
           return false;
         }
         return true;
       }},
      {"ode_tol",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.ode_tol) || !(c.ode_tol > 1e-14 && c.ode_tol < 1e-3)) {
           err = "ode_tol must lie in (1e-14, 1e-3)";
           return false;
         }
         return true;
       }},
      {"light_eps",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.light_eps) || !(c.light_eps > 0.0 && c.light_eps < 1e-2)) {
           err = "light_eps must lie in (0, 1e-2)";
           return false;
         }
         return true;
       }},
      {"t_end",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.t_end) || !(c.t_end >= 0.0)) {
           err = "t_end must be >= 0";
           return false;
         }
         return true;
       }},
      {"snapshot_every",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int(v, c.snapshot_every) || c.snapshot_every < 1) {
           err = "snapshot_every must be an integer >= 1";
           return false;
         }
         return true;
       }},
      {"output_dir",
       [](SimConfig& c, const std::string& v, std::string& err) {
         const std::string t = trim(v);
         if (t.empty()) {
           err = "output_dir must not be empty";
           return false;
         }
         c.output_dir = t;
         return true;
       }},
      {"precision",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int(v, c.precision) || c.precision < 6 || c.precision > 17) {
           err = "precision must lie in [6, 17]";
           return false;
         }
         return true;
       }},
      {"fixed_dt",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.fixed_dt) || !(c.fixed_dt >= 0.0)) {
           err = "fixed_dt must be >= 0 (0 = CFL-controlled)";
           return false;
         }
         return true;
       }},
      {"deturck",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_bool(v, c.deturck)) {
           err = "deturck must be on|off";
           return false;
         }
         return true;
       }},
      {"levels",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_int_list(v, c.levels) || c.levels.size() < 2) {
           err = "levels must be a comma-separated list of >= 2 integers";
           return false;
         }
         for (int n : c.levels) {
           if (n < 8) {
             err = "levels entries must be >= 8";
             return false;
           }
         }
         return true;
       }},
      {"t_star",
       [](SimConfig& c, const std::string& v, std::string& err) {
         if (!parse_double(v, c.t_star) || !(c.t_star > 0.0)) {
           err = "t_star must be > 0";
           return false;
         }
         return true;
       }},
  };
  return table;
}

bool apply_key(SimConfig& cfg, const std::string& key, const std::string& value,
               std::string& err) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) {
    err = "unknown key '" + key + "'";
    return false;
  }
  return it->second(cfg, value, err);
}

}  // namespace

std::vector<ConfigError> validate_config(const SimConfig& cfg) {
  std::vector<ConfigError> errors;
  auto need_2d = [&](const char* geom) {
    return cfg.geometry == geom;
  };
  if ((need_2d("sphere_band") || need_2d("cylinder") || need_2d("torus_band")) && cfg.n2 != 0 &&
      cfg.n2 < 8) {
    errors.push_back({0, "n2 must be >= 8 for 2D geometries"});
  }
  if (cfg.experiment == "stability" && cfg.geometry != "graph") {
    errors.push_back({0, "stability requires geometry = graph"});
  }
  if (!cfg.experiment.empty() && cfg.experiment != "stability" && cfg.geometry == "graph") {
    errors.push_back({0, "geometry = graph is only valid for the stability experiment"});
  }
  if (cfg.experiment == "verify" && cfg.geometry == "flat_band") {
    errors.push_back({0, "verify requires sphere_band, cylinder, ellipse or torus_band"});
  }
  return errors;
}

ConfigParse parse_config(const std::string& text) {
  ConfigParse out;
  SimConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        out.errors.push_back({lineno, "unterminated section header"});
      }
      continue;  // sections are organizational only
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back({lineno, "expected 'key = value'"});
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    std::string err;
    if (!apply_key(cfg, key, value, err)) {
      out.errors.push_back({lineno, err});
    }
  }
  for (const ConfigError& e : validate_config(cfg)) out.errors.push_back(e);
  if (out.errors.empty()) out.config = cfg;
  return out;
}

ConfigParse apply_overrides(SimConfig base, const std::vector<std::string>& overrides) {
  ConfigParse out;
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back({0, "override '" + ov + "' must be key=value"});
      continue;
    }
    const std::string key = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    std::string err;
    if (!apply_key(base, key, value, err)) {
      out.errors.push_back({0, err});
    }
  }
  for (const ConfigError& e : validate_config(base)) out.errors.push_back(e);
  if (out.errors.empty()) out.config = base;
  return out;
}

}  // namespace hmcf
