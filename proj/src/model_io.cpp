#include "qpbound/model_io.hpp"

#include <cmath>
#include <fstream>

namespace qpbound::io {

namespace {

const std::array<std::pair<const char*, int>, 4> kComponentKeys = {{
    {"horizontal", 1},
    {"vertical", 2},
    {"origin", 3},
    {"interior", 4},
}};

Step step_from_key(const std::string& key) {
  for (Step u : kAllSteps)
    if (step_name(u) == key) return u;
  throw Error("model file: unknown direction key \"" + key + "\"");
}

RandomWalkSpec family_from_json(const ordered_json& j) {
  std::string family = j.at("family").get<std::string>();
  auto get = [&](const char* key) -> double {
    if (!j.contains(key))
      throw Error("model file: family \"" + family + "\" needs key \"" +
                  key + "\"");
    return j.at(key).get<double>();
  };
  if (family == "joint_departures") {
    for (const auto& [key, _] : j.items())
      if (std::string k = key; k != "family" && k != "lambda1" && k != "lambda2" &&
          k != "mu" && k != "mu1" && k != "mu2" && k != "mu_star")
        throw Error("model file: unknown key \"" + key + "\"");
    double mu1, mu2;
    if (j.contains("mu_star")) {
      mu1 = mu2 = j.at("mu_star").get<double>();
    } else {
      mu1 = get("mu1");
      mu2 = get("mu2");
    }
    return joint_departures(get("lambda1"), get("lambda2"), get("mu"), mu1, mu2);
  }
  if (family == "coupled_processors") {
    for (const auto& [key, _] : j.items())
      if (std::string k = key; k != "family" && k != "lambda1" && k != "lambda2" &&
          k != "mu1" && k != "mu2" && k != "mu_h" && k != "mu_v")
        throw Error("model file: unknown key \"" + key + "\"");
    return coupled_processors(get("lambda1"), get("lambda2"), get("mu1"),
                              get("mu2"), get("mu_h"), get("mu_v"));
  }
  throw Error("model file: unknown family \"" + family + "\"");
}

}  // namespace

RandomWalkSpec walk_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("model file: expected a JSON object");
  if (j.contains("family")) return family_from_json(j);

  RandomWalkSpec w;
  for (const auto& [key, value] : j.items()) {
    int k = 0;
    for (const auto& [name, comp] : kComponentKeys)
      if (key == name) k = comp;
    if (k == 0) throw Error("model file: unknown key \"" + key + "\"");
    if (!value.is_object())
      throw Error("model file: \"" + key + "\" must map directions to numbers");
    for (const auto& [dir, p] : value.items())
      w.set_p(k, step_from_key(dir), p.get<double>());
  }
  return w;
}

RandomWalkSpec load_walk(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("model file " + path + ": " + e.what());
  }
  return walk_from_json(j);
}

ordered_json walk_to_json(const RandomWalkSpec& w) {
  ordered_json j;
  for (const auto& [name, k] : kComponentKeys) {
    ordered_json row;
    for (Step u : neighborhood(k))
      if (w.p(k, u) != 0.0) row[step_name(u)] = w.p(k, u);
    j[name] = std::move(row);
  }
  return j;
}

CLinearFn measure_from_json(const ordered_json& j) {
  if (j.is_string()) return load_measure(j.get<std::string>());
  if (!j.is_object()) throw Error("measure: expected an object or an alias");
  static const std::array<std::pair<const char*, std::pair<int, int>>, 8> slots = {{
      {"f10", {1, 0}}, {"f11", {1, 1}}, {"f20", {2, 0}}, {"f22", {2, 2}},
      {"f30", {3, 0}}, {"f40", {4, 0}}, {"f41", {4, 1}}, {"f42", {4, 2}},
  }};
  CLinearFn f;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, slot] : slots)
      if (key == name) {
        f.set_coef(slot.first, slot.second, value.get<double>());
        known = true;
      }
    if (!known) throw Error("measure: unknown key \"" + key + "\"");
  }
  return f;
}

CLinearFn load_measure(const std::string& id_or_path) {
  if (id_or_path == "indicator_origin") return measure_indicator_origin();
  if (id_or_path == "n1") return measure_n1();
  if (id_or_path == "n2") return measure_n2();
  std::ifstream in(id_or_path);
  if (!in)
    throw Error("measure: \"" + id_or_path +
                "\" is neither a known alias nor a readable file");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("measure file " + id_or_path + ": " + e.what());
  }
  return measure_from_json(j);
}

ordered_json measure_to_json(const CLinearFn& f) {
  ordered_json j;
  j["f10"] = f.f10;
  j["f11"] = f.f11;
  j["f20"] = f.f20;
  j["f22"] = f.f22;
  j["f30"] = f.f30;
  j["f40"] = f.f40;
  j["f41"] = f.f41;
  j["f42"] = f.f42;
  return j;
}

ordered_json certificate_to_json(const BoundCertificate& cert) {
  ordered_json j;
  j["kind"] = to_string(cert.kind);
  j["bound"] = cert.bound;
  j["fbar"] = measure_to_json(cert.fbar);
  j["g"] = measure_to_json(cert.g);
  j["a1"] = measure_to_json(cert.a1);
  j["a2"] = measure_to_json(cert.a2);
  j["b1"] = measure_to_json(cert.b1);
  j["b2"] = measure_to_json(cert.b2);
  ordered_json e = ordered_json::array();
  for (const auto& [u, fn] : cert.e_family) {
    ordered_json entry;
    entry["direction"] = step_name(u);
    entry["fn"] = measure_to_json(fn);
    e.push_back(std::move(entry));
  }
  j["e"] = std::move(e);
  j["lp"] = {{"variables", cert.lp_stats.num_variables},
             {"constraints", cert.lp_stats.num_constraints},
             {"status", cert.lp_stats.solver_status}};
  return j;
}

ordered_json coefficient_table_to_json(const CoefficientTable& c) {
  ordered_json j;
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 4; ++k)
      for (int jj = 1; jj <= 2; ++jj)
        for (Step u : neighborhood(k)) {
          double v = c.c(i, k, jj, u);
          if (v == 0.0) continue;
          std::string key = "c[" + std::to_string(i) + "][" + std::to_string(k) +
                            "][" + std::to_string(jj) + "][" +
                            std::to_string(u.u1) + "," + std::to_string(u.u2) +
                            "]";
          j[key] = v;
        }
  return j;
}

RandomWalkSpec apply_perturbation_rule(const RandomWalkSpec& original,
                                       const std::string& rule) {
  if (rule == "split" || rule == "swap") {
    double lambda1 = original.p(4, kE1);
    double lambda2 = original.p(4, kE2);
    double mu = original.p(4, -kD1);
    double mu_star = original.p(1, -kE1);
    if (mu <= 0)
      throw Error("perturbation rule \"" + rule +
                  "\" applies to joint-departures walks only");
    if (rule == "split")
      return joint_departures(lambda1, lambda2, mu, mu / 2, mu / 2);
    return joint_departures(lambda1, lambda2, mu, mu - mu_star, mu_star);
  }
  if (rule == "product_form") {
    double lambda1 = original.p(4, kE1);
    double lambda2 = original.p(4, kE2);
    double mu1 = original.p(4, -kE1);
    double mu2 = original.p(4, -kE2);
    double mu_h = original.p(1, -kE1);
    if (mu1 <= 0 || mu2 <= 0)
      throw Error(
          "perturbation rule \"product_form\" applies to coupled-processors "
          "walks only");
    return coupled_processors(lambda1, lambda2, mu1, mu2, mu_h,
                              mu1 + mu2 - mu_h);
  }
  throw Error("unknown perturbation rule \"" + rule + "\"");
}

}  // namespace qpbound::io
