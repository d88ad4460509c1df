/* Copyright 2026 The eteflow Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "ete/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ete/errors.hpp"

namespace ete {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

[[noreturn]] void fail(const std::string& path, const YAML::Node& node, const std::string& what) {
  throw ConfigError(path, line_of(node), what);
}

double as_number(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) fail(path, node, "expected a number");
  const std::string s = node.Scalar();
  if (s == ".inf" || s == "inf" || s == "+inf" || s == ".Inf" || s == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, node, "expected a number, got '" + s + "'");
  }
}

std::size_t as_site(const YAML::Node& node, const std::string& path, std::size_t n) {
  if (!node.IsScalar()) fail(path, node, "expected a site index");
  long long v = 0;
  try {
    v = node.as<long long>();
  } catch (const YAML::Exception&) {
    fail(path, node, "expected an integer site index, got '" + node.Scalar() + "'");
  }
  if (v < 1 || static_cast<std::size_t>(v) > n)
    fail(path, node, "site index " + std::to_string(v) + " outside 1.." + std::to_string(n));
  return static_cast<std::size_t>(v - 1);
}

void check_keys(const YAML::Node& map, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& kv : map) {
    const auto key = kv.first.Scalar();
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, kv.first, "unknown key '" + key + "'");
  }
}

RealMatrix read_matrix(const YAML::Node& node, const std::string& path, std::size_t n) {
  if (!node.IsSequence() || node.size() != n) fail(path, node, "expected " + std::to_string(n) + " rows");
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = node[i];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.IsSequence() || row.size() != n) fail(rp, row, "expected " + std::to_string(n) + " columns");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = as_number(row[j], rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

std::string leading_comments(std::string_view text) {
  std::string out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind('#', 0) != 0) break;
    out += line;
    out += '\n';
  }
  return out;
}

InitialStateSpec read_initial_state(const YAML::Node& node, std::size_t n) {
  const std::string path = "initial_state";
  if (!node.IsMap()) fail(path, node, "expected a mapping with a 'type' key");
  if (!node["type"]) fail(path, node, "missing 'type' (site | mixture | matrix)");
  const std::string type = node["type"].Scalar();
  if (type == "site") {
    check_keys(node, path, {"type", "site"});
    if (!node["site"]) fail(path, node, "missing 'site'");
    return initial::SingleSite{as_site(node["site"], path + ".site", n)};
  }
  if (type == "mixture") {
    check_keys(node, path, {"type", "exclude"});
    initial::MixtureExcluding mix;
    if (const auto ex = node["exclude"]) {
      if (!ex.IsSequence()) fail(path + ".exclude", ex, "expected a list of site indices");
      for (std::size_t i = 0; i < ex.size(); ++i)
        mix.excluded.push_back(as_site(ex[i], path + ".exclude[" + std::to_string(i) + "]", n));
    }
    return mix;
  }
  if (type == "matrix") {
    check_keys(node, path, {"type", "real", "imag"});
    if (!node["real"]) fail(path, node, "missing 'real'");
    const RealMatrix re = read_matrix(node["real"], path + ".real", n);
    RealMatrix im = RealMatrix::Zero(n, n);
    if (node["imag"]) im = read_matrix(node["imag"], path + ".imag", n);
    DensityMatrix rho(n, n);
    rho.real() = re;
    rho.imag() = im;
    return initial::Explicit{rho};
  }
  fail(path + ".type", node["type"], "unknown initial state type '" + type + "'");
}

}  // namespace

ModelFile parse_model(std::string_view text, std::string_view source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, std::string("YAML syntax error: ") + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", 0, "model document must be a mapping");
  check_keys(root, "",
             {"sites", "couplings", "distances", "gamma_recomb", "temperature", "reorganization_energy", "cutoff",
              "correlation_radius", "initial_state", "name"});

  ModelFile file;
  file.source = std::string(source_name);
  file.provenance = leading_comments(text);
  SystemModel& m = file.model;

  const auto sites = root["sites"];
  if (!sites || !sites.IsSequence() || sites.size() < 2) fail("sites", sites ? sites : root, "expected a list of >= 2 sites");
  const std::size_t n = sites.size();
  m.site_energies.resize(n);
  m.trap_rates = RealVector::Zero(n);
  m.disorder_fwhm = RealVector::Zero(n);
  std::vector<Eigen::Vector3d> positions;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = sites[i];
    const std::string p = "sites[" + std::to_string(i) + "]";
    if (!s.IsMap()) fail(p, s, "expected a mapping");
    check_keys(s, p, {"energy", "trap_rate", "fwhm", "position", "label"});
    if (!s["energy"]) fail(p, s, "missing 'energy'");
    m.site_energies(i) = as_number(s["energy"], p + ".energy");
    if (s["trap_rate"]) m.trap_rates(i) = as_number(s["trap_rate"], p + ".trap_rate");
    if (s["fwhm"]) m.disorder_fwhm(i) = as_number(s["fwhm"], p + ".fwhm");
    if (const auto pos = s["position"]) {
      if (!pos.IsSequence() || pos.size() != 3) fail(p + ".position", pos, "expected [x, y, z]");
      positions.emplace_back(as_number(pos[0], p + ".position[0]"), as_number(pos[1], p + ".position[1]"),
                             as_number(pos[2], p + ".position[2]"));
    }
  }
  if (!positions.empty() && positions.size() != n)
    fail("sites", sites, "position must be given for every site or for none");

  m.couplings = RealMatrix::Zero(n, n);
  if (const auto c = root["couplings"]) {
    if (!c.IsSequence()) fail("couplings", c, "expected a full matrix or a list of {sites, value}");
    if (c.size() > 0 && c[0].IsMap()) {
      for (std::size_t k = 0; k < c.size(); ++k) {
        const auto e = c[k];
        const std::string p = "couplings[" + std::to_string(k) + "]";
        if (!e.IsMap()) fail(p, e, "expected {sites: [i, j], value: V}");
        check_keys(e, p, {"sites", "value"});
        if (!e["sites"] || !e["sites"].IsSequence() || e["sites"].size() != 2) fail(p + ".sites", e, "expected [i, j]");
        if (!e["value"]) fail(p, e, "missing 'value'");
        const auto i = as_site(e["sites"][0], p + ".sites[0]", n);
        const auto j = as_site(e["sites"][1], p + ".sites[1]", n);
        if (i == j) fail(p + ".sites", e["sites"], "self-coupling is not allowed");
        const double v = as_number(e["value"], p + ".value");
        m.couplings(i, j) = v;
        m.couplings(j, i) = v;
      }
    } else {
      m.couplings = read_matrix(c, "couplings", n);
    }
  }

  if (const auto d = root["distances"]) {
    m.distances = read_matrix(d, "distances", n);
  } else if (!positions.empty()) {
    RealMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) = (positions[i] - positions[j]).norm();
    m.distances = r;
  }

  const auto scalar = [&](const char* key, double fallback) {
    const auto node = root[key];
    return node ? as_number(node, key) : fallback;
  };
  m.recombination_rate = scalar("gamma_recomb", 0.0);
  m.temperature = scalar("temperature", 0.0);
  m.reorganization_energy = scalar("reorganization_energy", 0.0);
  m.cutoff = scalar("cutoff", 150.0);
  m.correlation_radius = scalar("correlation_radius", 0.0);

  if (const auto init = root["initial_state"]) {
    file.initial_state = read_initial_state(init, n);
  } else {
    // Default: uniform mixture over every non-trapping site.
    initial::MixtureExcluding mix;
    for (std::size_t i = 0; i < n; ++i)
      if (m.trap_rates(i) > 0.0) mix.excluded.push_back(i);
    file.initial_state = mix;
  }

  const auto problems = model_problems(m);
  for (const auto& p : problems)
    if (p.rfind("no sink", 0) != 0) throw ConfigError("", 0, p);
  // Reject explicit matrices here so that errors surface at load time.
  (void)initial_state(m, file.initial_state);
  return file;
}

ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

void apply_override(ModelFile& file, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("--set", 0, "expected key=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  double value = 0.0;
  if (text == "inf" || text == ".inf" || text == "infinity") {
    value = std::numeric_limits<double>::infinity();
  } else {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
      throw ConfigError("--set " + key, 0, "not a number: '" + text + "'");
  }

  SystemModel& m = file.model;
  const auto per_site = [&](const std::string& prefix, RealVector& target) {
    const std::string idx = key.substr(prefix.size());
    std::size_t site = 0;
    const auto res = std::from_chars(idx.data(), idx.data() + idx.size(), site);
    if (res.ec != std::errc() || site < 1 || site > m.sites())
      throw ConfigError("--set " + key, 0, "site index must be in 1.." + std::to_string(m.sites()));
    target(site - 1) = value;
  };

  if (key == "temperature") m.temperature = value;
  else if (key == "reorganization_energy") m.reorganization_energy = value;
  else if (key == "cutoff") m.cutoff = value;
  else if (key == "correlation_radius") m.correlation_radius = value;
  else if (key == "gamma_recomb") m.recombination_rate = value;
  else if (key.rfind("trap_rate.", 0) == 0) per_site("trap_rate.", m.trap_rates);
  else if (key.rfind("energy.", 0) == 0) per_site("energy.", m.site_energies);
  else if (key.rfind("fwhm.", 0) == 0) per_site("fwhm.", m.disorder_fwhm);
  else throw ConfigError("--set " + key, 0, "unknown override key");

  for (const auto& p : model_problems(m))
    if (p.rfind("no sink", 0) != 0) throw ConfigError("--set " + key, 0, p);
}

std::string to_yaml(const ModelFile& file) {
  const SystemModel& m = file.model;
  const std::size_t n = m.sites();
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "sites" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < n; ++i) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "energy" << YAML::Value << m.site_energies(i) << YAML::Key
        << "trap_rate" << YAML::Value << m.trap_rates(i) << YAML::Key << "fwhm" << YAML::Value << m.disorder_fwhm(i)
        << YAML::EndMap;
  }
  out << YAML::EndSeq;
  const auto matrix = [&](const char* key, const RealMatrix& mat) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (std::size_t i = 0; i < n; ++i) {
      out << YAML::Flow << YAML::BeginSeq;
      for (std::size_t j = 0; j < n; ++j) out << mat(i, j);
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  };
  matrix("couplings", m.couplings);
  if (m.distances) matrix("distances", *m.distances);
  const auto number = [&](const char* key, double v) {
    out << YAML::Key << key << YAML::Value;
    if (std::isinf(v)) out << ".inf";
    else out << v;
  };
  number("gamma_recomb", m.recombination_rate);
  number("temperature", m.temperature);
  number("reorganization_energy", m.reorganization_energy);
  number("cutoff", m.cutoff);
  number("correlation_radius", m.correlation_radius);

  out << YAML::Key << "initial_state" << YAML::Value << YAML::Flow << YAML::BeginMap;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, initial::SingleSite>) {
          out << YAML::Key << "type" << YAML::Value << "site" << YAML::Key << "site" << YAML::Value << s.site + 1;
        } else if constexpr (std::is_same_v<T, initial::MixtureExcluding>) {
          out << YAML::Key << "type" << YAML::Value << "mixture" << YAML::Key << "exclude" << YAML::Value
              << YAML::BeginSeq;
          for (auto e : s.excluded) out << e + 1;
          out << YAML::EndSeq;
        } else {
          out << YAML::Key << "type" << YAML::Value << "matrix";
          matrix("real", s.rho.real());
          matrix("imag", s.rho.imag());
        }
      },
      file.initial_state);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return file.provenance + out.c_str() + "\n";
}

}  // namespace ete
