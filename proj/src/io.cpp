// Copyright 2026 The darktraj authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "darktraj/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace darktraj {

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw IoError("matrix: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw IoError("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      if (!e.is_array() || e.size() != 2)
        throw IoError("matrix: entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json ensemble_to_json(const KrausEnsemble& e) {
  Json j;
  j["dim"] = e.dim;
  Json kraus = Json::array();
  for (const auto& it : e.items) {
    Json item;
    item["weight"] = it.weight;
    item["matrix"] = matrix_to_json(it.matrix);
    kraus.push_back(std::move(item));
  }
  j["kraus"] = std::move(kraus);
  return j;
}

KrausEnsemble ensemble_from_json(const Json& j) {
  KrausEnsemble e;
  try {
    e.dim = j.at("dim").get<int>();
    for (const auto& item : j.at("kraus")) {
      e.items.push_back(KrausItem{item.at("weight").get<double>(),
                                  matrix_from_json(item.at("matrix"))});
    }
  } catch (const Json::exception& ex) {
    throw IoError(std::string("ensemble: ") + ex.what());
  }
  return e;
}

Json channel_report_to_json(const ValidationReport& v,
                            const ChannelReport& r) {
  Json j;
  j["stochasticity_residual"] = v.residual;
  j["stochasticity_passed"] = v.passed;
  j["fixed_point"] = matrix_to_json(r.fixed_point.matrix());
  j["fixed_point_multiplicity"] = r.fixed_point_multiplicity;
  j["is_irreducible"] = r.is_irreducible;
  j["ambiguous"] = r.ambiguous;
  j["period"] = r.period;
  j["spectral_gap"] = r.spectral_gap;
  return j;
}

Json atlas_to_json(const DarkAtlas& atlas) {
  Json j;
  j["r_m"] = atlas.r_m;
  Json reps = Json::array();
  for (std::size_t i = 0; i < atlas.representatives.size(); ++i) {
    Json rep;
    rep["basis"] = matrix_to_json(atlas.representatives[i].basis());
    rep["seed"] = atlas.discovery_seeds[i];
    rep["residual"] = atlas.residuals[i];
    reps.push_back(std::move(rep));
  }
  j["representatives"] = std::move(reps);
  return j;
}

DarkAtlas atlas_from_json(const Json& j) {
  DarkAtlas atlas;
  try {
    atlas.r_m = j.at("r_m").get<int>();
    for (const auto& rep : j.at("representatives")) {
      atlas.representatives.emplace_back(matrix_from_json(rep.at("basis")));
      atlas.discovery_seeds.push_back(rep.at("seed").get<std::uint64_t>());
      atlas.residuals.push_back(rep.at("residual").get<double>());
    }
  } catch (const Json::exception& ex) {
    throw IoError(std::string("atlas: ") + ex.what());
  }
  return atlas;
}

Json chi_to_json(const EmpiricalDarkMeasure& chi) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < chi.atoms.size(); ++i) {
    Json a;
    a["basis"] = matrix_to_json(chi.atoms[i].basis());
    a["weight"] = chi.weights[i];
    atoms.push_back(std::move(a));
  }
  Json j;
  j["atoms"] = std::move(atoms);
  return j;
}

EmpiricalDarkMeasure chi_from_json(const Json& j) {
  EmpiricalDarkMeasure chi;
  try {
    for (const auto& a : j.at("atoms")) {
      chi.atoms.emplace_back(matrix_from_json(a.at("basis")));
      chi.weights.push_back(a.at("weight").get<double>());
    }
  } catch (const Json::exception& ex) {
    throw IoError(std::string("chi: ") + ex.what());
  }
  return chi;
}

Json group_to_json(const UnitaryGroupClosure& g) {
  Json j;
  j["r_m"] = g.r_m;
  j["kind"] = g.kind == UnitaryGroupClosure::Kind::kFinite ? "finite"
                                                           : "continuous";
  Json gens = Json::array();
  for (const auto& u : g.generators) gens.push_back(matrix_to_json(u));
  j["generators"] = std::move(gens);
  if (g.kind == UnitaryGroupClosure::Kind::kFinite) {
    Json els = Json::array();
    for (const auto& u : g.elements) els.push_back(matrix_to_json(u));
    j["elements"] = std::move(els);
    j["order"] = g.elements.size();
  } else {
    j["lie_dim"] = g.lie_dim;
  }
  return j;
}

UnitaryGroupClosure group_from_json(const Json& j) {
  UnitaryGroupClosure g;
  try {
    g.r_m = j.at("r_m").get<int>();
    g.kind = j.at("kind").get<std::string>() == "finite"
                 ? UnitaryGroupClosure::Kind::kFinite
                 : UnitaryGroupClosure::Kind::kContinuous;
    for (const auto& u : j.at("generators"))
      g.generators.push_back(matrix_from_json(u));
    if (g.kind == UnitaryGroupClosure::Kind::kFinite) {
      for (const auto& u : j.at("elements"))
        g.elements.push_back(matrix_from_json(u));
    } else {
      g.lie_dim = j.at("lie_dim").get<int>();
    }
  } catch (const Json::exception& ex) {
    throw IoError(std::string("group: ") + ex.what());
  }
  return g;
}

Json family_to_json(const IsometryFamily& fam) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < fam.size(); ++i) {
    Json en;
    en["basis"] = matrix_to_json(fam.entry(i).D.basis());
    en["isometry"] = matrix_to_json(fam.entry(i).J);
    entries.push_back(std::move(en));
  }
  Json j;
  j["r_m"] = fam.r_m();
  j["center_index"] = fam.center_index();
  j["entries"] = std::move(entries);
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::exception& ex) {
    throw IoError("bad JSON in " + path + ": " + ex.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace darktraj
