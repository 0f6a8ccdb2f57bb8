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

#ifndef DARKTRAJ_IO_HPP
#define DARKTRAJ_IO_HPP

#include <string>

#include <json.hpp>

#include "darktraj/channel.hpp"
#include "darktraj/darkspace.hpp"
#include "darktraj/family.hpp"

namespace darktraj {

using Json = nlohmann::json;

// Complex matrices are serialized as rows of [re, im] pairs; doubles
// round-trip exactly (shortest-representation printing).
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json ensemble_to_json(const KrausEnsemble& e);
KrausEnsemble ensemble_from_json(const Json& j);

Json channel_report_to_json(const ValidationReport& v, const ChannelReport& r);

Json atlas_to_json(const DarkAtlas& atlas);
DarkAtlas atlas_from_json(const Json& j);

Json chi_to_json(const EmpiricalDarkMeasure& chi);
EmpiricalDarkMeasure chi_from_json(const Json& j);

Json group_to_json(const UnitaryGroupClosure& g);
UnitaryGroupClosure group_from_json(const Json& j);

Json family_to_json(const IsometryFamily& fam);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Fixed-format decimal used in CSV output ("%.17g": round-trips doubles).
std::string format_double(double x);

}  // namespace darktraj

#endif  // DARKTRAJ_IO_HPP
