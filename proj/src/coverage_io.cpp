// Copyright 2026 The navkit Authors
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

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "navkit/coverage.hpp"
#include "navkit/error.hpp"

namespace navkit {

namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

double Number(const json& j, const std::string& where) {
  if (!j.is_number()) Fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) Fail(where, "expected a finite number");
  return v;
}

Vec2 Point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) Fail(where, "expected [x, y]");
  return {Number(j[0], where + "[0]"), Number(j[1], where + "[1]")};
}

Heightmap ParseHeightmap(const json& j) {
  if (!j.is_object()) Fail("heightmap", "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "origin" && key != "spacing" && key != "nx" && key != "ny" && key != "values") {
      Fail("heightmap", "unknown key '" + key + "'");
    }
  }
  Heightmap h;
  h.origin = Point(j.at("origin"), "heightmap.origin");
  h.spacing = Number(j.at("spacing"), "heightmap.spacing");
  h.nx = static_cast<int>(Number(j.at("nx"), "heightmap.nx"));
  h.ny = static_cast<int>(Number(j.at("ny"), "heightmap.ny"));
  const json& v = j.at("values");
  if (!v.is_array()) Fail("heightmap.values", "expected an array");
  for (std::size_t i = 0; i < v.size(); ++i) {
    h.values.push_back(Number(v[i], "heightmap.values[" + std::to_string(i) + "]"));
  }
  return h;
}

}  // namespace

CoverageTask ParseCoverageTask(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail("region", e.what());
  }
  if (!j.is_object()) Fail("region", "expected an object");
  static const char* const kKeys[] = {"name", "polygon", "heightmap", "fov_theta", "z_min",
                                      "z_max", "radius", "lambda", "x0", "y0", "delta",
                                      "min_turn_radius", "c1", "c2", "clusters", "seed"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) Fail("region", "unknown key '" + key + "'");
  }
  CoverageTask t;
  try {
    if (!j.contains("polygon") || !j.at("polygon").is_array()) Fail("polygon", "expected an array");
    const json& poly = j.at("polygon");
    Vec2 sum;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      t.region.polygon.vertices.push_back(Point(poly[i], "polygon[" + std::to_string(i) + "]"));
      sum += t.region.polygon.vertices.back();
    }
    if (!poly.empty()) t.region.polygon.mass_center = sum / static_cast<double>(poly.size());
    if (j.contains("heightmap")) t.region.heightmap = ParseHeightmap(j.at("heightmap"));
    auto num = [&](const char* key, double& out) {
      if (j.contains(key)) out = Number(j.at(key), key);
    };
    num("fov_theta", t.fov.theta);
    num("z_min", t.fov.z_min);
    if (j.contains("z_max")) t.fov.z_max = Number(j.at("z_max"), "z_max");
    num("radius", t.radius);
    if (j.contains("lambda")) t.lambda = Number(j.at("lambda"), "lambda");
    num("x0", t.x0);
    num("y0", t.y0);
    if (j.contains("delta")) t.delta = Number(j.at("delta"), "delta");
    num("min_turn_radius", t.min_turn_radius);
    num("c1", t.c1);
    num("c2", t.c2);
    if (j.contains("clusters")) t.clusters = static_cast<int>(Number(j.at("clusters"), "clusters"));
    if (j.contains("seed")) t.seed = static_cast<std::uint64_t>(Number(j.at("seed"), "seed"));
  } catch (const json::exception& e) {
    Fail("region", e.what());
  }
  try {
    ValidateRegion(t.region);
  } catch (const Error& e) {
    Fail("region", e.what());
  }
  return t;
}

CoverageTask LoadCoverageTask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCoverageTask(buffer.str());
}

}  // namespace navkit
