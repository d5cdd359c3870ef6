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

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad number '" + s + "'");
  }
  return v;
}

int ParseInt(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad integer '" + s + "'");
  }
  return v;
}

constexpr const char* kHeader2d = "t,x,y,theta,v,omega,mode,dmin,obstacle_id";
constexpr const char* kHeader3d = "t,x,y,z,v,omega,mode,dmin,obstacle_id";

nlohmann::json JsonNumber(double v) {
  if (std::isfinite(v)) return v;
  return FormatDouble(v);
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void WriteCsv(const TrajectoryLog& log, std::ostream& out) {
  const bool planar = log.dimension == 2;
  out << (planar ? kHeader2d : kHeader3d) << '\n';
  for (const TrajectoryRecord& r : log.records) {
    out << FormatDouble(r.t) << ',' << FormatDouble(r.position.x) << ',' << FormatDouble(r.position.y)
        << ',' << FormatDouble(planar ? r.theta : r.position.z) << ',' << FormatDouble(r.v) << ','
        << FormatDouble(r.omega) << ',' << r.mode << ',' << FormatDouble(r.d_min) << ','
        << r.obstacle_id << '\n';
  }
}

TrajectoryLog ReadCsv(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, "empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line == kHeader2d) {
    log.dimension = 2;
  } else if (line == kHeader3d) {
    log.dimension = 3;
  } else {
    throw Error(ErrorCode::kParseError, "unexpected header '" + line + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != 9) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(lineno) + ": expected 9 fields, got " + std::to_string(f.size()));
    }
    TrajectoryRecord r;
    r.t = ParseDouble(f[0]);
    r.position.x = ParseDouble(f[1]);
    r.position.y = ParseDouble(f[2]);
    if (log.dimension == 2) {
      r.theta = ParseDouble(f[3]);
    } else {
      r.position.z = ParseDouble(f[3]);
    }
    r.v = ParseDouble(f[4]);
    r.omega = ParseDouble(f[5]);
    r.mode = f[6];
    r.d_min = ParseDouble(f[7]);
    r.obstacle_id = ParseInt(f[8]);
    log.records.push_back(std::move(r));
  }
  return log;
}

void WriteJsonl(const TrajectoryLog& log, std::ostream& out) {
  for (const TrajectoryRecord& r : log.records) {
    nlohmann::json j;
    j["t"] = r.t;
    j["x"] = r.position.x;
    j["y"] = r.position.y;
    if (log.dimension == 2) {
      j["theta"] = r.theta;
    } else {
      j["z"] = r.position.z;
    }
    j["v"] = r.v;
    j["omega"] = r.omega;
    j["mode"] = r.mode;
    j["dmin"] = JsonNumber(r.d_min);
    j["obstacle_id"] = r.obstacle_id;
    out << j.dump() << '\n';
  }
}

std::string SummaryToJson(const RunSummary& summary) {
  nlohmann::json j;
  j["reached"] = summary.reached;
  j["collided"] = summary.collided;
  j["steps"] = summary.steps;
  j["path_length"] = summary.path_length;
  j["min_clearance"] = JsonNumber(summary.min_clearance);
  j["termination"] = summary.termination;
  j["violations"] = summary.violations;
  return j.dump(2);
}

void RenderSvg(const Scenario& s, const RunResult& run, std::ostream& out, std::size_t snapshot_every) {
  std::vector<Vec2> pts{s.start.Xy(), s.goal.Xy()};
  for (const TrajectoryRecord& r : run.log.records) pts.push_back(r.position.Xy());
  std::vector<std::vector<Vec2>> outlines;
  if (snapshot_every == 0) snapshot_every = 1;
  const std::size_t last = run.log.records.empty() ? 0 : run.log.records.size() - 1;
  for (const ObstacleTrack& t : run.tracks) {
    for (std::size_t k = 0; k <= last && k < t.steps(); k += snapshot_every) {
      std::vector<Vec2> outline;
      if (t.spatial) {
        const Vec3 c = t.centers[k];
        for (int i = 0; i < 48; ++i) {
          const double a = 2.0 * kPi * i / 48.0;
          outline.push_back({c.x + t.semi_axes.x * std::cos(a), c.y + t.semi_axes.y * std::sin(a)});
        }
      } else {
        outline = t.BoundaryAt(k).vertices;
      }
      pts.insert(pts.end(), outline.begin(), outline.end());
      outlines.push_back(std::move(outline));
    }
  }
  BoundingBox box = Bounds(pts);
  const double pad = 0.5;
  box.min -= Vec2{pad, pad};
  box.max += Vec2{pad, pad};
  const double w = box.max.x - box.min.x;
  const double h = box.max.y - box.min.y;
  const double scale = 600.0 / std::max(w, h);
  auto px = [&](const Vec2& p) {
    return FormatDouble((p.x - box.min.x) * scale) + "," + FormatDouble((box.max.y - p.y) * scale);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << FormatDouble(w * scale) << "\" height=\""
      << FormatDouble(h * scale) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& outline : outlines) {
    out << "<polygon fill=\"none\" stroke=\"#888\" stroke-width=\"1\" points=\"";
    for (const Vec2& v : outline) out << px(v) << ' ';
    out << "\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"2\" points=\"";
  for (const TrajectoryRecord& r : run.log.records) out << px(r.position.Xy()) << ' ';
  out << "\"/>\n";
  auto marker = [&](const Vec2& p, const char* color) {
    const std::string xy = px(p);
    const auto comma = xy.find(',');
    out << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1)
        << "\" r=\"5\" fill=\"" << color << "\"/>\n";
  };
  marker(s.start.Xy(), "green");
  marker(s.goal.Xy(), "red");
  out << "</svg>\n";
}

}  // namespace navkit
