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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "navkit/error.hpp"
#include "navkit/sim.hpp"

namespace navkit {
namespace {

std::string Source(const std::string& rel) { return std::string(NAVKIT_SOURCE_DIR) + "/" + rel; }

TEST(Sim, CsvRoundTripIsExact) {
  TrajectoryLog log;
  log.records.push_back({0.0, {0.1, 1.0 / 3.0, 0.0}, -2.5, 0.707, 1.414, "M1", 1e-17, -1});
  log.records.push_back({0.1, {1e300, -4.9e-324, 0.0}, 3.0, 0.0, -1.414, "M2", 2.0, 7});
  std::stringstream s;
  WriteCsv(log, s);
  const TrajectoryLog back = ReadCsv(s);
  ASSERT_EQ(back.records.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const TrajectoryRecord& a = log.records[i];
    const TrajectoryRecord& b = back.records[i];
    EXPECT_EQ(a.t, b.t);
    EXPECT_EQ(a.position, b.position);
    EXPECT_EQ(a.theta, b.theta);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.omega, b.omega);
    EXPECT_EQ(a.mode, b.mode);
    EXPECT_EQ(a.d_min, b.d_min);
    EXPECT_EQ(a.obstacle_id, b.obstacle_id);
  }
}

TEST(Sim, EmptyLogIsHeaderOnly) {
  std::stringstream s;
  WriteCsv(TrajectoryLog{}, s);
  EXPECT_EQ(s.str(), "t,x,y,theta,v,omega,mode,dmin,obstacle_id\n");
  EXPECT_TRUE(ReadCsv(s).records.empty());
  std::istringstream bad("a,b\n");
  EXPECT_THROW(ReadCsv(bad), Error);
}

TEST(Sim, OpenWaterPathIsNearlyStraight) {
  const Scenario s = LoadScenario(Source("scenarios/no_obstacles.json"));
  EXPECT_TRUE(s.obstacles.empty());
  const RunResult r = RunSim(s);
  ASSERT_TRUE(r.summary.reached);
  const double straight = Distance(s.start, s.goal);
  EXPECT_LE(r.summary.path_length, 1.02 * straight);
  EXPECT_GE(r.summary.path_length, straight - s.goal_tolerance() - 1e-9);
}

TEST(Sim, InvalidObstacleSpeedIsRejected) {
  try {
    LoadScenario(Source("tests/data/invalid_obstacle_speed.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstraintViolation);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Sim, SingleObstacleScenarioFields) {
  const Scenario s = LoadScenario(Source("scenarios/ch2_single_obstacle.json"));
  EXPECT_EQ(s.caps.v_max, 0.707);
  EXPECT_EQ(s.caps.u_max, 1.414);
  EXPECT_EQ(s.start, Vec3(0, 0, 0));
  EXPECT_EQ(s.goal, Vec3(10, 10, 0));
  ASSERT_EQ(s.obstacles.size(), 1u);
  EXPECT_EQ(s.planner, PlannerKind::kPlanner2d);
}

TEST(Sim, UnknownKeyIsAParseError) {
  try {
    ParseScenario(R"({"dimension": 2, "start": [0,0], "goal": [1,1], "obstacles": [], "speed": 3})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

TEST(Sim, PathLengthSumsLoggedDisplacements) {
  const RunResult r = RunSim(LoadScenario(Source("scenarios/ch2_single_obstacle.json")));
  ASSERT_TRUE(r.summary.reached);
  double sum = 0.0;
  const auto& rec = r.log.records;
  for (std::size_t i = 1; i < rec.size(); ++i) sum += Distance(rec[i].position, rec[i - 1].position);
  EXPECT_NEAR(r.summary.path_length, sum, 1e-9);
  EXPECT_GT(r.summary.min_clearance, 0.0);
  for (const TrajectoryRecord& t : rec) {
    EXPECT_LE(std::abs(t.v), 0.707);
    EXPECT_LE(std::abs(t.omega), 1.414);
    EXPECT_EQ(t.obstacle_id != -1, t.mode == "M2");
  }
}

TEST(Sim, RunsAreDeterministic) {
  const Scenario s = LoadScenario(Source("scenarios/ch2_six_obstacles.json"));
  std::ostringstream a, b;
  WriteCsv(RunSim(s).log, a);
  WriteCsv(RunSim(s).log, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sim, ScenarioJsonRoundTrip) {
  const Scenario s = LoadScenario(Source("scenarios/ch2_six_obstacles.json"));
  const Scenario back = ParseScenario(ScenarioToJson(s));
  std::ostringstream a, b;
  WriteCsv(RunSim(s).log, a);
  WriteCsv(RunSim(back).log, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sim, RandomScenariosAreValid) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = RandomScenario2d(seed);
    EXPECT_NO_THROW(ValidateScenario(s, ExpandObstacles(s, EffectiveSeed(s)))) << "seed " << seed;
  }
}

}  // namespace
}  // namespace navkit
