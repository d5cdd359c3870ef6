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

#include "navkit/error.hpp"

namespace navkit {

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPInsideObstacle: return "PInsideObstacle";
    case ErrorCode::kInsideCircle: return "InsideCircle";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kControlOutOfBounds: return "ControlOutOfBounds";
    case ErrorCode::kNonOrthogonalTurn: return "NonOrthogonalTurn";
    case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
    case ErrorCode::kHistoryTooShort: return "HistoryTooShort";
    case ErrorCode::kInsideForecastCircle: return "InsideForecastCircle";
    case ErrorCode::kZeroPrevVelocity: return "ZeroPrevVelocity";
    case ErrorCode::kCoincidentPoints: return "CoincidentPoints";
    case ErrorCode::kEmptySurfaceSet: return "EmptySurfaceSet";
    case ErrorCode::kGridTooSmall: return "GridTooSmall";
    case ErrorCode::kNoCoveredCells: return "NoCoveredCells";
    case ErrorCode::kEmptyTrace: return "EmptyTrace";
    case ErrorCode::kNegativeReading: return "NegativeReading";
    case ErrorCode::kDatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kInfeasibleCurvature: return "InfeasibleCurvature";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConstraintViolation: return "ConstraintViolation";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace navkit
