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

#pragma once

#include "navkit/kernels/kernels.hpp"

namespace navkit::kernels {

#if defined(NAVKIT_HAVE_AVX2)
// Defined in avx2.cpp, which is the only translation unit built with -mavx2.
const KernelTable& Avx2Table();
#endif

}  // namespace navkit::kernels
