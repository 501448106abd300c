// matopt/check.hpp
//
// Copyright 2026 The matopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MATOPT_CHECK_HPP
#define MATOPT_CHECK_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace matopt {

// Thrown on every contract violation (bad shapes, singular inputs,
// non-finite results, malformed files).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matopt

// Contract check; the message part is streamed, e.g.
//   MATOPT_CHECK(a.cols() == b.rows(), "matmul: " << a.cols() << " vs " << b.rows());
#define MATOPT_CHECK(cond, msg)                          \
  do {                                                   \
    if (!(cond)) {                                       \
      std::ostringstream matopt_check_oss_;              \
      matopt_check_oss_ << msg;                          \
      throw ::matopt::Error(matopt_check_oss_.str());    \
    }                                                    \
  } while (0)

#endif  // MATOPT_CHECK_HPP
