// Copyright 2026 The uniclass Authors
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

#ifndef UNICLASS_ERROR_HPP_
#define UNICLASS_ERROR_HPP_

#include <sstream>
#include <stdexcept>
#include <string>

namespace uniclass {

// All recoverable failures (bad inputs, parse errors, dimension mismatches,
// diverged training runs) surface as this exception type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

namespace detail {

inline void append_all(std::ostringstream&) {}

template <typename T, typename... Rest>
void append_all(std::ostringstream& out, const T& value, const Rest&... rest) {
  out << value;
  append_all(out, rest...);
}

}  // namespace detail

template <typename... Args>
std::string str_cat(const Args&... args) {
  std::ostringstream out;
  detail::append_all(out, args...);
  return out.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(str_cat(args...));
}

template <typename... Args>
void require(bool condition, const Args&... args) {
  if (!condition) fail(args...);
}

}  // namespace uniclass

#endif  // UNICLASS_ERROR_HPP_
