// Copyright 2026 The tailsel Authors
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

#ifndef TAILSEL_UTIL_HPP_
#define TAILSEL_UTIL_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace tailsel {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Caps the number of OpenMP worker threads (0 keeps the runtime default).
void SetMaxThreads(int n);
int MaxThreads();

// Whole-file I/O.  Reads fail with Error; writes go through a ".partial"
// temp file that is renamed into place once complete, so an aborted run
// never leaves a truncated file under the final name.
std::string ReadFile(const std::string& path);
std::vector<std::string> ReadLines(const std::string& path);
void WriteFile(const std::string& path, const std::string& content);

std::string FormatDouble(double v);  // shortest round-trippable form

}  // namespace tailsel

#endif  // TAILSEL_UTIL_HPP_
