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

#include "tailsel/util.hpp"

#include <omp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tailsel {

void SetMaxThreads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int MaxThreads() { return omp_get_max_threads(); }

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw Error("read failure on " + path);
  return out.str();
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::string content = ReadFile(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::size_t len = end - start;
    // tolerate CRLF input
    if (len > 0 && content[start + len - 1] == '\r') --len;
    lines.emplace_back(content, start, len);
    start = end + 1;
  }
  return lines;
}

void WriteFile(const std::string& path, const std::string& content) {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + partial + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write failure on " + partial);
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw Error("cannot rename " + partial + " to " + path + ": " +
                      ec.message());
}

std::string FormatDouble(double v) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char cand[64];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    double back;
    std::sscanf(cand, "%lf", &back);
    if (back == v) return cand;
  }
  return std::string(buf, n);
}

}  // namespace tailsel
