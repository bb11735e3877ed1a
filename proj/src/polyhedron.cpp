// Copyright 2026 The rncep Authors
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

#include "rncep/polyhedron.hpp"

#include <charconv>
#include <sstream>

#include "rncep/error.hpp"
#include "rncep/sndlib_io.hpp"

namespace rncep {

void Polyhedron::Validate() const {
  if (upper.size() != lower.size()) {
    Fail(ErrorCode::kInvalidArgument, "polyhedron bound vectors differ in length");
  }
  if (b.size() != V.size()) {
    Fail(ErrorCode::kInvalidArgument, "polyhedron has " + std::to_string(V.size()) +
                                          " rows but " + std::to_string(b.size()) +
                                          " right-hand sides");
  }
  for (const auto& row : V) {
    if (row.size() != dimension()) {
      Fail(ErrorCode::kInvalidArgument, "polyhedron row has wrong dimension");
    }
  }
  for (std::size_t k = 0; k < dimension(); ++k) {
    if (!(lower[k] <= upper[k])) {
      Fail(ErrorCode::kInvalidArgument, "polyhedron lower bound exceeds upper bound");
    }
  }
}

bool Contains(const Polyhedron& p, std::span<const double> d, double tol) {
  if (d.size() != p.dimension()) return false;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] < p.lower[k] - tol || d[k] > p.upper[k] + tol) return false;
  }
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) dot += p.V[i][k] * d[k];
    if (dot > p.b[i] + tol) return false;
  }
  return true;
}

namespace {

void EmitRow(std::ostringstream& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k > 0) out << ',';
    out << FormatDouble(row[k]);
  }
  out << '\n';
}

std::vector<double> ParseRow(std::string_view line, std::size_t line_no) {
  std::vector<double> row;
  if (line.empty()) return row;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    row.push_back(ParseDouble(cell, line_no));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

}  // namespace

std::string WritePolyhedronCsv(const Polyhedron& p) {
  p.Validate();
  std::ostringstream out;
  out << "# polyhedron";
  if (p.seed) out << " seed=" << *p.seed;
  out << " M=" << p.row_count() << " K=" << p.dimension() << '\n';
  out << "# V\n";
  for (const auto& row : p.V) EmitRow(out, row);
  out << "# b\n";
  for (double v : p.b) out << FormatDouble(v) << '\n';
  out << "# lower\n";
  EmitRow(out, p.lower);
  out << "# upper\n";
  EmitRow(out, p.upper);
  return out.str();
}

Polyhedron ParsePolyhedronCsv(std::string_view text) {
  Polyhedron p;
  std::string block;
  std::size_t expected_m = 0;
  std::size_t expected_k = 0;
  bool saw_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.rfind("# polyhedron", 0) == 0) {
      saw_header = true;
      std::istringstream fields{std::string(line.substr(12))};
      std::string field;
      while (fields >> field) {
        std::size_t eq = field.find('=');
        if (eq == std::string::npos) continue;
        std::string key = field.substr(0, eq);
        std::string_view value = std::string_view(field).substr(eq + 1);
        std::uint64_t number = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), number);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw Error(ErrorCode::kParse, "bad header field '" + field + "'", line_no);
        }
        if (key == "seed") p.seed = number;
        if (key == "M") expected_m = number;
        if (key == "K") expected_k = number;
      }
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      block = std::string(line.substr(2));
      continue;
    }
    if (block == "V") {
      p.V.push_back(ParseRow(line, line_no));
    } else if (block == "b") {
      p.b.push_back(ParseDouble(line, line_no));
    } else if (block == "lower") {
      p.lower = ParseRow(line, line_no);
    } else if (block == "upper") {
      p.upper = ParseRow(line, line_no);
    } else if (!line.empty()) {
      throw Error(ErrorCode::kParse, "data outside a known block", line_no);
    }
  }
  if (!saw_header) Fail(ErrorCode::kParse, "missing '# polyhedron' header");
  if (p.row_count() != expected_m || p.dimension() != expected_k) {
    Fail(ErrorCode::kParse, "polyhedron size does not match its header");
  }
  try {
    p.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return p;
}

}  // namespace rncep
