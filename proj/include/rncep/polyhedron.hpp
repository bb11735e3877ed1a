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

#ifndef RNCEP_POLYHEDRON_HPP_
#define RNCEP_POLYHEDRON_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rncep {

// { d : V d <= b, lower <= d <= upper }, V is M x K (row-major).
struct Polyhedron {
  std::vector<std::vector<double>> V;
  std::vector<double> b;
  std::vector<double> lower;
  std::vector<double> upper;
  // Seed of the generator that produced the random rows, if any.
  std::optional<std::uint64_t> seed;

  std::size_t row_count() const { return V.size(); }
  std::size_t dimension() const { return lower.size(); }

  // Shape checks plus lower <= upper.
  void Validate() const;

  bool operator==(const Polyhedron&) const = default;
};

inline constexpr double kContainmentTol = 1e-9;

bool Contains(const Polyhedron& p, std::span<const double> d,
              double tol = kContainmentTol);

// CSV blocks (`# V`, `# b`, `# lower`, `# upper`) under a `# polyhedron`
// header comment carrying seed, M and K.
std::string WritePolyhedronCsv(const Polyhedron& p);
Polyhedron ParsePolyhedronCsv(std::string_view text);

}  // namespace rncep

#endif  // RNCEP_POLYHEDRON_HPP_
