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

// Capacity-expansion models as explicit sparse LPs.
//
// Four planning models share one shape: buy capacity x_a at c_a per unit,
// route each commodity, and pay sigma per unit of demand that does not reach
// its sink. They differ in how the demand is described: a single vector
// (nominal, stochastic mean), a finite scenario list (discrete robust) or a
// polyhedron with flows restricted to affine functions of the demand (AARC).
//
// Row and column orders are fixed; see docs/models.md.

#ifndef RNCEP_MODEL_BUILD_HPP_
#define RNCEP_MODEL_BUILD_HPP_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rncep/lp.hpp"
#include "rncep/polyhedron.hpp"
#include "rncep/sndlib_io.hpp"
#include "rncep/uncertainty.hpp"

namespace rncep {

enum class VarFamily {
  kX,       // X(a)
  kF,       // F(k, i, a)
  kH,       // H(k, i)
  kTau,     // TAU
  kPhi,     // PHI(k, a)
  kPhi2,    // PHI2(k, l, a)
  kAlpha,   // ALPHA(k, v, i)
  kBetaUp,  // BETA_UP(k, v, l)
  kBetaLo,  // BETA_LO(k, v, l)
  kPi,      // PI(a, i)
  kRhoUp,   // RHO_UP(a, l)
  kRhoLo,   // RHO_LO(a, l)
  kXi,      // XI(k, a, i)
  kZetaUp,  // ZETA_UP(k, l, a)
  kZetaLo,  // ZETA_LO(k, l, a)
  kQ,       // Q(i)
  kR,       // R(k, l)
  kS,       // S(k, l)
  kT,       // T(k, l)
  kU,       // U(l)
  kVdual,   // Vdual(l)
  kW,       // W(k)
  kDemand,  // D(l), only in worst-case subproblems
};

const char* FamilyName(VarFamily family);

struct VarKey {
  VarFamily family = VarFamily::kX;
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  std::size_t i2 = 0;

  auto operator<=>(const VarKey&) const = default;
};

// Bijection between structured variable keys and LP columns.
class VariableCatalog {
 public:
  std::size_t Add(const VarKey& key);
  std::optional<std::size_t> Find(const VarKey& key) const;
  std::size_t At(const VarKey& key) const;  // throws on unknown keys

  const VarKey& KeyOf(std::size_t column) const { return keys_.at(column); }
  std::size_t size() const { return keys_.size(); }
  std::size_t Count(VarFamily family) const;

  // "X_3", "PHI2_0_1_5", ... Arity follows the family.
  std::string Name(std::size_t column) const;
  std::vector<std::string> Names() const;

 private:
  std::vector<VarKey> keys_;
  std::map<VarKey, std::size_t> index_;
};

enum class ModelKind { kNominal, kDiscreteRobust, kAarc, kStochasticMean, kEvaluationFlow };

struct Model {
  ModelKind kind = ModelKind::kNominal;
  LinearProgram lp;
  VariableCatalog catalog;
};

struct Endpoints {
  std::size_t source = 0;
  std::size_t sink = 0;
};

// Node indices of each commodity. Throws on unknown nodes or source == sink.
std::vector<Endpoints> ResolveCommodities(const NetworkSpec& net,
                                          const std::vector<Commodity>& commodities);

Model BuildNominal(const NetworkSpec& net, const std::vector<Commodity>& commodities,
                   std::span<const double> demand, double sigma);

Model BuildDiscreteRobust(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          const DiscreteSet& scenarios, double sigma);

Model BuildAarc(const NetworkSpec& net, const std::vector<Commodity>& commodities,
                const Polyhedron& uncertainty, double sigma);

Model BuildStochasticMean(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          const MeanDemand& mean, double sigma);

// Recourse problem for a fixed investment: minimize total outsourced demand
// with capacities u_a + x_a.
Model BuildEvaluationFlow(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          std::span<const double> investment,
                          std::span<const double> demand);

// x_a from a solved planning model; values within tol below zero are clamped.
std::vector<double> ExtractFirstStage(const LpSolution& solution,
                                      const VariableCatalog& catalog,
                                      double tol = 1e-6);

// f^k_a(d) = phi[k][a] + sum_l Phi[k][l][a] d_l
struct AffinePolicy {
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<std::vector<double>>> Phi;

  std::size_t commodity_count() const { return phi.size(); }
  std::size_t arc_count() const { return phi.empty() ? 0 : phi.front().size(); }
  // K x |A| realized flows.
  std::vector<std::vector<double>> Flow(std::span<const double> demand) const;
};

AffinePolicy ExtractAffinePolicy(const LpSolution& solution,
                                 const VariableCatalog& catalog);

// Largest violation of the flow-conservation, capacity and nonnegativity
// constraints by the realized flows of `policy` at demand `d`.
double MaxPolicyViolation(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                          const AffinePolicy& policy, std::span<const double> investment,
                          std::span<const double> d);

// Outsourced demand sum_k [d_k - net inflow at t^k]_+ of the realized flows.
double PolicyOutsourcing(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                         const AffinePolicy& policy, std::span<const double> d);

// --- Worst-case subproblems over the polyhedron -----------------------------

// max g^T d over d in P, written as the minimization of -g^T d over columns
// D(l). The optimal value is -objective.
LinearProgram BuildWorstCasePrimal(const Polyhedron& p, std::span<const double> g);

// Its LP dual: min b^T alpha + upper^T beta_up - lower^T beta_lo subject to
// V^T alpha + beta_up - beta_lo >= g, all variables >= 0. Built by the same
// routine that writes the dual blocks into the AARC.
LinearProgram BuildWorstCaseDual(const Polyhedron& p, std::span<const double> g);

// Objective coefficients of the three worst-case subproblems for a fixed
// affine policy.
std::vector<double> FlowFamilyCoefficients(const NetworkSpec& net,
                                           const AffinePolicy& policy,
                                           std::size_t k, std::size_t v);
std::vector<double> CapacityFamilyCoefficients(const AffinePolicy& policy, std::size_t a);
std::vector<double> PositivityFamilyCoefficients(const AffinePolicy& policy,
                                                 std::size_t k, std::size_t a);

// Relaxed outsourcing dual (over q, r, s, t, u, v, w) for a fixed policy; the
// same rows the AARC objective family uses. Its optimum times sigma is the
// AARC's outsourcing term for that policy.
LinearProgram BuildOutsourcingDual(const NetworkSpec& net,
                                   const std::vector<Endpoints>& ends,
                                   const Polyhedron& p, const AffinePolicy& policy);

inline constexpr std::size_t kMaxOracleCommodities = 12;

// Exact max over d in P of sigma * sum_k [d_k - net inflow_k(d)]_+ under a
// fixed affine policy, by enumerating all 2^K sign patterns and solving the
// inner LP over d for each. K is capped at kMaxOracleCommodities.
double WorstCaseOutsourcingOracle(const NetworkSpec& net,
                                  const std::vector<Endpoints>& ends,
                                  const Polyhedron& p, const AffinePolicy& policy,
                                  double sigma, const SolveOptions& options = {});

}  // namespace rncep

#endif  // RNCEP_MODEL_BUILD_HPP_
