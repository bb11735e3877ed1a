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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "rncep/error.hpp"
#include "rncep/lp.hpp"
#include "rncep/sndlib_io.hpp"

namespace rncep {

std::size_t LinearProgram::AddColumn(double cost, double lower, double upper) {
  costs_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return costs_.size() - 1;
}

std::size_t LinearProgram::AddRow(RowSense sense, double rhs, const Terms& terms,
                                  std::string name) {
  std::size_t row = senses_.size();
  senses_.push_back(sense);
  rhs_.push_back(rhs);
  row_names_.push_back(std::move(name));
  for (const auto& [col, value] : terms) AddCoefficient(row, col, value);
  return row;
}

void LinearProgram::AddCoefficient(std::size_t row, std::size_t col, double value) {
  if (value == 0.0) return;
  triplets_.push_back({row, col, value});
}

void LinearProgram::SetBounds(std::size_t col, double lower, double upper) {
  lower_.at(col) = lower;
  upper_.at(col) = upper;
}

void LinearProgram::SetCost(std::size_t col, double cost) { costs_.at(col) = cost; }

std::string LinearProgram::RowName(std::size_t row) const {
  const std::string& name = row_names_.at(row);
  return name.empty() ? "c" + std::to_string(row) : name;
}

void LinearProgram::Validate() const {
  for (std::size_t j = 0; j < num_cols(); ++j) {
    if (!std::isfinite(costs_[j])) Fail(ErrorCode::kInvalidArgument, "non-finite cost");
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
        lower_[j] == kInf || upper_[j] == -kInf) {
      Fail(ErrorCode::kInvalidArgument,
           "column " + std::to_string(j) + " has invalid bounds");
    }
  }
  for (double b : rhs_) {
    if (!std::isfinite(b)) Fail(ErrorCode::kInvalidArgument, "non-finite right-hand side");
  }
  for (const Triplet& t : triplets_) {
    if (t.row >= num_rows() || t.col >= num_cols()) {
      Fail(ErrorCode::kInvalidArgument, "coefficient outside the matrix");
    }
    if (!std::isfinite(t.value)) Fail(ErrorCode::kInvalidArgument, "non-finite coefficient");
  }
}

LinearProgram::Csc LinearProgram::ToCsc() const {
  Csc csc;
  csc.start.assign(num_cols() + 1, 0);
  for (const Triplet& t : triplets_) ++csc.start[t.col + 1];
  for (std::size_t j = 0; j < num_cols(); ++j) csc.start[j + 1] += csc.start[j];
  std::vector<std::size_t> fill(csc.start.begin(), csc.start.end() - 1);
  std::vector<std::size_t> index(triplets_.size());
  std::vector<double> value(triplets_.size());
  for (const Triplet& t : triplets_) {
    index[fill[t.col]] = t.row;
    value[fill[t.col]] = t.value;
    ++fill[t.col];
  }
  // Sort each column by row and merge duplicates.
  std::vector<std::size_t> new_start(num_cols() + 1, 0);
  for (std::size_t j = 0; j < num_cols(); ++j) {
    std::vector<std::pair<std::size_t, double>> entries;
    for (std::size_t p = csc.start[j]; p < csc.start[j + 1]; ++p) {
      entries.emplace_back(index[p], value[p]);
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t p = 0; p < entries.size(); ++p) {
      if (!csc.index.empty() && csc.index.size() > new_start[j] &&
          csc.index.back() == entries[p].first) {
        csc.value.back() += entries[p].second;
      } else {
        csc.index.push_back(entries[p].first);
        csc.value.push_back(entries[p].second);
      }
    }
    new_start[j + 1] = csc.index.size();
  }
  csc.start = std::move(new_start);
  return csc;
}

std::vector<double> LinearProgram::Activity(std::span<const double> x) const {
  std::vector<double> act(num_rows(), 0.0);
  for (const Triplet& t : triplets_) act[t.row] += t.value * x[t.col];
  return act;
}

double LinearProgram::Objective(std::span<const double> x) const {
  double obj = 0.0;
  for (std::size_t j = 0; j < num_cols(); ++j) obj += costs_[j] * x[j];
  return obj;
}

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double DualObjective(const LinearProgram& lp, const LpSolution& solution) {
  double obj = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) obj += solution.row_duals[i] * lp.rhs()[i];
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    double d = solution.reduced_costs[j];
    if (d > 0.0 && std::isfinite(lp.lower()[j])) {
      obj += d * lp.lower()[j];
    } else if (d < 0.0 && std::isfinite(lp.upper()[j])) {
      obj += d * lp.upper()[j];
    } else {
      obj += d * solution.x[j];
    }
  }
  return obj;
}

double PrimalResidual(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    worst = std::max({worst, lp.lower()[j] - x[j], x[j] - lp.upper()[j]});
  }
  std::vector<double> act = lp.Activity(x);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double gap = act[i] - lp.rhs()[i];
    switch (lp.senses()[i]) {
      case RowSense::kLessEqual: worst = std::max(worst, gap); break;
      case RowSense::kGreaterEqual: worst = std::max(worst, -gap); break;
      case RowSense::kEqual: worst = std::max(worst, std::abs(gap)); break;
    }
  }
  return worst;
}

double DualResidual(const LinearProgram& lp, const LpSolution& solution) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double y = solution.row_duals[i];
    if (lp.senses()[i] == RowSense::kGreaterEqual) worst = std::max(worst, -y);
    if (lp.senses()[i] == RowSense::kLessEqual) worst = std::max(worst, y);
  }
  // Recompute reduced costs from the duals instead of trusting the stored ones.
  std::vector<double> d = lp.costs();
  for (const Triplet& t : lp.triplets()) d[t.col] -= solution.row_duals[t.row] * t.value;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (!std::isfinite(lp.lower()[j])) worst = std::max(worst, d[j]);
    if (!std::isfinite(lp.upper()[j])) worst = std::max(worst, -d[j]);
  }
  return worst;
}

double ComplementarityResidual(const LinearProgram& lp, const LpSolution& solution) {
  double worst = 0.0;
  std::vector<double> act = lp.Activity(solution.x);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (lp.senses()[i] == RowSense::kEqual) continue;
    worst = std::max(worst, std::abs(solution.row_duals[i] * (act[i] - lp.rhs()[i])));
  }
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    double d = solution.reduced_costs[j];
    double x = solution.x[j];
    if (d > 0.0 && std::isfinite(lp.lower()[j])) {
      worst = std::max(worst, d * (x - lp.lower()[j]));
    } else if (d < 0.0 && std::isfinite(lp.upper()[j])) {
      worst = std::max(worst, -d * (lp.upper()[j] - x));
    } else {
      worst = std::max(worst, std::abs(d * x));
    }
  }
  return worst;
}

namespace {

// Appends `coef name` with CPLEX sign spacing: "- x0", " + 2.5 x1".
void AppendTerm(std::string& out, bool first, double coef, const std::string& name) {
  if (coef < 0.0) {
    out += first ? "- " : " - ";
  } else if (!first) {
    out += " + ";
  }
  double magnitude = std::abs(coef);
  if (magnitude != 1.0) {
    out += FormatDouble(magnitude);
    out += ' ';
  }
  out += name;
}

constexpr std::size_t kTermsPerLine = 8;

}  // namespace

std::string WriteLpFile(const LinearProgram& lp,
                        std::span<const std::string> column_names) {
  lp.Validate();
  if (column_names.size() < lp.num_cols()) {
    Fail(ErrorCode::kInvalidArgument, "column " + std::to_string(column_names.size()) +
                                          " has no name");
  }
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (column_names[j].empty()) {
      Fail(ErrorCode::kInvalidArgument, "column " + std::to_string(j) + " has no name");
    }
  }
  if (lp.num_cols() == 0 && lp.num_rows() > 0) {
    Fail(ErrorCode::kInvalidArgument, "rows without columns cannot be written");
  }

  std::string out = "Minimize\n obj:";
  std::size_t terms = 0;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    if (lp.costs()[j] == 0.0) continue;
    if (terms > 0 && terms % kTermsPerLine == 0) out += "\n     ";
    out += terms == 0 ? " " : "";
    AppendTerm(out, terms == 0, lp.costs()[j], column_names[j]);
    ++terms;
  }
  if (terms == 0) out += " 0";
  out += "\nSubject To\n";

  // Row-wise view of the matrix.
  LinearProgram::Csc csc = lp.ToCsc();
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(lp.num_rows());
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    for (std::size_t p = csc.start[j]; p < csc.start[j + 1]; ++p) {
      if (csc.value[p] != 0.0) rows[csc.index[p]].emplace_back(j, csc.value[p]);
    }
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    out += ' ';
    out += lp.RowName(i);
    out += ": ";
    if (rows[i].empty()) {
      out += "0 " + column_names[0];
    }
    for (std::size_t t = 0; t < rows[i].size(); ++t) {
      if (t > 0 && t % kTermsPerLine == 0) out += "\n     ";
      AppendTerm(out, t == 0, rows[i][t].second, column_names[rows[i][t].first]);
    }
    switch (lp.senses()[i]) {
      case RowSense::kLessEqual: out += " <= "; break;
      case RowSense::kGreaterEqual: out += " >= "; break;
      case RowSense::kEqual: out += " = "; break;
    }
    out += FormatDouble(lp.rhs()[i]);
    out += '\n';
  }

  std::string bounds;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    double lo = lp.lower()[j];
    double hi = lp.upper()[j];
    const std::string& name = column_names[j];
    if (lo == 0.0 && hi == kInf) continue;
    if (lo == -kInf && hi == kInf) {
      bounds += " " + name + " free\n";
    } else if (lo == hi) {
      bounds += " " + name + " = " + FormatDouble(lo) + "\n";
    } else if (hi == kInf) {
      bounds += " " + name + " >= " + FormatDouble(lo) + "\n";
    } else {
      std::string lo_text = lo == -kInf ? std::string("-inf") : FormatDouble(lo);
      bounds += " " + lo_text + " <= " + name + " <= " + FormatDouble(hi) + "\n";
    }
  }
  if (!bounds.empty()) out += "Bounds\n" + bounds;
  out += "End\n";
  return out;
}

std::vector<std::vector<double>> VertexEnumerate(const Polyhedron& p) {
  p.Validate();
  const std::size_t dim = p.dimension();
  if (dim > kMaxEnumerationDim) {
    Fail(ErrorCode::kInvalidArgument, "vertex enumeration supports at most " +
                                          std::to_string(kMaxEnumerationDim) +
                                          " dimensions");
  }
  // Inequalities a^T d <= beta: rows of V, then -d_k <= -lower_k, d_k <= upper_k.
  std::vector<std::vector<double>> a;
  std::vector<double> beta;
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    a.push_back(p.V[i]);
    beta.push_back(p.b[i]);
  }
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<double> row(dim, 0.0);
    row[k] = -1.0;
    a.push_back(row);
    beta.push_back(-p.lower[k]);
    row[k] = 1.0;
    a.push_back(row);
    beta.push_back(p.upper[k]);
  }

  std::vector<std::vector<double>> vertices;
  auto keep = [&](const std::vector<double>& d) {
    if (!Contains(p, d, 1e-9)) return;
    for (const auto& v : vertices) {
      double diff = 0.0;
      for (std::size_t k = 0; k < dim; ++k) diff = std::max(diff, std::abs(v[k] - d[k]));
      if (diff <= 1e-9) return;
    }
    vertices.push_back(d);
  };

  if (dim == 0) {
    keep({});
    return vertices;
  }
  const std::size_t total = a.size();
  std::vector<std::size_t> pick(dim);
  for (std::size_t k = 0; k < dim; ++k) pick[k] = k;
  Eigen::MatrixXd system(dim, dim);
  Eigen::VectorXd rhs(dim);
  while (true) {
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) system(r, c) = a[pick[r]][c];
      rhs(r) = beta[pick[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    lu.setThreshold(1e-10);
    if (lu.rank() == static_cast<Eigen::Index>(dim)) {
      Eigen::VectorXd sol = lu.solve(rhs);
      keep(std::vector<double>(sol.data(), sol.data() + dim));
    }
    // Next combination in lexicographic order.
    std::size_t pos = dim;
    while (pos > 0 && pick[pos - 1] == total - dim + pos - 1) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t k = pos; k < dim; ++k) pick[k] = pick[k - 1] + 1;
  }
  std::sort(vertices.begin(), vertices.end());
  return vertices;
}

}  // namespace rncep
