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

#include "rncep/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "rncep/error.hpp"
#include "rncep/model_build.hpp"

namespace rncep {

namespace {

std::vector<std::string_view> SplitCells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double SolveOutsourced(const NetworkSpec& net, std::span<const double> x,
                       const ScenarioSet& scenarios, std::size_t i,
                       const SolveOptions& options) {
  Model m = BuildEvaluationFlow(net, scenarios.commodities, x, scenarios.demands[i]);
  LpSolution sol = Solve(m.lp, options);
  // h = d, f = 0 is always feasible and the objective is bounded below by 0
  if (sol.status != SolveStatus::kOptimal) {
    Fail(ErrorCode::kSolver, "evaluation LP for scenario " + scenarios.labels[i] + ": " +
                                 ToString(sol.status));
  }
  return std::max(sol.objective, 0.0);
}

}  // namespace

double InvestmentCost(const NetworkSpec& net, std::span<const double> x) {
  if (x.size() != net.arcs.size()) {
    Fail(ErrorCode::kInvalidArgument, "investment length does not match arc count");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) total += net.arcs[a].cost * x[a];
  return total;
}

EvaluationReport EvaluateInvestment(const NetworkSpec& net, std::span<const double> x,
                                    const ScenarioSet& scenarios,
                                    const EvaluateOptions& options) {
  scenarios.Validate();
  if (scenarios.scenario_count() == 0) {
    Fail(ErrorCode::kInvalidArgument, "empty evaluation set");
  }
  for (double v : x) {
    if (!std::isfinite(v) || v < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "investment entries must be finite and >= 0");
    }
  }
  ResolveCommodities(net, scenarios.commodities);

  EvaluationReport report;
  report.investment_cost = InvestmentCost(net, x);
  const std::size_t n = scenarios.scenario_count();
  report.outsourced.assign(n, 0.0);

  std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      report.outsourced[i] = SolveOutsourced(net, x, scenarios, i, options.solve);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          report.outsourced[i] = SolveOutsourced(net, x, scenarios, i, options.solve);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  report.metrics = ComputeMetrics(report.outsourced);
  return report;
}

double Cvar(std::span<const double> values, double alpha) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "cvar of an empty vector");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "cvar alpha must be in (0, 1]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  auto tail = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(sorted.size()) - 1e-12));
  tail = std::clamp<std::size_t>(tail, 1, sorted.size());
  double sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(tail), 0.0);
  return sum / static_cast<double>(tail);
}

Metrics ComputeMetrics(std::span<const double> values) {
  if (values.empty()) Fail(ErrorCode::kInvalidArgument, "metrics of an empty vector");
  const double n = static_cast<double>(values.size());
  Metrics m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  m.max = *std::max_element(values.begin(), values.end());
  m.cvar = Cvar(values, kCvarAlpha);
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / n);
  return m;
}

double Correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    Fail(ErrorCode::kInvalidArgument, "correlation needs two non-empty vectors of equal length");
  }
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) {
    Fail(ErrorCode::kInvalidArgument, "correlation of a constant vector");
  }
  return sab / std::sqrt(saa * sbb);
}

std::string WriteFrontierCsv(std::vector<FrontierPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return std::tie(a.model, a.sigma, a.lambda, a.hyperplanes) <
           std::tie(b.model, b.sigma, b.lambda, b.hyperplanes);
  });
  std::string out(kFrontierHeader);
  out += '\n';
  for (const FrontierPoint& p : points) {
    if (p.model.empty() || p.model.find_first_of(",\n\r") != std::string::npos) {
      Fail(ErrorCode::kInvalidArgument, "bad model tag '" + p.model + "'");
    }
    out += p.model;
    out += ',' + FormatDouble(p.sigma);
    out += ',' + (p.lambda ? FormatDouble(*p.lambda) : std::string());
    out += ',' + (p.hyperplanes ? std::to_string(*p.hyperplanes) : std::string());
    out += ',' + FormatDouble(p.investment_cost);
    out += ',' + FormatDouble(p.metrics.mean);
    out += ',' + FormatDouble(p.metrics.max);
    out += ',' + FormatDouble(p.metrics.cvar);
    out += ',' + FormatDouble(p.metrics.std);
    out += '\n';
  }
  return out;
}

std::vector<FrontierPoint> ParseFrontierCsv(std::string_view text) {
  std::vector<FrontierPoint> points;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kFrontierHeader) throw Error(ErrorCode::kParse, "unexpected frontier header", line_no);
      header_seen = true;
      continue;
    }
    auto cells = SplitCells(line);
    if (cells.size() != 9) throw Error(ErrorCode::kParse, "expected 9 cells", line_no);
    FrontierPoint p;
    p.model = std::string(cells[0]);
    p.sigma = ParseDouble(cells[1], line_no);
    if (!cells[2].empty()) p.lambda = ParseDouble(cells[2], line_no);
    if (!cells[3].empty()) {
      double m = ParseDouble(cells[3], line_no);
      if (m < 0.0 || m != std::floor(m)) throw Error(ErrorCode::kParse, "M must be a count", line_no);
      p.hyperplanes = static_cast<std::size_t>(m);
    }
    p.investment_cost = ParseDouble(cells[4], line_no);
    p.metrics.mean = ParseDouble(cells[5], line_no);
    p.metrics.max = ParseDouble(cells[6], line_no);
    p.metrics.cvar = ParseDouble(cells[7], line_no);
    p.metrics.std = ParseDouble(cells[8], line_no);
    points.push_back(std::move(p));
  }
  if (!header_seen) Fail(ErrorCode::kParse, "empty frontier CSV");
  return points;
}

}  // namespace rncep
