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

#include "rncep/model_build.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "rncep/error.hpp"

namespace rncep {

namespace {

int Arity(VarFamily f) {
  switch (f) {
    case VarFamily::kTau: return 0;
    case VarFamily::kX:
    case VarFamily::kQ:
    case VarFamily::kU:
    case VarFamily::kVdual:
    case VarFamily::kW:
    case VarFamily::kDemand: return 1;
    case VarFamily::kH:
    case VarFamily::kPhi:
    case VarFamily::kPi:
    case VarFamily::kRhoUp:
    case VarFamily::kRhoLo:
    case VarFamily::kR:
    case VarFamily::kS:
    case VarFamily::kT: return 2;
    default: return 3;
  }
}

std::string Join(std::string_view prefix, std::initializer_list<std::size_t> idx) {
  std::string s(prefix);
  for (std::size_t i : idx) {
    s += '_';
    s += std::to_string(i);
  }
  return s;
}

void CheckSigma(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "sigma must be finite and >= 0");
  }
}

void CheckDemand(std::span<const double> d, std::size_t k) {
  if (d.size() != k) {
    Fail(ErrorCode::kInvalidArgument,
         "demand has " + std::to_string(d.size()) + " entries, expected " +
             std::to_string(k));
  }
  for (double v : d) {
    if (!std::isfinite(v) || v < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "demand entries must be finite and >= 0");
    }
  }
}

void CheckPolyhedron(const Polyhedron& p, std::size_t k) {
  p.Validate();
  if (p.dimension() != k) {
    Fail(ErrorCode::kInvalidArgument,
         "polyhedron dimension " + std::to_string(p.dimension()) +
             " does not match " + std::to_string(k) + " commodities");
  }
  for (double lo : p.lower) {
    if (lo < 0.0) Fail(ErrorCode::kInvalidArgument, "demand lower bounds must be >= 0");
  }
  for (double hi : p.upper) {
    if (!std::isfinite(hi)) Fail(ErrorCode::kInvalidArgument, "demand upper bounds must be finite");
  }
}

// Linear expression over LP columns plus a constant.
struct Expr {
  LinearProgram::Terms terms;
  double constant = 0.0;
};

// terms + constant (sense) rhs
std::size_t AddExprRow(LinearProgram& lp, RowSense sense, double rhs, const Expr& e,
                       std::string name) {
  return lp.AddRow(sense, rhs - e.constant, e.terms, std::move(name));
}

void AddToCosts(LinearProgram& lp, const Expr& e, double scale) {
  for (const auto& [col, coef] : e.terms) lp.SetCost(col, lp.costs()[col] + scale * coef);
}

// Policy coefficients either as AARC columns or as numbers of a fixed policy.
class PolicyTerms {
 public:
  static PolicyTerms Columns(const VariableCatalog& cat) {
    PolicyTerms t;
    t.cat_ = &cat;
    return t;
  }
  static PolicyTerms Fixed(const AffinePolicy& p) {
    PolicyTerms t;
    t.fixed_ = &p;
    return t;
  }

  void AddPhi(Expr& e, std::size_t k, std::size_t a, double coef) const {
    if (fixed_ != nullptr) {
      e.constant += coef * fixed_->phi[k][a];
    } else {
      e.terms.emplace_back(cat_->At({VarFamily::kPhi, k, a}), coef);
    }
  }
  void AddPhi2(Expr& e, std::size_t k, std::size_t l, std::size_t a, double coef) const {
    if (fixed_ != nullptr) {
      e.constant += coef * fixed_->Phi[k][l][a];
    } else {
      e.terms.emplace_back(cat_->At({VarFamily::kPhi2, k, l, a}), coef);
    }
  }

 private:
  const VariableCatalog* cat_ = nullptr;
  const AffinePolicy* fixed_ = nullptr;
};

struct Incidence {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::vector<std::size_t>> in;
};

Incidence MakeIncidence(const NetworkSpec& net) { return {net.OutArcs(), net.InArcs()}; }

// Coefficients g_l of max_{d in P} sum_l g_l d_l for each family.

std::vector<Expr> FlowG(const Incidence& inc, const PolicyTerms& pt, std::size_t k,
                        std::size_t v, std::size_t dim) {
  std::vector<Expr> g(dim);
  for (std::size_t l = 0; l < dim; ++l) {
    for (std::size_t a : inc.out[v]) pt.AddPhi2(g[l], k, l, a, 1.0);
    for (std::size_t a : inc.in[v]) pt.AddPhi2(g[l], k, l, a, -1.0);
  }
  return g;
}

std::vector<Expr> CapacityG(const PolicyTerms& pt, std::size_t a, std::size_t kk,
                            std::size_t dim) {
  std::vector<Expr> g(dim);
  for (std::size_t l = 0; l < dim; ++l) {
    for (std::size_t k = 0; k < kk; ++k) pt.AddPhi2(g[l], k, l, a, 1.0);
  }
  return g;
}

std::vector<Expr> PositivityG(const PolicyTerms& pt, std::size_t k, std::size_t a,
                              std::size_t dim) {
  std::vector<Expr> g(dim);
  for (std::size_t l = 0; l < dim; ++l) pt.AddPhi2(g[l], k, l, a, -1.0);
  return g;
}

// Dual of max_{d in P} g^T d. Adds the M + 2K dual columns (cost 0) and the
// K rows  V^T alpha + beta_up - beta_lo - g >= 0; returns the dual objective
// b^T alpha + upper^T beta_up - lower^T beta_lo.
template <typename KeyFn>
Expr AppendDualBlock(LinearProgram& lp, VariableCatalog& cat, const Polyhedron& p,
                     const std::vector<Expr>& g, VarFamily alpha, VarFamily up,
                     VarFamily lo, KeyFn key, const std::string& row_prefix) {
  const std::size_t m = p.row_count();
  const std::size_t dim = p.dimension();
  Expr objective;
  std::vector<std::size_t> a_col(m), up_col(dim), lo_col(dim);
  for (std::size_t i = 0; i < m; ++i) {
    a_col[i] = lp.AddColumn(0.0);
    cat.Add(key(alpha, i));
    objective.terms.emplace_back(a_col[i], p.b[i]);
  }
  for (std::size_t l = 0; l < dim; ++l) {
    up_col[l] = lp.AddColumn(0.0);
    cat.Add(key(up, l));
    objective.terms.emplace_back(up_col[l], p.upper[l]);
  }
  for (std::size_t l = 0; l < dim; ++l) {
    lo_col[l] = lp.AddColumn(0.0);
    cat.Add(key(lo, l));
    objective.terms.emplace_back(lo_col[l], -p.lower[l]);
  }
  for (std::size_t l = 0; l < dim; ++l) {
    Expr row;
    for (std::size_t i = 0; i < m; ++i) row.terms.emplace_back(a_col[i], p.V[i][l]);
    row.terms.emplace_back(up_col[l], 1.0);
    row.terms.emplace_back(lo_col[l], -1.0);
    for (const auto& [col, coef] : g[l].terms) row.terms.emplace_back(col, -coef);
    row.constant = -g[l].constant;
    AddExprRow(lp, RowSense::kGreaterEqual, 0.0, row, row_prefix + "_" + std::to_string(l));
  }
  return objective;
}

// Net inflow at t^k minus outflow, as policy terms; `scale` multiplies it.
void AddNetInflowPhi(Expr& e, const Incidence& inc, const PolicyTerms& pt,
                     const Endpoints& end, std::size_t k, double scale) {
  for (std::size_t a : inc.in[end.sink]) pt.AddPhi(e, k, a, scale);
  for (std::size_t a : inc.out[end.sink]) pt.AddPhi(e, k, a, -scale);
}

void AddNetInflowPhi2(Expr& e, const Incidence& inc, const PolicyTerms& pt,
                      const Endpoints& end, std::size_t k, std::size_t l, double scale) {
  for (std::size_t a : inc.in[end.sink]) pt.AddPhi2(e, k, l, a, scale);
  for (std::size_t a : inc.out[end.sink]) pt.AddPhi2(e, k, l, a, -scale);
}

// Dual of the relaxed outsourcing subproblem. Adds q, r, s, t, u, v, w (cost
// 0) and their rows; returns the dual objective.
Expr AppendOutsourcingBlock(LinearProgram& lp, VariableCatalog& cat, const Incidence& inc,
                            const std::vector<Endpoints>& ends, const Polyhedron& p,
                            const PolicyTerms& pt) {
  const std::size_t m = p.row_count();
  const std::size_t kk = ends.size();
  const std::size_t dim = p.dimension();
  auto add = [&](VarKey key) {
    cat.Add(key);
    return lp.AddColumn(0.0);
  };
  std::vector<std::size_t> q(m), u(dim), vd(dim), w(kk);
  std::vector<std::vector<std::size_t>> r(kk, std::vector<std::size_t>(dim)), s = r, t = r;
  for (std::size_t i = 0; i < m; ++i) q[i] = add({VarFamily::kQ, i});
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t l = 0; l < dim; ++l) r[k][l] = add({VarFamily::kR, k, l});
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t l = 0; l < dim; ++l) s[k][l] = add({VarFamily::kS, k, l});
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t l = 0; l < dim; ++l) t[k][l] = add({VarFamily::kT, k, l});
  for (std::size_t l = 0; l < dim; ++l) u[l] = add({VarFamily::kU, l});
  for (std::size_t l = 0; l < dim; ++l) vd[l] = add({VarFamily::kVdual, l});
  for (std::size_t k = 0; k < kk; ++k) w[k] = add({VarFamily::kW, k});

  Expr objective;
  for (std::size_t i = 0; i < m; ++i) objective.terms.emplace_back(q[i], p.b[i]);
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t l = 0; l < dim; ++l) objective.terms.emplace_back(t[k][l], p.upper[l]);
  for (std::size_t l = 0; l < dim; ++l) objective.terms.emplace_back(u[l], p.upper[l]);
  for (std::size_t l = 0; l < dim; ++l) objective.terms.emplace_back(vd[l], -p.lower[l]);
  for (std::size_t k = 0; k < kk; ++k) objective.terms.emplace_back(w[k], 1.0);

  // column d_l
  for (std::size_t l = 0; l < dim; ++l) {
    Expr row;
    for (std::size_t i = 0; i < m; ++i) row.terms.emplace_back(q[i], p.V[i][l]);
    for (std::size_t k = 0; k < kk; ++k) {
      row.terms.emplace_back(r[k][l], -1.0);
      row.terms.emplace_back(t[k][l], 1.0);
    }
    row.terms.emplace_back(u[l], 1.0);
    row.terms.emplace_back(vd[l], -1.0);
    AddExprRow(lp, RowSense::kGreaterEqual, 0.0, row, Join("OBJD", {l}));
  }
  // column z_k
  for (std::size_t k = 0; k < kk; ++k) {
    Expr row;
    for (std::size_t l = 0; l < dim; ++l) {
      row.terms.emplace_back(s[k][l], -p.upper[l]);
      row.terms.emplace_back(t[k][l], p.upper[l]);
    }
    row.terms.emplace_back(w[k], 1.0);
    AddNetInflowPhi(row, inc, pt, ends[k], k, 1.0);
    AddExprRow(lp, RowSense::kGreaterEqual, 0.0, row, Join("OBJZ", {k}));
  }
  // column z'_kl
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t l = 0; l < dim; ++l) {
      Expr row;
      row.terms.emplace_back(r[k][l], 1.0);
      row.terms.emplace_back(s[k][l], 1.0);
      row.terms.emplace_back(t[k][l], -1.0);
      AddNetInflowPhi2(row, inc, pt, ends[k], k, l, 1.0);
      AddExprRow(lp, RowSense::kGreaterEqual, k == l ? 1.0 : 0.0, row, Join("OBJZZ", {k, l}));
    }
  }
  return objective;
}

// Columns F(k, i, .) and H(k, i) for one demand vector plus the h, flow and
// capacity rows. x_cols empty means capacities u_a + x_a are constants.
void AppendScenarioBlock(LinearProgram& lp, VariableCatalog& cat, const NetworkSpec& net,
                         const Incidence& inc, const std::vector<Endpoints>& ends,
                         std::size_t i, std::span<const double> demand,
                         const std::vector<std::size_t>& x_cols,
                         std::span<const double> x_fixed, double h_cost) {
  const std::size_t kk = ends.size();
  const std::size_t na = net.arcs.size();
  std::vector<std::vector<std::size_t>> f(kk, std::vector<std::size_t>(na));
  std::vector<std::size_t> h(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t a = 0; a < na; ++a) {
      f[k][a] = lp.AddColumn(0.0);
      cat.Add({VarFamily::kF, k, i, a});
    }
  }
  for (std::size_t k = 0; k < kk; ++k) {
    h[k] = lp.AddColumn(h_cost);
    cat.Add({VarFamily::kH, k, i});
  }
  for (std::size_t k = 0; k < kk; ++k) {
    LinearProgram::Terms terms{{h[k], 1.0}};
    for (std::size_t a : inc.in[ends[k].sink]) terms.emplace_back(f[k][a], 1.0);
    for (std::size_t a : inc.out[ends[k].sink]) terms.emplace_back(f[k][a], -1.0);
    lp.AddRow(RowSense::kGreaterEqual, demand[k], terms, Join("HDEF", {k, i}));
  }
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t v = 0; v < net.nodes.size(); ++v) {
      if (v == ends[k].source || v == ends[k].sink) continue;
      LinearProgram::Terms terms;
      for (std::size_t a : inc.in[v]) terms.emplace_back(f[k][a], 1.0);
      for (std::size_t a : inc.out[v]) terms.emplace_back(f[k][a], -1.0);
      lp.AddRow(RowSense::kGreaterEqual, 0.0, terms, Join("FLOW", {k, i, v}));
    }
  }
  for (std::size_t a = 0; a < na; ++a) {
    LinearProgram::Terms terms;
    for (std::size_t k = 0; k < kk; ++k) terms.emplace_back(f[k][a], 1.0);
    double rhs = net.arcs[a].capacity;
    if (!x_cols.empty()) {
      terms.emplace_back(x_cols[a], -1.0);
    } else {
      rhs += x_fixed[a];
    }
    lp.AddRow(RowSense::kLessEqual, rhs, terms, Join("CAP", {i, a}));
  }
}

std::vector<std::size_t> AppendInvestment(LinearProgram& lp, VariableCatalog& cat,
                                          const NetworkSpec& net) {
  std::vector<std::size_t> x(net.arcs.size());
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    x[a] = lp.AddColumn(net.arcs[a].cost);
    cat.Add({VarFamily::kX, a});
  }
  return x;
}

}  // namespace

const char* FamilyName(VarFamily family) {
  switch (family) {
    case VarFamily::kX: return "X";
    case VarFamily::kF: return "F";
    case VarFamily::kH: return "H";
    case VarFamily::kTau: return "TAU";
    case VarFamily::kPhi: return "PHI";
    case VarFamily::kPhi2: return "PHI2";
    case VarFamily::kAlpha: return "ALPHA";
    case VarFamily::kBetaUp: return "BETA_UP";
    case VarFamily::kBetaLo: return "BETA_LO";
    case VarFamily::kPi: return "PI";
    case VarFamily::kRhoUp: return "RHO_UP";
    case VarFamily::kRhoLo: return "RHO_LO";
    case VarFamily::kXi: return "XI";
    case VarFamily::kZetaUp: return "ZETA_UP";
    case VarFamily::kZetaLo: return "ZETA_LO";
    case VarFamily::kQ: return "Q";
    case VarFamily::kR: return "R";
    case VarFamily::kS: return "S";
    case VarFamily::kT: return "T";
    case VarFamily::kU: return "U";
    case VarFamily::kVdual: return "VDUAL";
    case VarFamily::kW: return "W";
    case VarFamily::kDemand: return "D";
  }
  return "?";
}

std::size_t VariableCatalog::Add(const VarKey& key) {
  auto [it, inserted] = index_.emplace(key, keys_.size());
  if (!inserted) {
    Fail(ErrorCode::kInvalidArgument, "duplicate variable key " + std::string(FamilyName(key.family)));
  }
  keys_.push_back(key);
  return it->second;
}

std::optional<std::size_t> VariableCatalog::Find(const VarKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VariableCatalog::At(const VarKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    Fail(ErrorCode::kInvalidArgument,
         "unknown variable " + Join(FamilyName(key.family), {key.i0, key.i1, key.i2}));
  }
  return it->second;
}

std::size_t VariableCatalog::Count(VarFamily family) const {
  return static_cast<std::size_t>(std::count_if(
      keys_.begin(), keys_.end(), [&](const VarKey& k) { return k.family == family; }));
}

std::string VariableCatalog::Name(std::size_t column) const {
  const VarKey& k = keys_.at(column);
  const char* base = FamilyName(k.family);
  switch (Arity(k.family)) {
    case 0: return base;
    case 1: return Join(base, {k.i0});
    case 2: return Join(base, {k.i0, k.i1});
    default: return Join(base, {k.i0, k.i1, k.i2});
  }
}

std::vector<std::string> VariableCatalog::Names() const {
  std::vector<std::string> names;
  names.reserve(keys_.size());
  for (std::size_t j = 0; j < keys_.size(); ++j) names.push_back(Name(j));
  return names;
}

std::vector<Endpoints> ResolveCommodities(const NetworkSpec& net,
                                          const std::vector<Commodity>& commodities) {
  std::vector<Endpoints> ends;
  ends.reserve(commodities.size());
  for (const Commodity& c : commodities) {
    Endpoints e{net.NodeIndex(c.source), net.NodeIndex(c.sink)};
    if (e.source == e.sink) {
      Fail(ErrorCode::kInvalidArgument, "commodity " + c.source + ":" + c.sink +
                                            " has equal source and sink");
    }
    ends.push_back(e);
  }
  return ends;
}

Model BuildNominal(const NetworkSpec& net, const std::vector<Commodity>& commodities,
                   std::span<const double> demand, double sigma) {
  CheckSigma(sigma);
  std::vector<Endpoints> ends = ResolveCommodities(net, commodities);
  CheckDemand(demand, ends.size());
  Model m;
  m.kind = ModelKind::kNominal;
  Incidence inc = MakeIncidence(net);
  std::vector<std::size_t> x = AppendInvestment(m.lp, m.catalog, net);
  AppendScenarioBlock(m.lp, m.catalog, net, inc, ends, 0, demand, x, {}, sigma);
  return m;
}

Model BuildDiscreteRobust(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          const DiscreteSet& scenarios, double sigma) {
  CheckSigma(sigma);
  if (scenarios.scenarios.empty()) Fail(ErrorCode::kInvalidArgument, "empty scenario set");
  std::vector<Endpoints> ends = ResolveCommodities(net, commodities);
  for (const auto& d : scenarios.scenarios) CheckDemand(d, ends.size());
  Model m;
  m.kind = ModelKind::kDiscreteRobust;
  Incidence inc = MakeIncidence(net);
  std::vector<std::size_t> x = AppendInvestment(m.lp, m.catalog, net);
  for (std::size_t i = 0; i < scenarios.scenarios.size(); ++i) {
    AppendScenarioBlock(m.lp, m.catalog, net, inc, ends, i, scenarios.scenarios[i], x, {},
                        0.0);
  }
  std::size_t tau = m.lp.AddColumn(sigma);
  m.catalog.Add({VarFamily::kTau});
  for (std::size_t i = 0; i < scenarios.scenarios.size(); ++i) {
    LinearProgram::Terms terms{{tau, 1.0}};
    for (std::size_t k = 0; k < ends.size(); ++k) {
      terms.emplace_back(m.catalog.At({VarFamily::kH, k, i}), -1.0);
    }
    m.lp.AddRow(RowSense::kGreaterEqual, 0.0, terms, Join("TAU", {i}));
  }
  return m;
}

Model BuildAarc(const NetworkSpec& net, const std::vector<Commodity>& commodities,
                const Polyhedron& uncertainty, double sigma) {
  CheckSigma(sigma);
  std::vector<Endpoints> ends = ResolveCommodities(net, commodities);
  const Polyhedron& p = uncertainty;
  CheckPolyhedron(p, ends.size());
  if (p.row_count() == 0) Fail(ErrorCode::kInvalidArgument, "polyhedron needs at least one row");
  const std::size_t kk = ends.size();
  const std::size_t na = net.arcs.size();
  const std::size_t dim = kk;

  Model m;
  m.kind = ModelKind::kAarc;
  LinearProgram& lp = m.lp;
  VariableCatalog& cat = m.catalog;
  Incidence inc = MakeIncidence(net);

  std::vector<std::size_t> x = AppendInvestment(lp, cat, net);
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t a = 0; a < na; ++a) {
      lp.AddColumn(0.0, -kInf, kInf);
      cat.Add({VarFamily::kPhi, k, a});
    }
  }
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t l = 0; l < dim; ++l) {
      for (std::size_t a = 0; a < na; ++a) {
        lp.AddColumn(0.0, -kInf, kInf);
        cat.Add({VarFamily::kPhi2, k, l, a});
      }
    }
  }
  PolicyTerms pt = PolicyTerms::Columns(cat);

  Expr outsourcing = AppendOutsourcingBlock(lp, cat, inc, ends, p, pt);
  AddToCosts(lp, outsourcing, sigma);

  // flow conservation at v not in {s^k, t^k}
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t v = 0; v < net.nodes.size(); ++v) {
      if (v == ends[k].source || v == ends[k].sink) continue;
      Expr dual = AppendDualBlock(
          lp, cat, p, FlowG(inc, pt, k, v, dim), VarFamily::kAlpha, VarFamily::kBetaUp,
          VarFamily::kBetaLo, [&](VarFamily f, std::size_t j) { return VarKey{f, k, v, j}; },
          Join("FLOWD", {k, v}));
      Expr row;
      for (std::size_t a : inc.in[v]) pt.AddPhi(row, k, a, 1.0);
      for (std::size_t a : inc.out[v]) pt.AddPhi(row, k, a, -1.0);
      for (const auto& [col, coef] : dual.terms) row.terms.emplace_back(col, -coef);
      AddExprRow(lp, RowSense::kGreaterEqual, 0.0, row, Join("FLOW", {k, v}));
    }
  }
  // capacity
  for (std::size_t a = 0; a < na; ++a) {
    Expr dual = AppendDualBlock(
        lp, cat, p, CapacityG(pt, a, kk, dim), VarFamily::kPi, VarFamily::kRhoUp,
        VarFamily::kRhoLo, [&](VarFamily f, std::size_t j) { return VarKey{f, a, j}; },
        Join("CAPD", {a}));
    Expr row = dual;
    for (std::size_t k = 0; k < kk; ++k) pt.AddPhi(row, k, a, 1.0);
    row.terms.emplace_back(x[a], -1.0);
    AddExprRow(lp, RowSense::kLessEqual, net.arcs[a].capacity, row, Join("CAP", {a}));
  }
  // nonnegativity of realized flows
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t a = 0; a < na; ++a) {
      Expr dual = AppendDualBlock(
          lp, cat, p, PositivityG(pt, k, a, dim), VarFamily::kXi, VarFamily::kZetaUp,
          VarFamily::kZetaLo,
          [&](VarFamily f, std::size_t j) {
            return f == VarFamily::kXi ? VarKey{f, k, a, j} : VarKey{f, k, j, a};
          },
          Join("POSD", {k, a}));
      Expr row;
      pt.AddPhi(row, k, a, 1.0);
      for (const auto& [col, coef] : dual.terms) row.terms.emplace_back(col, -coef);
      AddExprRow(lp, RowSense::kGreaterEqual, 0.0, row, Join("POS", {k, a}));
    }
  }
  return m;
}

Model BuildStochasticMean(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          const MeanDemand& mean, double sigma) {
  Model m = BuildNominal(net, commodities, mean.mean, sigma);
  m.kind = ModelKind::kStochasticMean;
  return m;
}

Model BuildEvaluationFlow(const NetworkSpec& net,
                          const std::vector<Commodity>& commodities,
                          std::span<const double> investment,
                          std::span<const double> demand) {
  std::vector<Endpoints> ends = ResolveCommodities(net, commodities);
  CheckDemand(demand, ends.size());
  if (investment.size() != net.arcs.size()) {
    Fail(ErrorCode::kInvalidArgument, "investment has " + std::to_string(investment.size()) +
                                          " entries, expected " +
                                          std::to_string(net.arcs.size()));
  }
  for (double v : investment) {
    if (!std::isfinite(v) || v < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "investment entries must be finite and >= 0");
    }
  }
  Model m;
  m.kind = ModelKind::kEvaluationFlow;
  Incidence inc = MakeIncidence(net);
  AppendScenarioBlock(m.lp, m.catalog, net, inc, ends, 0, demand, {}, investment, 1.0);
  return m;
}

std::vector<double> ExtractFirstStage(const LpSolution& solution,
                                      const VariableCatalog& catalog, double tol) {
  if (solution.x.size() != catalog.size()) {
    Fail(ErrorCode::kInvalidArgument, "solution has " + std::to_string(solution.x.size()) +
                                          " columns, catalog " +
                                          std::to_string(catalog.size()));
  }
  std::size_t na = catalog.Count(VarFamily::kX);
  std::vector<double> x(na);
  for (std::size_t a = 0; a < na; ++a) {
    double v = solution.x[catalog.At({VarFamily::kX, a})];
    if (v < -tol) {
      Fail(ErrorCode::kSolver, "negative investment " + FormatDouble(v) + " on arc " +
                                   std::to_string(a));
    }
    x[a] = std::max(v, 0.0);
  }
  return x;
}

std::vector<std::vector<double>> AffinePolicy::Flow(std::span<const double> demand) const {
  std::vector<std::vector<double>> f = phi;
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (std::size_t l = 0; l < demand.size(); ++l) {
      for (std::size_t a = 0; a < f[k].size(); ++a) f[k][a] += Phi[k][l][a] * demand[l];
    }
  }
  return f;
}

AffinePolicy ExtractAffinePolicy(const LpSolution& solution, const VariableCatalog& catalog) {
  if (solution.x.size() != catalog.size()) {
    Fail(ErrorCode::kInvalidArgument, "solution/catalog length mismatch");
  }
  std::size_t na = catalog.Count(VarFamily::kX);
  std::size_t nphi = catalog.Count(VarFamily::kPhi);
  if (na == 0 || nphi == 0 || nphi % na != 0) {
    Fail(ErrorCode::kInvalidArgument, "catalog has no affine policy");
  }
  std::size_t kk = nphi / na;
  AffinePolicy p;
  p.phi.assign(kk, std::vector<double>(na));
  p.Phi.assign(kk, std::vector<std::vector<double>>(kk, std::vector<double>(na)));
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t a = 0; a < na; ++a) {
      p.phi[k][a] = solution.x[catalog.At({VarFamily::kPhi, k, a})];
      for (std::size_t l = 0; l < kk; ++l) {
        p.Phi[k][l][a] = solution.x[catalog.At({VarFamily::kPhi2, k, l, a})];
      }
    }
  }
  return p;
}

double MaxPolicyViolation(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                          const AffinePolicy& policy, std::span<const double> investment,
                          std::span<const double> d) {
  auto f = policy.Flow(d);
  Incidence inc = MakeIncidence(net);
  double worst = 0.0;
  for (std::size_t k = 0; k < ends.size(); ++k) {
    for (std::size_t v = 0; v < net.nodes.size(); ++v) {
      if (v == ends[k].source || v == ends[k].sink) continue;
      double net_in = 0.0;
      for (std::size_t a : inc.in[v]) net_in += f[k][a];
      for (std::size_t a : inc.out[v]) net_in -= f[k][a];
      worst = std::max(worst, -net_in);
    }
    for (double fa : f[k]) worst = std::max(worst, -fa);
  }
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    double load = 0.0;
    for (std::size_t k = 0; k < ends.size(); ++k) load += f[k][a];
    worst = std::max(worst, load - net.arcs[a].capacity - investment[a]);
  }
  return worst;
}

double PolicyOutsourcing(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                         const AffinePolicy& policy, std::span<const double> d) {
  auto f = policy.Flow(d);
  Incidence inc = MakeIncidence(net);
  double total = 0.0;
  for (std::size_t k = 0; k < ends.size(); ++k) {
    double net_in = 0.0;
    for (std::size_t a : inc.in[ends[k].sink]) net_in += f[k][a];
    for (std::size_t a : inc.out[ends[k].sink]) net_in -= f[k][a];
    total += std::max(0.0, d[k] - net_in);
  }
  return total;
}

LinearProgram BuildWorstCasePrimal(const Polyhedron& p, std::span<const double> g) {
  p.Validate();
  if (g.size() != p.dimension()) Fail(ErrorCode::kInvalidArgument, "g has wrong dimension");
  LinearProgram lp;
  for (std::size_t l = 0; l < g.size(); ++l) lp.AddColumn(-g[l], p.lower[l], p.upper[l]);
  for (std::size_t i = 0; i < p.row_count(); ++i) {
    LinearProgram::Terms terms;
    for (std::size_t l = 0; l < g.size(); ++l) terms.emplace_back(l, p.V[i][l]);
    lp.AddRow(RowSense::kLessEqual, p.b[i], terms, Join("ROW", {i}));
  }
  return lp;
}

LinearProgram BuildWorstCaseDual(const Polyhedron& p, std::span<const double> g) {
  CheckPolyhedron(p, g.size());
  std::vector<Expr> ge(g.size());
  for (std::size_t l = 0; l < g.size(); ++l) ge[l].constant = g[l];
  LinearProgram lp;
  VariableCatalog cat;
  Expr obj = AppendDualBlock(lp, cat, p, ge, VarFamily::kAlpha, VarFamily::kBetaUp,
                             VarFamily::kBetaLo,
                             [](VarFamily f, std::size_t j) { return VarKey{f, 0, 0, j}; },
                             "DUAL");
  AddToCosts(lp, obj, 1.0);
  return lp;
}

std::vector<double> FlowFamilyCoefficients(const NetworkSpec& net, const AffinePolicy& policy,
                                           std::size_t k, std::size_t v) {
  std::vector<double> g;
  for (const Expr& e : FlowG(MakeIncidence(net), PolicyTerms::Fixed(policy), k, v,
                             policy.commodity_count())) {
    g.push_back(e.constant);
  }
  return g;
}

std::vector<double> CapacityFamilyCoefficients(const AffinePolicy& policy, std::size_t a) {
  std::vector<double> g;
  for (const Expr& e : CapacityG(PolicyTerms::Fixed(policy), a, policy.commodity_count(),
                                 policy.commodity_count())) {
    g.push_back(e.constant);
  }
  return g;
}

std::vector<double> PositivityFamilyCoefficients(const AffinePolicy& policy, std::size_t k,
                                                 std::size_t a) {
  std::vector<double> g;
  for (const Expr& e :
       PositivityG(PolicyTerms::Fixed(policy), k, a, policy.commodity_count())) {
    g.push_back(e.constant);
  }
  return g;
}

LinearProgram BuildOutsourcingDual(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                                   const Polyhedron& p, const AffinePolicy& policy) {
  CheckPolyhedron(p, ends.size());
  LinearProgram lp;
  VariableCatalog cat;
  Expr obj = AppendOutsourcingBlock(lp, cat, MakeIncidence(net), ends, p,
                                    PolicyTerms::Fixed(policy));
  AddToCosts(lp, obj, 1.0);
  return lp;
}

double WorstCaseOutsourcingOracle(const NetworkSpec& net, const std::vector<Endpoints>& ends,
                                  const Polyhedron& p, const AffinePolicy& policy,
                                  double sigma, const SolveOptions& options) {
  CheckSigma(sigma);
  const std::size_t kk = ends.size();
  if (kk > kMaxOracleCommodities) {
    Fail(ErrorCode::kInvalidArgument, "oracle supports at most " +
                                          std::to_string(kMaxOracleCommodities) +
                                          " commodities, got " + std::to_string(kk));
  }
  CheckPolyhedron(p, kk);
  Incidence inc = MakeIncidence(net);
  // net inflow at t^k = c_k + sum_l n_kl d_l
  std::vector<double> c(kk, 0.0);
  std::vector<std::vector<double>> n(kk, std::vector<double>(kk, 0.0));
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t a : inc.in[ends[k].sink]) {
      c[k] += policy.phi[k][a];
      for (std::size_t l = 0; l < kk; ++l) n[k][l] += policy.Phi[k][l][a];
    }
    for (std::size_t a : inc.out[ends[k].sink]) {
      c[k] -= policy.phi[k][a];
      for (std::size_t l = 0; l < kk; ++l) n[k][l] -= policy.Phi[k][l][a];
    }
  }
  double best = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << kk); ++mask) {
    double constant = 0.0;
    std::vector<double> g(kk, 0.0);
    for (std::size_t k = 0; k < kk; ++k) {
      if ((mask >> k & 1) == 0) continue;
      constant -= c[k];
      g[k] += 1.0;
      for (std::size_t l = 0; l < kk; ++l) g[l] -= n[k][l];
    }
    LpSolution sol = Solve(BuildWorstCasePrimal(p, g), options);
    if (sol.status == SolveStatus::kInfeasible) {
      Fail(ErrorCode::kInvalidArgument, "uncertainty polyhedron is empty");
    }
    if (sol.status != SolveStatus::kOptimal) {
      Fail(ErrorCode::kSolver, std::string("worst-case subproblem: ") + ToString(sol.status));
    }
    best = std::max(best, constant - sol.objective);
  }
  return sigma * best;
}

}  // namespace rncep
