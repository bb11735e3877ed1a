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

#include "rncep/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "rncep/error.hpp"
#include "rncep/model_build.hpp"
#include "rncep/polyhedron.hpp"
#include "rncep/uncertainty.hpp"

namespace rncep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ShortDouble(double v) { return FormatDouble(v); }

std::string Trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void ConfigError(const std::string& what) { Fail(ErrorCode::kConfig, what); }

double ConfigDouble(const std::string& key, std::string_view text) {
  std::string t = Trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    ConfigError(key + ": not a number '" + t + "'");
  }
  return v;
}

std::uint64_t ConfigUnsigned(const std::string& key, std::string_view text) {
  std::string t = Trim(text);
  std::uint64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    ConfigError(key + ": not a non-negative integer '" + t + "'");
  }
  return v;
}

std::vector<std::size_t> ParseCountList(const std::string& key, std::string_view text) {
  std::vector<std::size_t> out;
  for (double v : ParseGrid(text)) {
    if (v < 0.0 || v != std::floor(v)) ConfigError(key + ": expected whole numbers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

CostRule ParseCostRule(std::string_view text) {
  if (text == "first_module") return CostRule::kFirstModuleCost;
  if (text == "cheapest_per_unit") return CostRule::kCheapestPerUnit;
  ConfigError("cost_rule: expected first_module or cheapest_per_unit, got '" +
              std::string(text) + "'");
}

json OptionalJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json OptionalJson(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

json ReadJson(const fs::path& path) {
  std::string text = ReadTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void WriteJson(const fs::path& path, const json& j) { WriteTextFile(path, j.dump(2) + "\n"); }

void RequireArtifact(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path)) {
    Fail(ErrorCode::kMissingArtifact,
         "missing " + path.string() + "; run the " + stage + " stage first");
  }
}

fs::path SetsDir(const fs::path& workdir, std::size_t k) {
  return workdir / "sets" / ("K" + std::to_string(k));
}

fs::path ResolvePath(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

const char* ToString(ModelTag tag) {
  switch (tag) {
    case ModelTag::kNominal: return "nominal";
    case ModelTag::kDiscrete: return "discrete";
    case ModelTag::kStochastic: return "stochastic";
    case ModelTag::kAarc: return "aarc";
  }
  return "?";
}

ModelTag ParseModelTag(std::string_view text) {
  for (ModelTag t : {ModelTag::kNominal, ModelTag::kDiscrete, ModelTag::kStochastic,
                     ModelTag::kAarc}) {
    if (text == ToString(t)) return t;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown model '" + std::string(text) + "' (nominal, discrete, stochastic, aarc)");
}

std::size_t ExperimentSpec::point_count() const {
  switch (model) {
    case ModelTag::kDiscrete: return sigmas.size() * lambdas.size();
    case ModelTag::kAarc: return sigmas.size() * hyperplanes.size();
    default: return sigmas.size();
  }
}

void ExperimentConfig::Validate() const {
  if (network.empty()) ConfigError("data.network is required");
  if (scenarios.empty()) ConfigError("data.scenarios is required");
  if (output.empty()) ConfigError("run.output is required");
  if (stride == 0) ConfigError("data.stride must be >= 1");
  if (threads == 0) ConfigError("run.threads must be >= 1");
  if (experiments.empty()) ConfigError("no [experiment.<name>] sections");
  for (const ExperimentSpec& e : experiments) {
    const std::string where = "experiment." + e.name + ": ";
    if (e.name.empty() || e.name.find_first_of("/\\, \t") != std::string::npos) {
      ConfigError(where + "bad experiment name");
    }
    if (e.commodities == 0) ConfigError(where + "commodities must be >= 1");
    if (e.sigmas.empty()) ConfigError(where + "sigma grid is empty");
    for (double s : e.sigmas) {
      if (!(s >= 0.0) || !std::isfinite(s)) ConfigError(where + "sigma must be >= 0");
    }
    if (e.model == ModelTag::kDiscrete) {
      if (e.lambdas.empty()) ConfigError(where + "lambda grid is empty");
      for (double l : e.lambdas) {
        if (!(l >= 0.0 && l <= 1.0)) ConfigError(where + "lambda must lie in [0, 1]");
      }
    } else if (!e.lambdas.empty()) {
      ConfigError(where + "lambda only applies to discrete experiments");
    }
    if (e.model == ModelTag::kAarc) {
      if (e.hyperplanes.empty()) ConfigError(where + "hyperplanes grid is empty");
      for (std::size_t m : e.hyperplanes) {
        if (m == 0) ConfigError(where + "hyperplanes must be >= 1");
      }
    } else if (!e.hyperplanes.empty()) {
      ConfigError(where + "hyperplanes only apply to aarc experiments");
    }
  }
}

std::vector<double> ParseGrid(std::string_view text) {
  std::string t = Trim(text);
  std::vector<double> out;
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) ConfigError("range must be start:stop:count, got '" + t + "'");
    double lo = ConfigDouble("range", parts[0]);
    double hi = ConfigDouble("range", parts[1]);
    std::uint64_t n = ConfigUnsigned("range", parts[2]);
    if (n == 0) return out;
    if (n == 1) return {lo};
    for (std::uint64_t i = 0; i < n; ++i) {
      // endpoints exact
      double v = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(v);
    }
    return out;
  }
  std::string token;
  for (char c : t + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!Trim(token).empty()) out.push_back(ConfigDouble("list", token));
      token.clear();
    } else {
      token += c;
    }
  }
  return out;
}

ExperimentConfig ParseConfig(std::string_view text, const fs::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, e.message(), e.line());
  }
  ExperimentConfig cfg;
  cfg.source = std::string(text);

  auto keys_of = [](const pt::ptree& section, const std::string& name,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : section) {
      if (std::find_if(allowed.begin(), allowed.end(),
                       [&](const char* a) { return key == a; }) == allowed.end()) {
        ConfigError(name + ": unknown key '" + key + "'");
      }
    }
  };

  for (const auto& [section_name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      ConfigError("key '" + section_name + "' outside a section");
    }
    if (section_name == "data") {
      keys_of(section, "data", {"network", "scenarios", "stride", "eval_commodities", "cost_rule"});
      if (auto v = section.get_optional<std::string>("network")) cfg.network = ResolvePath(base_dir, Trim(*v));
      if (auto v = section.get_optional<std::string>("scenarios")) cfg.scenarios = ResolvePath(base_dir, Trim(*v));
      if (auto v = section.get_optional<std::string>("stride")) cfg.stride = ConfigUnsigned("data.stride", *v);
      if (auto v = section.get_optional<std::string>("eval_commodities")) {
        cfg.eval_commodities = ConfigUnsigned("data.eval_commodities", *v);
      }
      if (auto v = section.get_optional<std::string>("cost_rule")) cfg.cost_rule = ParseCostRule(Trim(*v));
    } else if (section_name == "run") {
      keys_of(section, "run", {"output", "seed", "threads"});
      if (auto v = section.get_optional<std::string>("output")) cfg.output = ResolvePath(base_dir, Trim(*v));
      if (auto v = section.get_optional<std::string>("seed")) cfg.seed = ConfigUnsigned("run.seed", *v);
      if (auto v = section.get_optional<std::string>("threads")) cfg.threads = ConfigUnsigned("run.threads", *v);
    } else if (section_name == "solver") {
      keys_of(section, "solver", {"feasibility_tolerance", "optimality_tolerance", "max_iterations",
                                  "scaling"});
      if (auto v = section.get_optional<std::string>("feasibility_tolerance")) {
        cfg.solver.feas_tol = ConfigDouble("solver.feasibility_tolerance", *v);
      }
      if (auto v = section.get_optional<std::string>("optimality_tolerance")) {
        cfg.solver.opt_tol = ConfigDouble("solver.optimality_tolerance", *v);
      }
      if (auto v = section.get_optional<std::string>("max_iterations")) {
        cfg.solver.max_iters = ConfigUnsigned("solver.max_iterations", *v);
      }
      if (auto v = section.get_optional<std::string>("scaling")) {
        std::string s = Trim(*v);
        if (s != "true" && s != "false") ConfigError("solver.scaling: expected true or false");
        cfg.solver.scaling = s == "true";
      }
    } else if (section_name.rfind("experiment.", 0) == 0) {
      ExperimentSpec e;
      e.name = section_name.substr(std::string("experiment.").size());
      const std::string where = section_name;
      keys_of(section, where, {"model", "commodities", "sigma", "lambda", "hyperplanes"});
      auto model = section.get_optional<std::string>("model");
      if (!model) ConfigError(where + ": model is required");
      try {
        e.model = ParseModelTag(Trim(*model));
      } catch (const Error& err) {
        ConfigError(where + ": " + err.what());
      }
      if (auto v = section.get_optional<std::string>("commodities")) {
        e.commodities = ConfigUnsigned(where + ".commodities", *v);
      } else {
        ConfigError(where + ": commodities is required");
      }
      if (auto v = section.get_optional<std::string>("sigma")) e.sigmas = ParseGrid(*v);
      if (auto v = section.get_optional<std::string>("lambda")) {
        e.lambdas = ParseGrid(*v);
      } else if (e.model == ModelTag::kDiscrete) {
        e.lambdas = {1.0};
      }
      if (auto v = section.get_optional<std::string>("hyperplanes")) {
        e.hyperplanes = ParseCountList(where + ".hyperplanes", *v);
      } else if (e.model == ModelTag::kAarc) {
        e.hyperplanes = {1};
      }
      cfg.experiments.push_back(std::move(e));
    } else {
      ConfigError("unknown section [" + section_name + "]");
    }
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const fs::path& path) {
  fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  ExperimentConfig cfg;
  try {
    cfg = ParseConfig(ReadTextFile(path), base);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  if (const char* env = std::getenv("RNCEP_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = ConfigUnsigned("RNCEP_SEED", env);
  }
  return cfg;
}

std::string HashText(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- network JSON ------------------------------------------------------------

std::string WriteNetworkJson(const NetworkSpec& net) {
  json j;
  j["name"] = net.name;
  j["nodes"] = net.nodes;
  j["arcs"] = json::array();
  for (const Arc& a : net.arcs) {
    j["arcs"].push_back({{"id", a.id},
                         {"tail", net.nodes[a.tail]},
                         {"head", net.nodes[a.head]},
                         {"capacity", a.capacity},
                         {"cost", a.cost}});
  }
  return j.dump(2) + "\n";
}

NetworkSpec ReadNetworkJson(const fs::path& path) {
  json j = ReadJson(path);
  NetworkSpec net;
  try {
    net.name = j.at("name").get<std::string>();
    net.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const json& a : j.at("arcs")) {
      net.arcs.push_back({a.at("id").get<std::string>(),
                          net.NodeIndex(a.at("tail").get<std::string>()),
                          net.NodeIndex(a.at("head").get<std::string>()),
                          a.at("capacity").get<double>(), a.at("cost").get<double>()});
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  net.Validate();
  return net;
}

// --- stages ------------------------------------------------------------------

void StageParse(const fs::path& network, const fs::path& scenarios, CostRule cost_rule,
                const fs::path& workdir) {
  NetworkParseOptions options;
  options.cost_rule = cost_rule;
  NetworkSpec net = ReadNetworkFile(network, options);
  ScenarioSet set = fs::is_directory(scenarios) ? LoadScenarioDir(scenarios, &net)
                                                : ReadScenarioCsvFile(scenarios);
  ResolveCommodities(net, set.commodities);
  WriteTextFile(workdir / "network.json", WriteNetworkJson(net));
  WriteScenarioCsvFile(set, workdir / "scenarios.csv");
}

void StageBuildSets(const fs::path& workdir, const SetsRequest& request) {
  const fs::path scen_path = workdir / "scenarios.csv";
  RequireArtifact(scen_path, "parse");
  ScenarioSet all = ReadScenarioCsvFile(scen_path);
  TrainEvalSplit split = SplitTrainEval(all, request.stride);
  if (split.eval.scenario_count() == 0) {
    Fail(ErrorCode::kInvalidArgument, "stride leaves no evaluation scenarios");
  }
  ScenarioSet eval = split.eval;
  if (request.eval_commodities != 0) {
    eval = eval.SelectColumns(SelectTopCommodities(split.train, request.eval_commodities).kept);
  }
  WriteScenarioCsvFile(split.train, workdir / "sets" / "train.csv");
  WriteScenarioCsvFile(eval, workdir / "sets" / "eval.csv");

  for (std::size_t k : request.commodities) {
    fs::path dir = SetsDir(workdir, k);
    TopCommodities top = SelectTopCommodities(split.train, k);
    ScenarioSet train = DropZeroCommodities(top.set);
    WriteScenarioCsvFile(train, dir / "train.csv");

    ScenarioSet mean_set;
    mean_set.commodities = train.commodities;
    mean_set.demands = {ZeroInflatedMean(train).mean};
    mean_set.labels = {"mean"};
    WriteScenarioCsvFile(mean_set, dir / "mean.csv");

    for (double lambda : request.lambdas) {
      ScenarioSet d = train;
      d.demands = BuildDiscreteSet(train, lambda).scenarios;
      WriteScenarioCsvFile(d, dir / ("discrete_lambda" + ShortDouble(lambda) + ".csv"));
    }
    for (std::size_t m : request.hyperplanes) {
      Polyhedron p = SampleHyperplanes(train, m, request.seed);
      WriteTextFile(dir / ("poly_M" + std::to_string(m) + ".csv"), WritePolyhedronCsv(p));
    }
    json meta;
    meta["K"] = k;
    meta["coverage"] = top.coverage;
    meta["kept"] = train.commodity_count();
    meta["dropped_zero"] = top.set.commodity_count() - train.commodity_count();
    meta["train_scenarios"] = train.scenario_count();
    meta["seed"] = request.seed;
    WriteJson(dir / "meta.json", meta);
  }
}

std::string PointName(const SolveRequest& r) {
  std::string name = r.experiment.empty() ? ToString(r.model) : r.experiment;
  name += "_sigma" + ShortDouble(r.sigma);
  if (r.lambda) name += "_lambda" + ShortDouble(*r.lambda);
  if (r.hyperplanes) name += "_M" + std::to_string(*r.hyperplanes);
  return name;
}

namespace {

json RecordJson(const SolveRecord& r) {
  json j;
  j["experiment"] = r.experiment;
  j["model"] = ToString(r.model);
  j["sigma"] = r.sigma;
  j["lambda"] = OptionalJson(r.lambda);
  j["M"] = OptionalJson(r.hyperplanes);
  j["K"] = r.commodities;
  j["objective"] = r.objective;
  j["investment_cost"] = r.investment_cost;
  j["worst_case_outsourced"] = OptionalJson(r.worst_case_outsourced);
  j["iterations"] = r.iterations;
  j["arcs"] = r.arc_ids;
  j["x"] = r.x;
  return j;
}

SolveRecord RecordFromJson(const json& j) {
  SolveRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.model = ParseModelTag(j.at("model").get<std::string>());
  r.sigma = j.at("sigma").get<double>();
  if (!j.at("lambda").is_null()) r.lambda = j.at("lambda").get<double>();
  if (!j.at("M").is_null()) r.hyperplanes = j.at("M").get<std::size_t>();
  r.commodities = j.at("K").get<std::size_t>();
  r.objective = j.at("objective").get<double>();
  r.investment_cost = j.at("investment_cost").get<double>();
  if (!j.at("worst_case_outsourced").is_null()) {
    r.worst_case_outsourced = j.at("worst_case_outsourced").get<double>();
  }
  r.iterations = j.at("iterations").get<std::size_t>();
  r.arc_ids = j.at("arcs").get<std::vector<std::string>>();
  r.x = j.at("x").get<std::vector<double>>();
  return r;
}

json ReportJson(const SolveRecord& r, const EvaluationReport& report,
                const std::vector<std::string>& labels) {
  json j = RecordJson(r);
  j["evaluation"] = {{"investment_cost", report.investment_cost},
                     {"mean", report.metrics.mean},
                     {"max", report.metrics.max},
                     {"cvar10", report.metrics.cvar},
                     {"std", report.metrics.std},
                     {"scenarios", labels},
                     {"outsourced", report.outsourced}};
  return j;
}

}  // namespace

namespace {

struct BuiltModel {
  NetworkSpec net;
  SolveRequest request;  // lambda / M normalised for the model
  Model model;
};

BuiltModel BuildRequested(const fs::path& workdir, const SolveRequest& request) {
  const fs::path net_path = workdir / "network.json";
  RequireArtifact(net_path, "parse");
  BuiltModel b;
  b.net = ReadNetworkJson(net_path);
  const NetworkSpec& net = b.net;
  const fs::path dir = SetsDir(workdir, request.commodities);
  const fs::path train_path = dir / "train.csv";
  RequireArtifact(train_path, "build-sets (commodities " + std::to_string(request.commodities) + ")");
  ScenarioSet train = ReadScenarioCsvFile(train_path);

  SolveRequest& req = b.request;
  req = request;
  Model& model = b.model;
  switch (req.model) {
    case ModelTag::kNominal: {
      req.lambda.reset();
      req.hyperplanes.reset();
      model = BuildNominal(net, train.commodities, BuildDiscreteSet(train, 0.0).scenarios.at(0),
                           req.sigma);
      break;
    }
    case ModelTag::kDiscrete: {
      if (!req.lambda) req.lambda = 1.0;
      req.hyperplanes.reset();
      fs::path p = dir / ("discrete_lambda" + ShortDouble(*req.lambda) + ".csv");
      RequireArtifact(p, "build-sets (lambda " + ShortDouble(*req.lambda) + ")");
      ScenarioSet d = ReadScenarioCsvFile(p);
      model = BuildDiscreteRobust(net, d.commodities, DiscreteSet{d.demands, *req.lambda}, req.sigma);
      break;
    }
    case ModelTag::kStochastic: {
      req.lambda.reset();
      req.hyperplanes.reset();
      fs::path p = dir / "mean.csv";
      RequireArtifact(p, "build-sets");
      ScenarioSet m = ReadScenarioCsvFile(p);
      model = BuildStochasticMean(net, m.commodities, MeanDemand{m.demands.at(0)}, req.sigma);
      break;
    }
    case ModelTag::kAarc: {
      if (!req.hyperplanes) req.hyperplanes = 1;
      req.lambda.reset();
      fs::path p = dir / ("poly_M" + std::to_string(*req.hyperplanes) + ".csv");
      RequireArtifact(p, "build-sets (hyperplanes " + std::to_string(*req.hyperplanes) + ")");
      Polyhedron poly = ParsePolyhedronCsv(ReadTextFile(p));
      model = BuildAarc(net, train.commodities, poly, req.sigma);
      break;
    }
  }
  return b;
}

}  // namespace

fs::path StageSolve(const fs::path& workdir, const SolveRequest& request, SolveRecord* out) {
  BuiltModel b = BuildRequested(workdir, request);
  const NetworkSpec& net = b.net;
  const SolveRequest& req = b.request;
  const Model& model = b.model;
  LpSolution sol = Solve(model.lp, req.options);
  const std::string name = PointName(req);
  if (sol.status != SolveStatus::kOptimal) {
    Fail(ErrorCode::kSolver, name + ": " + ToString(sol.status) + " after " +
                                 std::to_string(sol.iterations) + " iterations");
  }
  SolveRecord rec;
  rec.experiment = req.experiment.empty() ? ToString(req.model) : req.experiment;
  rec.model = req.model;
  rec.sigma = req.sigma;
  rec.lambda = req.lambda;
  rec.hyperplanes = req.hyperplanes;
  rec.commodities = req.commodities;
  rec.objective = sol.objective;
  rec.x = ExtractFirstStage(sol, model.catalog);
  rec.investment_cost = InvestmentCost(net, rec.x);
  if (auto tau = model.catalog.Find({VarFamily::kTau})) {
    rec.worst_case_outsourced = std::max(sol.x[*tau], 0.0);
  }
  rec.iterations = sol.iterations;
  for (const Arc& a : net.arcs) rec.arc_ids.push_back(a.id);

  fs::path json_path = workdir / "solutions" / (name + ".json");
  WriteJson(json_path, RecordJson(rec));
  WriteTextFile(workdir / "solutions" / (name + ".x.csv"), WriteInvestmentCsv(net, rec.x));
  if (out != nullptr) *out = std::move(rec);
  return json_path;
}

std::string StageWriteLp(const fs::path& workdir, const SolveRequest& request) {
  BuiltModel b = BuildRequested(workdir, request);
  return WriteLpFile(b.model.lp, b.model.catalog.Names());
}

SolveRecord ReadSolveRecord(const fs::path& path) {
  json j = ReadJson(path);
  try {
    return RecordFromJson(j);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

fs::path StageEvaluate(const fs::path& workdir, const fs::path& solution,
                       const EvaluateOptions& options) {
  RequireArtifact(solution, "solve");
  const fs::path net_path = workdir / "network.json";
  RequireArtifact(net_path, "parse");
  const fs::path eval_path = workdir / "sets" / "eval.csv";
  RequireArtifact(eval_path, "build-sets");
  NetworkSpec net = ReadNetworkJson(net_path);
  SolveRecord rec = ReadSolveRecord(solution);
  if (rec.x.size() != net.arcs.size()) {
    Fail(ErrorCode::kInvalidArgument, solution.string() + ": investment does not match network");
  }
  ScenarioSet eval = ReadScenarioCsvFile(eval_path);
  EvaluationReport report = EvaluateInvestment(net, rec.x, eval, options);
  fs::path out = workdir / "reports" / solution.filename();
  WriteJson(out, ReportJson(rec, report, eval.labels));
  return out;
}

std::string WriteInvestmentCsv(const NetworkSpec& net, const std::vector<double>& x) {
  std::string out = "arc,x\n";
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    out += net.arcs[a].id + "," + FormatDouble(x.at(a)) + "\n";
  }
  return out;
}

std::vector<double> ReadInvestmentCsv(const fs::path& path, const NetworkSpec& net) {
  std::string text = ReadTextFile(path);
  std::vector<double> x(net.arcs.size(), 0.0);
  std::vector<bool> seen(net.arcs.size(), false);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "arc,x") throw Error(ErrorCode::kParse, path.string() + ": expected header arc,x", 1);
      continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kParse, "expected arc,value", line_no);
    std::string id = line.substr(0, comma);
    auto it = std::find_if(net.arcs.begin(), net.arcs.end(), [&](const Arc& a) { return a.id == id; });
    if (it == net.arcs.end()) throw Error(ErrorCode::kParse, "unknown arc '" + id + "'", line_no);
    std::size_t a = static_cast<std::size_t>(it - net.arcs.begin());
    if (seen[a]) throw Error(ErrorCode::kParse, "arc '" + id + "' listed twice", line_no);
    seen[a] = true;
    x[a] = ParseDouble(std::string_view(line).substr(comma + 1), line_no);
    if (!(x[a] >= 0.0)) throw Error(ErrorCode::kParse, "negative investment", line_no);
  }
  return x;
}

EvaluationReport StageEvaluateInvestment(const fs::path& workdir, const fs::path& investment,
                                         const fs::path& out, const EvaluateOptions& options) {
  const fs::path net_path = workdir / "network.json";
  RequireArtifact(net_path, "parse");
  const fs::path eval_path = workdir / "sets" / "eval.csv";
  RequireArtifact(eval_path, "build-sets");
  NetworkSpec net = ReadNetworkJson(net_path);
  std::vector<double> x = ReadInvestmentCsv(investment, net);
  ScenarioSet eval = ReadScenarioCsvFile(eval_path);
  EvaluationReport report = EvaluateInvestment(net, x, eval, options);
  SolveRecord rec;
  rec.experiment = investment.stem().string();
  rec.model = ModelTag::kNominal;
  rec.x = x;
  rec.investment_cost = report.investment_cost;
  for (const Arc& a : net.arcs) rec.arc_ids.push_back(a.id);
  json j = ReportJson(rec, report, eval.labels);
  j["model"] = "investment";
  WriteJson(out, j);
  return report;
}

FrontierPoint ReadFrontierPoint(const fs::path& report) {
  json j = ReadJson(report);
  try {
    if (!j.contains("evaluation")) {
      Fail(ErrorCode::kInvalidArgument, report.string() + " is not an evaluation report");
    }
    const json& e = j.at("evaluation");
    FrontierPoint p;
    p.model = j.at("experiment").get<std::string>();
    p.sigma = j.at("sigma").get<double>();
    if (!j.at("lambda").is_null()) p.lambda = j.at("lambda").get<double>();
    if (!j.at("M").is_null()) p.hyperplanes = j.at("M").get<std::size_t>();
    p.investment_cost = e.at("investment_cost").get<double>();
    p.metrics.mean = e.at("mean").get<double>();
    p.metrics.max = e.at("max").get<double>();
    p.metrics.cvar = e.at("cvar10").get<double>();
    p.metrics.std = e.at("std").get<double>();
    return p;
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kParse, report.string() + ": " + ex.what());
  }
}

std::string StageFrontier(const std::vector<fs::path>& reports, const fs::path& out) {
  std::vector<FrontierPoint> points;
  for (const fs::path& r : reports) {
    RequireArtifact(r, "evaluate");
    points.push_back(ReadFrontierPoint(r));
  }
  std::string csv = WriteFrontierCsv(std::move(points));
  if (!out.empty()) WriteTextFile(out, csv);
  return csv;
}

RunSummary RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const fs::path out = config.output;
  fs::create_directories(out);
  fs::remove(out / "FAILED");
  try {
    StageParse(config.network, config.scenarios, config.cost_rule, out);

    SetsRequest sets;
    sets.stride = config.stride;
    sets.eval_commodities = config.eval_commodities;
    sets.seed = config.seed;
    std::set<std::size_t> ks, ms;
    std::set<double> lambdas;
    for (const ExperimentSpec& e : config.experiments) {
      ks.insert(e.commodities);
      lambdas.insert(e.lambdas.begin(), e.lambdas.end());
      ms.insert(e.hyperplanes.begin(), e.hyperplanes.end());
    }
    sets.commodities.assign(ks.begin(), ks.end());
    sets.lambdas.assign(lambdas.begin(), lambdas.end());
    sets.hyperplanes.assign(ms.begin(), ms.end());
    StageBuildSets(out, sets);

    std::vector<SolveRequest> points;
    for (const ExperimentSpec& e : config.experiments) {
      for (double sigma : e.sigmas) {
        SolveRequest r;
        r.experiment = e.name;
        r.model = e.model;
        r.sigma = sigma;
        r.commodities = e.commodities;
        r.options = config.solver;
        if (e.model == ModelTag::kDiscrete) {
          for (double l : e.lambdas) {
            r.lambda = l;
            points.push_back(r);
          }
        } else if (e.model == ModelTag::kAarc) {
          for (std::size_t m : e.hyperplanes) {
            r.hyperplanes = m;
            points.push_back(r);
          }
        } else {
          points.push_back(r);
        }
      }
    }
    std::set<std::string> names;
    for (const SolveRequest& r : points) {
      if (!names.insert(PointName(r)).second) {
        Fail(ErrorCode::kConfig, "grid point " + PointName(r) + " appears twice");
      }
    }

    std::vector<fs::path> reports(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < points.size(); i = next++) {
        try {
          fs::path sol = StageSolve(out, points[i]);
          reports[i] = StageEvaluate(out, sol, EvaluateOptions{1, config.solver});
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::size_t workers = std::min(config.threads, std::max<std::size_t>(points.size(), 1));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    RunSummary summary;
    summary.solved = points.size();
    summary.frontier = out / "frontier.csv";
    StageFrontier(reports, summary.frontier);

    json manifest;
    manifest["config_hash"] = HashText(config.source + "\nseed=" + std::to_string(config.seed));
    manifest["seed"] = config.seed;
    manifest["network"] = config.network.string();
    manifest["network_hash"] = HashText(ReadTextFile(out / "network.json"));
    manifest["scenarios"] = config.scenarios.string();
    manifest["scenarios_hash"] = HashText(ReadTextFile(out / "scenarios.csv"));
    manifest["stride"] = config.stride;
    manifest["eval_commodities"] = config.eval_commodities;
    manifest["points"] = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const SolveRequest& r = points[i];
      const std::string name = PointName(r);
      std::string cmd = "rncep solve --workdir <output> --model " + std::string(ToString(r.model)) +
                        " --tag " + r.experiment + " --commodities " +
                        std::to_string(r.commodities) + " --sigma " + ShortDouble(r.sigma);
      if (r.lambda) cmd += " --lambda " + ShortDouble(*r.lambda);
      if (r.hyperplanes) cmd += " --hyperplanes " + std::to_string(*r.hyperplanes);
      manifest["points"].push_back({{"name", name},
                                    {"experiment", r.experiment},
                                    {"model", ToString(r.model)},
                                    {"sigma", r.sigma},
                                    {"lambda", OptionalJson(r.lambda)},
                                    {"M", OptionalJson(r.hyperplanes)},
                                    {"K", r.commodities},
                                    {"solution", "solutions/" + name + ".json"},
                                    {"report", "reports/" + name + ".json"},
                                    {"command", cmd}});
    }
    summary.manifest = out / "manifest.json";
    WriteJson(summary.manifest, manifest);
    return summary;
  } catch (const std::exception& e) {
    try {
      WriteTextFile(out / "FAILED", std::string(e.what()) + "\n");
    } catch (...) {
    }
    throw;
  }
}

}  // namespace rncep
