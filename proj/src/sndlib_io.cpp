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

#include "rncep/sndlib_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rncep/error.hpp"

namespace rncep {
namespace {

// Splits a line into tokens; parentheses are always separate tokens and '#'
// starts a comment.
std::vector<std::string> Tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (char ch : line) {
    if (ch == '#') break;
    if (ch == '(' || ch == ')') {
      flush();
      tokens.emplace_back(1, ch);
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return tokens;
}

struct SectionLine {
  std::size_t line_no;
  std::vector<std::string> tokens;
};

// Section name -> body lines. Sections other than the ones a caller asks for
// are collected too and ignored later (META, ADMISSIBLE_PATHS, ...).
std::map<std::string, std::vector<SectionLine>> SplitSections(
    std::string_view text) {
  std::map<std::string, std::vector<SectionLine>> sections;
  std::string open;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!raw.empty() && raw.front() == '?') continue;  // format banner
    std::vector<std::string> tokens = Tokenize(raw);
    if (tokens.empty()) continue;
    if (open.empty()) {
      if (tokens.size() != 2 || tokens[1] != "(") {
        throw Error(ErrorCode::kParse,
                    "malformed section header '" + std::string(raw) + "'",
                    line_no);
      }
      open = tokens[0];
      if (sections.count(open) != 0) {
        throw Error(ErrorCode::kParse, "duplicate section " + open, line_no);
      }
      sections[open];
      continue;
    }
    if (tokens.size() == 1 && tokens[0] == ")") {
      open.clear();
      continue;
    }
    sections[open].push_back({line_no, std::move(tokens)});
    if (end == text.size()) break;
  }
  if (!open.empty()) {
    throw Error(ErrorCode::kParse, "unterminated section " + open, line_no);
  }
  return sections;
}

// `<id> ( <a> <b> )` prefix shared by LINKS and DEMANDS lines.
struct Endpoints {
  std::string id;
  std::string a;
  std::string b;
};

Endpoints ParseEndpoints(const SectionLine& line) {
  const auto& t = line.tokens;
  if (t.size() < 5 || t[1] != "(" || t[4] != ")") {
    throw Error(ErrorCode::kParse, "expected '<id> ( <node> <node> )'",
                line.line_no);
  }
  return {t[0], t[2], t[3]};
}

double NonNegative(std::string_view token, std::size_t line,
                   const char* what) {
  double value = ParseDouble(token, line);
  if (value < 0.0) {
    throw Error(ErrorCode::kParse,
                std::string("negative ") + what + " '" + std::string(token) +
                    "'",
                line);
  }
  return value;
}

bool ValidCommodityName(std::string_view name) {
  return !name.empty() && name.find_first_of(":,\n\r\"") == std::string::npos;
}

}  // namespace

std::optional<std::size_t> NetworkSpec::FindNode(std::string_view id) const {
  auto it = std::find(nodes.begin(), nodes.end(), id);
  if (it == nodes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::size_t NetworkSpec::NodeIndex(std::string_view id) const {
  auto idx = FindNode(id);
  if (!idx) Fail(ErrorCode::kInvalidArgument, "unknown node '" + std::string(id) + "'");
  return *idx;
}

std::vector<std::vector<std::size_t>> NetworkSpec::OutArcs() const {
  std::vector<std::vector<std::size_t>> out(nodes.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) out[arcs[a].tail].push_back(a);
  return out;
}

std::vector<std::vector<std::size_t>> NetworkSpec::InArcs() const {
  std::vector<std::vector<std::size_t>> in(nodes.size());
  for (std::size_t a = 0; a < arcs.size(); ++a) in[arcs[a].head].push_back(a);
  return in;
}

void NetworkSpec::Validate() const {
  std::unordered_set<std::string> node_ids(nodes.begin(), nodes.end());
  if (node_ids.size() != nodes.size()) {
    Fail(ErrorCode::kInvalidArgument, "duplicate node id");
  }
  std::unordered_set<std::string> arc_ids;
  for (const Arc& arc : arcs) {
    if (arc.tail >= nodes.size() || arc.head >= nodes.size()) {
      Fail(ErrorCode::kInvalidArgument, "arc " + arc.id + " references a missing node");
    }
    if (!(arc.capacity >= 0.0) || !(arc.cost >= 0.0) ||
        !std::isfinite(arc.capacity) || !std::isfinite(arc.cost)) {
      Fail(ErrorCode::kInvalidArgument, "arc " + arc.id + " has negative capacity or cost");
    }
    if (!arc_ids.insert(arc.id).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate arc id " + arc.id);
    }
  }
}

std::vector<double> ScenarioSet::Column(std::size_t k) const {
  if (k >= commodity_count()) {
    Fail(ErrorCode::kInvalidArgument, "commodity index out of range");
  }
  std::vector<double> column;
  column.reserve(demands.size());
  for (const auto& row : demands) column.push_back(row[k]);
  return column;
}

ScenarioSet ScenarioSet::SelectRows(const std::vector<std::size_t>& rows) const {
  ScenarioSet out;
  out.commodities = commodities;
  for (std::size_t i : rows) {
    out.demands.push_back(demands.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

ScenarioSet ScenarioSet::SelectColumns(const std::vector<std::size_t>& cols) const {
  ScenarioSet out;
  out.labels = labels;
  for (std::size_t k : cols) out.commodities.push_back(commodities.at(k));
  out.demands.reserve(demands.size());
  for (const auto& row : demands) {
    std::vector<double> picked;
    picked.reserve(cols.size());
    for (std::size_t k : cols) picked.push_back(row[k]);
    out.demands.push_back(std::move(picked));
  }
  return out;
}

void ScenarioSet::Validate() const {
  if (labels.size() != demands.size()) {
    Fail(ErrorCode::kInvalidArgument, "label count differs from scenario count");
  }
  for (const Commodity& c : commodities) {
    if (c.source == c.sink) {
      Fail(ErrorCode::kInvalidArgument, "commodity " + c.source + ":" + c.sink +
                                            " has equal source and sink");
    }
  }
  for (const auto& row : demands) {
    if (row.size() != commodities.size()) {
      Fail(ErrorCode::kInvalidArgument, "ragged demand matrix");
    }
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        Fail(ErrorCode::kInvalidArgument, "demand values must be finite and >= 0");
      }
    }
  }
}

std::vector<Arc> ExpandUndirected(const std::vector<Link>& links) {
  std::vector<Arc> arcs;
  arcs.reserve(2 * links.size());
  for (const Link& link : links) {
    arcs.push_back({link.id + ".fwd", link.a, link.b, link.capacity, link.cost});
    arcs.push_back({link.id + ".rev", link.b, link.a, link.capacity, link.cost});
  }
  return arcs;
}

NetworkSpec ParseNetwork(std::string_view text,
                         const NetworkParseOptions& options) {
  auto sections = SplitSections(text);
  if (sections.count("NODES") == 0) {
    Fail(ErrorCode::kParse, "missing NODES section");
  }
  if (sections.count("LINKS") == 0) {
    Fail(ErrorCode::kParse, "missing LINKS section");
  }

  NetworkSpec net;
  for (const SectionLine& line : sections["NODES"]) {
    const std::string& id = line.tokens[0];
    if (id == "(" || id == ")") {
      throw Error(ErrorCode::kParse, "expected node id", line.line_no);
    }
    if (net.FindNode(id)) {
      throw Error(ErrorCode::kParse, "duplicate node '" + id + "'", line.line_no);
    }
    net.nodes.push_back(id);
  }

  std::vector<Link> links;
  for (const SectionLine& line : sections["LINKS"]) {
    Endpoints ends = ParseEndpoints(line);
    const auto& t = line.tokens;
    // <id> ( a b ) pre_cap pre_cap_cost routing_cost setup_cost ( {cap cost}* )
    if (t.size() < 11 || t[9] != "(" || t.back() != ")") {
      throw Error(ErrorCode::kParse, "malformed link line", line.line_no);
    }
    Link link;
    link.id = ends.id;
    for (const std::string* name : {&ends.a, &ends.b}) {
      if (!net.FindNode(*name)) {
        throw Error(ErrorCode::kParse, "unknown node '" + *name + "'", line.line_no);
      }
    }
    link.a = *net.FindNode(ends.a);
    link.b = *net.FindNode(ends.b);
    link.capacity = NonNegative(t[5], line.line_no, "capacity");
    NonNegative(t[6], line.line_no, "capacity cost");
    double routing_cost = NonNegative(t[7], line.line_no, "routing cost");
    NonNegative(t[8], line.line_no, "setup cost");

    std::size_t module_tokens = t.size() - 11;
    if (module_tokens % 2 != 0) {
      throw Error(ErrorCode::kParse, "module list needs capacity/cost pairs",
                  line.line_no);
    }
    double cost = routing_cost;
    bool have_module = false;
    for (std::size_t m = 10; m + 1 < t.size() - 1; m += 2) {
      double mod_cap = NonNegative(t[m], line.line_no, "module capacity");
      double mod_cost = NonNegative(t[m + 1], line.line_no, "module cost");
      if (options.cost_rule == CostRule::kFirstModuleCost) {
        if (!have_module) cost = mod_cost;
      } else if (mod_cap > 0.0) {
        double unit = mod_cost / mod_cap;
        if (!have_module || unit < cost) cost = unit;
      } else {
        continue;
      }
      have_module = true;
    }
    link.cost = cost;
    links.push_back(std::move(link));
  }
  net.arcs = ExpandUndirected(links);
  try {
    net.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return net;
}

NetworkSpec ReadNetworkFile(const std::filesystem::path& path,
                            const NetworkParseOptions& options) {
  NetworkSpec net = ParseNetwork(ReadTextFile(path), options);
  net.name = path.stem().string();
  return net;
}

std::vector<DemandEntry> ParseDemands(std::string_view text) {
  auto sections = SplitSections(text);
  if (sections.count("DEMANDS") == 0) {
    Fail(ErrorCode::kParse, "missing DEMANDS section");
  }
  std::map<Commodity, double> summed;
  for (const SectionLine& line : sections["DEMANDS"]) {
    Endpoints ends = ParseEndpoints(line);
    // <id> ( s t ) <routing_unit> <demand_value> <max_path_length>
    if (line.tokens.size() < 7) {
      throw Error(ErrorCode::kParse, "malformed demand line", line.line_no);
    }
    if (ends.a == ends.b) {
      throw Error(ErrorCode::kParse, "demand with equal source and sink", line.line_no);
    }
    double value = NonNegative(line.tokens[6], line.line_no, "demand");
    summed[{ends.a, ends.b}] += value;
  }
  std::vector<DemandEntry> out;
  out.reserve(summed.size());
  for (const auto& [commodity, value] : summed) out.push_back({commodity, value});
  return out;
}

ScenarioSet LoadScenarioDir(const std::filesystem::path& dir,
                            const NetworkSpec* network) {
  if (!std::filesystem::is_directory(dir)) {
    Fail(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (files.empty()) {
    Fail(ErrorCode::kInvalidArgument, "scenario directory is empty: " + dir.string());
  }
  std::sort(files.begin(), files.end(), [](const auto& x, const auto& y) {
    return x.filename().string() < y.filename().string();
  });

  std::vector<std::vector<DemandEntry>> per_file;
  std::set<Commodity> pairs;
  for (const auto& file : files) {
    std::vector<DemandEntry> entries;
    try {
      entries = ParseDemands(ReadTextFile(file));
    } catch (const Error& e) {
      throw Error(e.code(), file.filename().string() + ": " + e.what());
    }
    for (const DemandEntry& d : entries) {
      if (network != nullptr &&
          (!network->FindNode(d.commodity.source) ||
           !network->FindNode(d.commodity.sink))) {
        Fail(ErrorCode::kInvalidArgument,
             file.filename().string() + ": demand " + d.commodity.source + ":" +
                 d.commodity.sink + " references a node missing from network " +
                 network->name);
      }
      pairs.insert(d.commodity);
    }
    per_file.push_back(std::move(entries));
  }

  ScenarioSet set;
  set.commodities.assign(pairs.begin(), pairs.end());
  std::map<Commodity, std::size_t> column;
  for (std::size_t k = 0; k < set.commodities.size(); ++k) {
    column[set.commodities[k]] = k;
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::vector<double> row(set.commodities.size(), 0.0);
    for (const DemandEntry& d : per_file[i]) row[column[d.commodity]] = d.value;
    set.demands.push_back(std::move(row));
    set.labels.push_back(files[i].stem().string());
  }
  return set;
}

// Header `s:t,...`; an optional leading `scenario` column carries labels.
// Without it labels default to the row index.
ScenarioSet ParseScenarioCsv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) Fail(ErrorCode::kParse, "empty scenario CSV");

  auto split = [](std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return cells;
  };

  ScenarioSet set;
  std::vector<std::string_view> header = split(lines[0]);
  bool labelled = !header.empty() && header[0] == "scenario";
  std::size_t first = labelled ? 1 : 0;
  if (header.size() == 1 && header[0].empty()) header.clear();
  for (std::size_t c = first; c < header.size(); ++c) {
    std::size_t colon = header[c].find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "header cell must be 'source:sink'", 1);
    }
    Commodity commodity{std::string(header[c].substr(0, colon)),
                        std::string(header[c].substr(colon + 1))};
    if (commodity.source.empty() || commodity.sink.empty() ||
        commodity.sink.find(':') != std::string::npos) {
      throw Error(ErrorCode::kParse, "bad commodity '" + std::string(header[c]) + "'", 1);
    }
    if (commodity.source == commodity.sink) {
      throw Error(ErrorCode::kParse, "commodity with equal source and sink", 1);
    }
    set.commodities.push_back(std::move(commodity));
  }

  for (std::size_t r = 1; r < lines.size(); ++r) {
    std::vector<std::string_view> cells = split(lines[r]);
    if (set.commodities.empty() && !labelled && cells.size() == 1 && cells[0].empty()) {
      cells.clear();
    }
    if (cells.size() != set.commodities.size() + first) {
      throw Error(ErrorCode::kParse, "ragged row", r + 1);
    }
    std::vector<double> row;
    row.reserve(set.commodities.size());
    for (std::size_t c = first; c < cells.size(); ++c) {
      double value = ParseDouble(cells[c], r + 1);
      if (!(value >= 0.0)) {
        throw Error(ErrorCode::kParse, "negative demand '" + std::string(cells[c]) + "'", r + 1);
      }
      row.push_back(value);
    }
    set.demands.push_back(std::move(row));
    set.labels.push_back(labelled ? std::string(cells[0]) : std::to_string(r - 1));
  }
  return set;
}

std::string WriteScenarioCsv(const ScenarioSet& set) {
  set.Validate();
  bool labelled = false;
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    if (set.labels[i] != std::to_string(i)) labelled = true;
    if (set.labels[i].find_first_of(",\n\r") != std::string::npos) {
      Fail(ErrorCode::kInvalidArgument, "scenario label contains a separator");
    }
  }
  std::string out;
  std::vector<std::string> header;
  if (labelled) header.push_back("scenario");
  for (const Commodity& c : set.commodities) {
    if (!ValidCommodityName(c.source) || !ValidCommodityName(c.sink)) {
      Fail(ErrorCode::kInvalidArgument,
           "node name cannot be written to CSV: " + c.source + ":" + c.sink);
    }
    header.push_back(c.source + ":" + c.sink);
  }
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  emit(header);
  for (std::size_t i = 0; i < set.demands.size(); ++i) {
    std::vector<std::string> cells;
    if (labelled) cells.push_back(set.labels[i]);
    for (double v : set.demands[i]) cells.push_back(FormatDouble(v));
    emit(cells);
  }
  return out;
}

ScenarioSet ReadScenarioCsvFile(const std::filesystem::path& path) {
  try {
    return ParseScenarioCsv(ReadTextFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteScenarioCsvFile(const ScenarioSet& set,
                          const std::filesystem::path& path) {
  WriteTextFile(path, WriteScenarioCsv(set));
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

std::string FormatDouble(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double ParseDouble(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || token.empty() || !std::isfinite(value)) {
    throw Error(ErrorCode::kParse, "expected a number, got '" + std::string(token) + "'", line);
  }
  return value;
}

}  // namespace rncep
