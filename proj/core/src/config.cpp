// Copyright 2026 The gnelearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gnelearn/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace gnelearn {

namespace {

using nlohmann::json;

struct SchemaIssue {
  std::string path;
  std::string what;
};

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const { throw SchemaIssue{path, what}; }

  std::string format(const SchemaIssue& issue) const {
    std::ostringstream msg;
    msg << source_;
    if (auto where = locate(issue.path)) msg << ":" << *where;
    msg << ": " << (issue.path.empty() ? std::string("document") : "'" + issue.path + "'") << " " << issue.what;
    return msg.str();
  }

  [[noreturn]] void fail_at(std::size_t byte, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line_col(byte) << ": " << what;
    throw ConfigError(msg.str());
  }

  const json& object(const json& parent, const std::string& key, const std::string& path) const {
    const json& node = parent.at(key);
    if (!node.is_object()) fail(join(path, key), "must be an object");
    return node;
  }

  void only_keys(const json& node, const std::string& path, std::initializer_list<const char*> allowed) const {
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, _] : node.items())
      if (!names.count(key)) fail(join(path, key), "is not a recognized key");
  }

  double number(const json& node, const std::string& path) const {
    if (!node.is_number()) fail(path, "must be a number");
    return node.get<double>();
  }

  long integer(const json& node, const std::string& path, long lo) const {
    if (!node.is_number_integer()) fail(path, "must be an integer");
    const long v = node.get<long>();
    if (v < lo) fail(path, "must be at least " + std::to_string(lo));
    return v;
  }

  std::uint64_t seed(const json& node, const std::string& path) const {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<long long>() >= 0))
      fail(path, "must be a non-negative integer");
    return node.get<std::uint64_t>();
  }

  Vector vector(const json& node, const std::string& path, Eigen::Index size = -1) const {
    if (!node.is_array()) fail(path, "must be an array of numbers");
    if (size >= 0 && static_cast<Eigen::Index>(node.size()) != size)
      fail(path, "must have " + std::to_string(size) + " entries, found " + std::to_string(node.size()));
    Vector out(static_cast<Eigen::Index>(node.size()));
    for (std::size_t k = 0; k < node.size(); ++k) out[static_cast<Eigen::Index>(k)] = number(node[k], path + "[" + std::to_string(k) + "]");
    return out;
  }

  Matrix matrix(const json& node, const std::string& path, Eigen::Index rows, Eigen::Index cols) const {
    if (!node.is_array() || static_cast<Eigen::Index>(node.size()) != rows)
      fail(path, "must be an array of " + std::to_string(rows) + " rows");
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      out.row(r) = vector(node[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]", cols).transpose();
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  // Finds the key chain textually; good enough to point at the offending line.
  std::optional<std::string> locate(const std::string& path) const {
    if (path.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool found = false;
    std::stringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
      const std::string key = part.substr(0, part.find('['));
      const std::size_t at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      pos = at;
      found = true;
    }
    if (!found) return std::nullopt;
    return line_col(pos);
  }

  std::string line_col(std::size_t byte) const {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return "line " + std::to_string(line) + ":" + std::to_string(col);
  }

  const std::string& text_;
  std::string source_;
};

int players_of(const std::string& type, const json& params) {
  if (type == "builtin-micro") return 2;
  return params.at("players").get<int>();
}

ConvexSet read_set(const Reader& rd, const json& node, const std::string& path, int dim) {
  if (!node.is_object() || !node.contains("type")) rd.fail(path, "must be an object with a 'type'");
  const std::string type = node.at("type").is_string() ? node.at("type").get<std::string>() : "";
  try {
    if (type == "box") {
      rd.only_keys(node, path, {"type", "lower", "upper"});
      Vector lo = node.at("lower").is_number() ? Vector::Constant(dim, rd.number(node.at("lower"), path + ".lower"))
                                               : rd.vector(node.at("lower"), path + ".lower", dim);
      Vector hi = node.at("upper").is_number() ? Vector::Constant(dim, rd.number(node.at("upper"), path + ".upper"))
                                               : rd.vector(node.at("upper"), path + ".upper", dim);
      return ConvexSet::box(std::move(lo), std::move(hi));
    }
    if (type == "orthant") {
      rd.only_keys(node, path, {"type"});
      return ConvexSet::orthant(dim);
    }
    if (type == "ball") {
      rd.only_keys(node, path, {"type", "center", "radius"});
      return ConvexSet::ball(rd.vector(node.at("center"), path + ".center", dim), rd.number(node.at("radius"), path + ".radius"));
    }
    if (type == "halfspaces") {
      rd.only_keys(node, path, {"type", "normals", "offsets"});
      const Vector offsets = rd.vector(node.at("offsets"), path + ".offsets");
      return ConvexSet::halfspaces(rd.matrix(node.at("normals"), path + ".normals", offsets.size(), dim), offsets);
    }
  } catch (const json::out_of_range& e) {
    rd.fail(path, std::string("is missing a field: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rd.fail(path, e.what());
  }
  rd.fail(path + ".type", "must be one of box, orthant, ball, halfspaces");
}

void check_game(const Reader& rd, const std::string& type, const json& params) {
  const std::string base = "game.params";
  if (type == "builtin-micro") {
    rd.only_keys(params, base, {"c", "capacity"});
    if (params.contains("c")) rd.number(params["c"], base + ".c");
    if (params.contains("capacity")) rd.number(params["capacity"], base + ".capacity");
    return;
  }
  if (type == "cournot") {
    rd.only_keys(params, base, {"players", "horizon", "seed", "offset", "capacities", "player_cap"});
    if (!params.contains("players")) rd.fail(base, "needs 'players'");
    if (!params.contains("horizon")) rd.fail(base, "needs 'horizon'");
    rd.integer(params["players"], base + ".players", 2);
    const long d = rd.integer(params["horizon"], base + ".horizon", 1);
    if (params.contains("seed")) rd.seed(params["seed"], base + ".seed");
    if (params.contains("offset")) rd.vector(params["offset"], base + ".offset", d);
    if (params.contains("capacities")) rd.vector(params["capacities"], base + ".capacities", d);
    if (params.contains("player_cap")) rd.number(params["player_cap"], base + ".player_cap");
    return;
  }
  if (type == "quadratic") {
    rd.only_keys(params, base, {"players", "dim", "costs", "coupling", "local_sets", "quadratic_growth"});
    for (const char* key : {"players", "dim", "costs", "local_sets"})
      if (!params.contains(key)) rd.fail(base, std::string("needs '") + key + "'");
    const long n = rd.integer(params["players"], base + ".players", 1);
    const long d = rd.integer(params["dim"], base + ".dim", 1);
    if (!params["costs"].is_array() || static_cast<long>(params["costs"].size()) != n)
      rd.fail(base + ".costs", "must list one cost per player");
    const auto& sets = params["local_sets"];
    if (sets.is_array() && static_cast<long>(sets.size()) != n)
      rd.fail(base + ".local_sets", "must be one set or one per player");
    if (params.contains("quadratic_growth") && !params["quadratic_growth"].is_boolean())
      rd.fail(base + ".quadratic_growth", "must be a boolean");
    (void)d;
    return;
  }
  rd.fail("game.type", "must be one of cournot, quadratic, builtin-micro");
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// The learner seed and output directory are not part of the identity.
void rehash(ExperimentConfig& config) {
  json doc = config.document;
  if (doc.contains("learner")) doc["learner"].erase("seed");
  doc.erase("output");
  config.hash = fnv1a_hex(doc.dump());
}

namespace {

BuiltGame build_game_impl(const Reader& rd, const ExperimentConfig& cfg);

ExperimentConfig parse_checked(const Reader& rd, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    rd.fail_at(e.byte > 0 ? e.byte - 1 : 0, "parse error: " + what.substr(what.find(':') + 2));
  }
  if (!doc.is_object()) rd.fail("", "must be a JSON object");
  rd.only_keys(doc, "", {"game", "schedule", "learner", "oracle", "output"});
  if (!doc.contains("game")) rd.fail("", "needs a 'game' section");

  ExperimentConfig cfg;
  const json& game = rd.object(doc, "game", "");
  rd.only_keys(game, "game", {"type", "params"});
  if (!game.contains("type") || !game["type"].is_string()) rd.fail("game.type", "must be a string");
  cfg.game_type = game["type"].get<std::string>();
  cfg.game_params = game.contains("params") ? rd.object(game, "params", "game") : json::object();
  check_game(rd, cfg.game_type, cfg.game_params);
  const int players = players_of(cfg.game_type, cfg.game_params);

  bool has_coupling = cfg.game_type != "quadratic" || cfg.game_params.contains("coupling");

  json learner = doc.contains("learner") ? rd.object(doc, "learner", "") : json::object();
  rd.only_keys(learner, "learner", {"iters", "seed", "lambda0", "mu0", "mode"});
  if (learner.contains("iters")) cfg.iterations = rd.integer(learner["iters"], "learner.iters", 1);
  if (learner.contains("seed")) cfg.seed = rd.seed(learner["seed"], "learner.seed");
  cfg.mode = has_coupling ? LearnerMode::coupled : LearnerMode::uncoupled;
  if (learner.contains("mode")) {
    const auto& m = learner["mode"];
    if (m == "coupled") cfg.mode = LearnerMode::coupled;
    else if (m == "uncoupled") cfg.mode = LearnerMode::uncoupled;
    else rd.fail("learner.mode", "must be \"coupled\" or \"uncoupled\"");
    if (cfg.mode == LearnerMode::coupled && !has_coupling) rd.fail("learner.mode", "is coupled but the game has no coupling");
  }
  if (learner.contains("mu0")) cfg.mu0 = rd.vector(learner["mu0"], "learner.mu0");
  if (learner.contains("lambda0")) {
    if (cfg.mode == LearnerMode::uncoupled) rd.fail("learner.lambda0", "has no meaning in uncoupled mode");
    cfg.lambda0 = rd.vector(learner["lambda0"], "learner.lambda0");
    if ((cfg.lambda0->array() < 0.0).any()) rd.fail("learner.lambda0", "must be non-negative");
  }

  if (cfg.game_type == "cournot" && !cfg.game_params.contains("seed")) cfg.game_params["seed"] = cfg.seed;

  json schedule = doc.contains("schedule") ? rd.object(doc, "schedule", "") : json::object();
  rd.only_keys(schedule, "schedule", {"a", "b", "offsets", "dual_offset"});
  cfg.schedule = Schedule::uniform(players);
  if (schedule.contains("a")) cfg.schedule.a = rd.number(schedule["a"], "schedule.a");
  if (schedule.contains("b")) cfg.schedule.b = rd.number(schedule["b"], "schedule.b");
  if (schedule.contains("offsets")) {
    const auto& offs = schedule["offsets"];
    if (offs.is_number_integer()) {
      cfg.schedule.offsets.assign(static_cast<std::size_t>(players), static_cast<int>(rd.integer(offs, "schedule.offsets", 1)));
    } else {
      if (!offs.is_array() || static_cast<int>(offs.size()) != players)
        rd.fail("schedule.offsets", "must be an integer or one integer per player");
      for (std::size_t k = 0; k < offs.size(); ++k)
        cfg.schedule.offsets[k] = static_cast<int>(rd.integer(offs[k], "schedule.offsets[" + std::to_string(k) + "]", 1));
    }
  }
  if (schedule.contains("dual_offset"))
    cfg.schedule.dual_offset = static_cast<int>(rd.integer(schedule["dual_offset"], "schedule.dual_offset", 1));

  json oracle = doc.contains("oracle") ? rd.object(doc, "oracle", "") : json::object();
  rd.only_keys(oracle, "oracle", {"enabled", "tol", "max_iters"});
  if (oracle.contains("enabled")) {
    if (!oracle["enabled"].is_boolean()) rd.fail("oracle.enabled", "must be a boolean");
    cfg.oracle_enabled = oracle["enabled"].get<bool>();
  }
  if (oracle.contains("tol")) {
    cfg.oracle_tol = rd.number(oracle["tol"], "oracle.tol");
    if (!(cfg.oracle_tol > 0.0)) rd.fail("oracle.tol", "must be positive");
  }
  if (oracle.contains("max_iters")) cfg.oracle_max_iters = rd.integer(oracle["max_iters"], "oracle.max_iters", 1);

  json output = doc.contains("output") ? rd.object(doc, "output", "") : json::object();
  rd.only_keys(output, "output", {"dir"});
  if (output.contains("dir")) {
    if (!output["dir"].is_string()) rd.fail("output.dir", "must be a string");
    cfg.output_dir = output["dir"].get<std::string>();
  }

  cfg.document = {
      {"game", {{"type", cfg.game_type}, {"params", cfg.game_params}}},
      {"schedule", {{"a", cfg.schedule.a}, {"b", cfg.schedule.b}, {"offsets", cfg.schedule.offsets},
                    {"dual_offset", cfg.schedule.dual_offset}}},
      {"learner", {{"iters", cfg.iterations}, {"seed", cfg.seed}, {"mode", to_string(cfg.mode)}}},
      {"oracle", {{"enabled", cfg.oracle_enabled}, {"tol", cfg.oracle_tol}, {"max_iters", cfg.oracle_max_iters}}},
      {"output", {{"dir", cfg.output_dir}}},
  };
  if (cfg.mu0) cfg.document["learner"]["mu0"] = learner["mu0"];
  if (cfg.lambda0) cfg.document["learner"]["lambda0"] = learner["lambda0"];

  // Shapes that need the built game are checked here so validate catches them.
  BuiltGame built = build_game_impl(rd, cfg);
  if (cfg.mu0 && cfg.mu0->size() != built.game.joint_dim())
    rd.fail("learner.mu0", "must have " + std::to_string(built.game.joint_dim()) + " entries");
  if (cfg.lambda0 && cfg.lambda0->size() != built.game.constraints)
    rd.fail("learner.lambda0", "must have " + std::to_string(built.game.constraints) + " entries");

  rehash(cfg);
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Reader rd(text, source);
  try {
    return parse_checked(rd, text);
  } catch (const SchemaIssue& issue) {
    throw ConfigError(rd.format(issue));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

namespace {

BuiltGame build_game_impl(const Reader& rd, const ExperimentConfig& cfg) {
  const json& p = cfg.game_params;
  BuiltGame out;
  try {
    if (cfg.game_type == "builtin-micro") {
      out.game = micro_game(p.value("c", -4.0), p.value("capacity", 3.0), true);
    } else if (cfg.game_type == "cournot") {
      CournotOverrides ov;
      const int d = p.at("horizon").get<int>();
      if (p.contains("offset")) ov.offset = rd.vector(p["offset"], "game.params.offset", d);
      if (p.contains("capacities")) ov.capacities = rd.vector(p["capacities"], "game.params.capacities", d);
      if (p.contains("player_cap")) ov.player_cap = p["player_cap"].get<double>();
      const std::uint64_t master = p.contains("seed") ? p["seed"].get<std::uint64_t>() : cfg.seed;
      CournotGame cg = build_cournot(p.at("players").get<int>(), d, master, ov);
      out.game = std::move(cg.game);
      out.cournot = std::move(cg.params);
    } else if (cfg.game_type == "quadratic") {
      const int n = p.at("players").get<int>(), d = p.at("dim").get<int>();
      const Eigen::Index nd = static_cast<Eigen::Index>(n) * d;
      std::vector<QuadraticCost> costs;
      for (int i = 0; i < n; ++i) {
        const std::string path = "game.params.costs[" + std::to_string(i) + "]";
        const json& c = p["costs"][static_cast<std::size_t>(i)];
        if (!c.is_object() || !c.contains("hessian")) rd.fail(path, "needs a 'hessian'");
        rd.only_keys(c, path, {"hessian", "linear", "constant"});
        QuadraticCost q{rd.matrix(c["hessian"], path + ".hessian", nd, nd),
                        c.contains("linear") ? rd.vector(c["linear"], path + ".linear", nd) : Vector(Vector::Zero(nd)),
                        c.contains("constant") ? rd.number(c["constant"], path + ".constant") : 0.0};
        costs.push_back(std::move(q));
      }
      std::optional<AffineConstraint> coupling;
      if (p.contains("coupling")) {
        const json& g = p["coupling"];
        if (!g.is_object() || !g.contains("matrix") || !g.contains("offset"))
          rd.fail("game.params.coupling", "needs 'matrix' and 'offset'");
        const Vector h = rd.vector(g["offset"], "game.params.coupling.offset");
        coupling = AffineConstraint{rd.matrix(g["matrix"], "game.params.coupling.matrix", h.size(), nd), h};
      }
      std::vector<ConvexSet> sets;
      const json& ls = p["local_sets"];
      for (int i = 0; i < n; ++i) {
        const bool shared = !ls.is_array();
        const std::string path = shared ? "game.params.local_sets" : "game.params.local_sets[" + std::to_string(i) + "]";
        sets.push_back(read_set(rd, shared ? ls : ls[static_cast<std::size_t>(i)], path, d));
      }
      out.game = make_quadratic_game("quadratic", n, d, std::move(costs), std::move(coupling), std::move(sets));
      out.game.quadratic_growth = p.value("quadratic_growth", true);
    }
  } catch (const SchemaIssue&) {
    throw;
  } catch (const std::exception& e) {
    rd.fail("game.params", e.what());
  }
  if (cfg.mode == LearnerMode::uncoupled && out.game.constraints > 0) out.game = drop_coupling(std::move(out.game));
  return out;
}

}  // namespace

BuiltGame build_game(const ExperimentConfig& cfg) {
  const std::string empty;
  Reader rd(empty, "config");
  try {
    return build_game_impl(rd, cfg);
  } catch (const SchemaIssue& issue) {
    throw ConfigError(rd.format(issue));
  }
}

nlohmann::json cournot_config(int players, int horizon, std::uint64_t seed, long iterations) {
  return {
      {"game", {{"type", "cournot"}, {"params", {{"players", players}, {"horizon", horizon}, {"seed", seed}}}}},
      {"schedule", {{"a", 0.6}, {"b", 0.2}}},
      {"learner", {{"iters", iterations}, {"seed", seed}, {"mode", "coupled"}}},
      {"oracle", {{"enabled", true}, {"tol", 1e-8}}},
      {"output", {{"dir", "out"}}},
  };
}

}  // namespace gnelearn
