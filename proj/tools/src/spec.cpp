#include "spec.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "canlab/app.hpp"
#include "canlab/error.hpp"

namespace canlab::app {

namespace {

using P = ParamType;

const std::vector<ParamSpec> kHatParams{
    {"burn_in", P::Number, 1000.0, "time discarded before sampling"},
    {"horizon", P::Number, 1e4, "sampling period after burn-in"},
    {"thin", P::Number, 1.0, "time between recorded samples"},
    {"cap", P::Integer, 512, "span at which the interface run aborts"},
};

std::vector<ParamSpec> with_hat(std::vector<ParamSpec> extra) {
  std::vector<ParamSpec> all = kHatParams;
  all.insert(all.end(), extra.begin(), extra.end());
  return all;
}

const std::map<std::string, std::vector<ParamSpec>>& schema() {
  static const std::map<std::string, std::vector<ParamSpec>> s{
      {"verify-algebra",
       {{"operators", P::Integer, 1000, "random type-symmetric operators"},
        {"configs", P::Integer, 100, "random configurations per operator"},
        {"corrupt_psi", P::Bool, false, "negative control: perturb every psi image"}}},
      {"exact-dual",
       {{"n", P::Integer, 8, "ring size"},
        {"t", P::Number, 1.0, "time"},
        {"eps", P::Number, 1e-10, "uniformization tail bound"},
        {"trials", P::Integer, 50, "random initial pairs"},
        {"identity", P::String, "both", "dual, H or both"},
        {"tolerance", P::Number, 1e-8, "largest accepted deviation"}}},
      {"simulate",
       {{"process", P::String, "x", "x, dual, interface or interface_dual"},
        {"n", P::Integer, 0, "ring size, 0 for the line"},
        {"x0", P::Config, nullptr, "initial configuration"},
        {"horizon", P::Number, 10.0, "final time"},
        {"interval", P::Number, 1.0, "time between snapshots"}}},
      {"interface-tightness",
       {{"burn_in", P::Number, 1000.0, "time discarded before sampling"},
        {"horizon", P::Number, 1e5, "sampling period after burn-in"},
        {"thin", P::Number, 1.0, "time between recorded samples"},
        {"cap", P::Integer, 512, "span at which the run aborts"},
        {"n_max", P::Integer, 10, "largest tail index"}}},
      {"harmonic", with_hat({{"x", P::ConfigList, nullptr, "configurations to evaluate h at"}})},
      {"martingale",
       with_hat({{"x0", P::Config, "11", "initial configuration of the dual"},
                 {"times", P::NumberList, json::array({1.0, 2.0, 5.0, 10.0, 20.0}), "recorded times"},
                 {"replicates", P::Integer, 2000, "independent runs"},
                 {"z_max", P::Number, 3.0, "largest accepted |z|"}})},
      {"clustering",
       {{"n", P::Integer, 256, "ring size"},
        {"p", P::Number, 0.5, "initial density"},
        {"times", P::NumberList, json::array({0.0, 1.0, 10.0, 100.0, 1000.0}), "recorded times"},
        {"replicates", P::Integer, 100, "independent runs"}}},
      {"survival",
       {{"process", P::String, "dual", "x or dual"},
        {"x0", P::Config, "1", "initial configuration"},
        {"horizon", P::Number, 100.0, "final time"},
        {"replicates", P::Integer, 1000, "independent runs"}}},
      {"p-estimate",
       with_hat({{"p", P::Number, 0.5, "density of the product initial law"},
                 {"draws", P::Integer, 1, "initial-law draws per interface sample"}})},
      {"alpha-scan",
       {{"alphas", P::NumberList, json::array({0.2, 0.35, 0.5, 0.65, 0.8, 1.0}), "alpha grid"},
        {"events", P::Integer, 100000, "events per replica"},
        {"replicas", P::Integer, 20, "replicas per alpha"},
        {"cap", P::Integer, 512, "span at which a replica aborts"}}},
  };
  return s;
}

const std::vector<ParamSpec> kModelParams{
    {"model", P::String, nullptr, "voter, rebellious, disagreement, neuhauser-pacala, affine or table"},
    {"alpha", P::Number, nullptr, "model parameter in [0, 1]"},
    {"range", P::Integer, 2, "interaction range R for neuhauser-pacala and affine"},
    {"table", P::Object, nullptr, "rate table for model = table"},
};

const std::map<std::string, std::string>& default_formats() {
  static const std::map<std::string, std::string> f{
      {"verify-algebra", "json"}, {"exact-dual", "json"},  {"simulate", "csv"},
      {"interface-tightness", "json"}, {"harmonic", "json"}, {"martingale", "csv"},
      {"clustering", "csv"},      {"survival", "json"},    {"p-estimate", "json"},
      {"alpha-scan", "csv"},
  };
  return f;
}

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
}

json check_type(const ParamSpec& p, const json& v) {
  auto fail = [&](const char* what) -> json {
    throw ValidationError("parameter '" + p.key + "' must be " + what + ", got " + v.dump());
  };
  switch (p.type) {
    case P::Number:
      if (!v.is_number()) return fail("a number");
      if (!std::isfinite(v.get<double>())) return fail("finite");
      return v.get<double>();
    case P::Integer:
      if (!is_integral(v)) return fail("an integer");
      return v.is_number_unsigned() ? json(v.get<std::uint64_t>()) : json(static_cast<std::int64_t>(v.get<double>()));
    case P::String:
      if (!v.is_string()) return fail("a string");
      return v;
    case P::Bool:
      if (!v.is_boolean()) return fail("a boolean");
      return v;
    case P::NumberList: {
      if (!v.is_array()) return fail("a list of numbers");
      json out = json::array();
      for (const auto& e : v) {
        if (!e.is_number()) return fail("a list of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    }
    case P::Config:
      if (!v.is_string() && !v.is_object()) return fail("a configuration literal");
      return v;
    case P::ConfigList:
      if (v.is_string() || v.is_object()) return json::array({v});
      if (!v.is_array()) return fail("a list of configuration literals");
      for (const auto& e : v)
        if (!e.is_string() && !e.is_object()) return fail("a list of configuration literals");
      return v;
    case P::Object:
      if (!v.is_object()) return fail("an object");
      return v;
  }
  return v;
}

bool needs_alpha(const std::string& kind) {
  return kind == "rebellious" || kind == "neuhauser-pacala" || kind == "affine";
}

std::int64_t doubled_coordinate(const json& v) {
  if (!is_integral(v)) throw ValidationError("shape coordinates are integers in doubled units, got " + v.dump());
  return static_cast<std::int64_t>(v.get<double>());
}

Parity parse_lattice(const json& v) {
  if (v == "Z") return Parity::Integer;
  if (v == "Z+1/2") return Parity::HalfInteger;
  throw ValidationError("lattice must be \"Z\" or \"Z+1/2\", got " + v.dump());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : schema()) n.push_back(k);
    return n;
  }();
  return names;
}

const std::vector<ParamSpec>& command_params(const std::string& command) {
  const auto it = schema().find(command);
  if (it == schema().end()) throw ValidationError("unknown command '" + command + "'");
  return it->second;
}

bool command_uses_model(const std::string& command) { return command != "verify-algebra"; }

json parse_flag_value(ParamType type, const std::string& text) {
  try {
    switch (type) {
      case P::Number:
        return std::stod(text);
      case P::Integer: {
        std::size_t used = 0;
        const double d = std::stod(text, &used);
        if (used != text.size() || d != std::floor(d)) throw std::invalid_argument(text);
        if (text.find_first_of(".eE") == std::string::npos) return std::stoll(text);
        return static_cast<std::int64_t>(d);
      }
      case P::String:
        return text;
      case P::Bool:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw std::invalid_argument(text);
      case P::NumberList: {
        if (!text.empty() && text.front() == '[') return json::parse(text);
        json out = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        return out;
      }
      case P::Config:
      case P::ConfigList:
      case P::Object:
        if (!text.empty() && (text.front() == '{' || text.front() == '[')) return json::parse(text);
        return text;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ValidationError("cannot parse value '" + text + "'");
  }
  return text;
}

json resolve_spec(const json& input) {
  if (!input.is_object()) throw ValidationError("a spec must be a JSON object");
  json spec = input;
  // A manifest is accepted in place of a spec.
  if (spec.contains("spec") && spec["spec"].is_object()) spec = spec["spec"];
  if (!spec.contains("command") || !spec["command"].is_string())
    throw ValidationError("spec is missing the \"command\" field");
  const std::string command = spec["command"];
  std::vector<ParamSpec> params = command_params(command);
  if (command_uses_model(command)) params.insert(params.end(), kModelParams.begin(), kModelParams.end());

  json out = json::object();
  out["command"] = command;
  if (spec.contains("seed")) {
    const json& s = spec["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ValidationError("seed must be a non-negative integer");
    out["seed"] = s.get<std::uint64_t>();
  }
  out["format"] = spec.value("format", default_formats().at(command));
  if (out["format"] != "csv" && out["format"] != "json") throw ValidationError("format must be csv or json");

  for (const auto& [key, value] : spec.items()) {
    if (key == "command" || key == "seed" || key == "format") continue;
    const auto it = std::find_if(params.begin(), params.end(), [&](const ParamSpec& p) { return p.key == key; });
    if (it == params.end()) throw ValidationError("unknown parameter '" + key + "' for " + command);
    if (value.is_null()) continue;
    out[key] = check_type(*it, value);
  }
  for (const auto& p : params)
    if (!out.contains(p.key) && !p.default_value.is_null()) out[p.key] = check_type(p, p.default_value);

  if (command_uses_model(command)) {
    if (!out.contains("model")) throw ValidationError("spec is missing the \"model\" field");
    const std::string kind = out["model"];
    static const std::vector<std::string> kinds{"voter", "rebellious", "disagreement",
                                                "neuhauser-pacala", "affine", "table"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
      throw ValidationError("unknown model '" + kind + "'");
    if (command == "alpha-scan") {
      if (!needs_alpha(kind)) throw ValidationError("alpha-scan needs rebellious, neuhauser-pacala or affine");
      out.erase("alpha");
      out.erase("table");
    } else {
      if (needs_alpha(kind) && !out.contains("alpha"))
        throw ValidationError("model '" + kind + "' requires \"alpha\"");
      if (!needs_alpha(kind)) out.erase("alpha");
      if (kind == "table" && !out.contains("table")) throw ValidationError("model 'table' requires \"table\"");
      if (kind != "table") out.erase("table");
    }
    if (kind != "neuhauser-pacala" && kind != "affine") out.erase("range");
    // Surface model errors before any work.
    if (command != "alpha-scan") build_model(out);
  }
  for (const char* key : {"n", "trials", "replicates", "operators", "configs", "events", "replicas", "draws"})
    if (out.contains(key) && out[key].get<std::int64_t>() < 0)
      throw ValidationError(std::string("parameter '") + key + "' must be non-negative");
  for (const char* key : {"horizon", "burn_in", "t", "eps"})
    if (out.contains(key) && out[key].get<double>() < 0.0)
      throw ValidationError(std::string("parameter '") + key + "' must be non-negative");
  for (const char* key : {"thin", "interval"})
    if (out.contains(key) && out[key].get<double>() <= 0.0)
      throw ValidationError(std::string("parameter '") + key + "' must be positive");
  return out;
}

std::shared_ptr<const mc::Dynamics> Model::x_dynamics() const {
  if (table) return mc::make_dynamics(*table);
  return mc::make_dynamics(*flips);
}

const RateTable& Model::require_table(const std::string& command) const {
  if (!table)
    throw ValidationError(command + " needs a cancellative model; '" + kind + "' has only flip rates");
  return *table;
}

Model build_model(const json& spec) {
  Model m;
  m.kind = spec.at("model").get<std::string>();
  const double alpha = spec.value("alpha", 1.0);
  if (m.kind == "voter") {
    m.table = voter_table();
  } else if (m.kind == "rebellious") {
    m.table = rebellious_table(alpha);
    m.flips = FlipRateModel::make(FlipModelKind::Rebellious, alpha);
  } else if (m.kind == "disagreement") {
    m.table = disagreement_table();
  } else if (m.kind == "neuhauser-pacala") {
    m.flips = FlipRateModel::make(FlipModelKind::NeuhauserPacala, alpha, spec.value("range", 2));
  } else if (m.kind == "affine") {
    m.flips = FlipRateModel::make(FlipModelKind::Affine, alpha, spec.value("range", 2));
  } else if (m.kind == "table") {
    m.table = parse_table(spec.at("table"));
  } else {
    throw ValidationError("unknown model '" + m.kind + "'");
  }
  return m;
}

RateTable parse_table(const json& j) {
  if (!j.is_object()) throw ValidationError("table must be an object");
  const Parity lattice = parse_lattice(j.value("lattice", json("Z")));
  if (!j.contains("range") || !is_integral(j["range"])) throw ValidationError("table needs an integer \"range\"");
  if (!j.contains("entries") || !j["entries"].is_array()) throw ValidationError("table needs an \"entries\" list");
  std::vector<RateEntry> entries;
  for (const auto& e : j["entries"]) {
    if (!e.is_object() || !e.contains("shape") || !e.contains("rate") || !e["shape"].is_array() ||
        !e["rate"].is_number())
      throw ValidationError("table entries need \"shape\" and \"rate\"");
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    for (const auto& pr : e["shape"]) {
      if (!pr.is_array() || pr.size() != 2) throw ValidationError("shape entries are [row, col] pairs");
      pairs.emplace_back(doubled_coordinate(pr[0]), doubled_coordinate(pr[1]));
    }
    LocalOp shape = LocalOp::from_doubled(pairs, lattice);
    entries.push_back({std::move(shape), e["rate"].get<double>()});
  }
  return RateTable(lattice, static_cast<std::int64_t>(j["range"].get<double>()), std::move(entries));
}

Config parse_config(const json& j, LatticeTag lattice) {
  if (j.is_string()) return Config::from_bits(lattice, 0, j.get<std::string>());
  if (!j.is_object()) throw ValidationError("configuration literal must be a string or an object");
  if (j.contains("lattice") && parse_lattice(j["lattice"]) != lattice.parity)
    throw ValidationError("configuration literal is on " + j["lattice"].dump() + " but " +
                          lattice.to_string() + " is required");
  auto bit = [&](const char* key) {
    if (!j.contains(key)) return false;
    const json& v = j[key];
    if (v.is_boolean()) return v.get<bool>();
    if (v == 0 || v == 1) return v == 1;
    throw ValidationError(std::string("\"") + key + "\" must be 0 or 1");
  };
  if (!j.contains("bits") || !j["bits"].is_string()) throw ValidationError("configuration literal needs \"bits\"");
  const json offset = j.value("offset", json(0));
  if (!is_integral(offset)) throw ValidationError("\"offset\" must be an integer");
  if (lattice.is_ring() && (bit("left") || bit("right")))
    throw ValidationError("ring configurations have no boundary constants");
  return Config::from_bits(lattice, static_cast<std::int64_t>(offset.get<double>()), j["bits"].get<std::string>(),
                           bit("left"), bit("right"));
}

json config_to_json(const Config& x) {
  json j;
  j["lattice"] = x.parity() == Parity::Integer ? "Z" : "Z+1/2";
  j["offset"] = x.bits().first();
  j["bits"] = x.bits().window_string();
  j["left"] = x.left_boundary() ? 1 : 0;
  j["right"] = x.right_boundary() ? 1 : 0;
  return j;
}

}  // namespace canlab::app
