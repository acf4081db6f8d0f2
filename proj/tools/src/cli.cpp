#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "canlab/app.hpp"
#include "canlab/error.hpp"
#include "commands.hpp"
#include "spec.hpp"

#ifndef CANLAB_VERSION
#define CANLAB_VERSION "unknown"
#endif

namespace canlab::app {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 1;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_number() || v.is_boolean()) return v.dump();
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render(const json& spec, std::uint64_t seed, const CommandResult& r) {
  const std::string format = spec.at("format");
  if (format == "json") {
    json doc{{"tool", "cancellative_lab"}, {"version", CANLAB_VERSION}, {"seed", seed},
             {"spec", spec},               {"result", r.report},        {"exit_code", r.exit_code}};
    if (r.table) doc["table"] = {{"columns", r.table->columns}, {"rows", r.table->rows}};
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "# cancellative_lab " << CANLAB_VERSION << "\n# seed: " << seed << "\n# spec: " << spec.dump() << "\n";
  if (r.table) {
    for (std::size_t k = 0; k < r.table->columns.size(); ++k) os << (k ? "," : "") << r.table->columns[k];
    os << "\n";
    for (const auto& row : r.table->rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
      os << "\n";
    }
  } else {
    os << "key,value\n";
    for (const auto& [k, v] : r.report.items()) os << k << "," << csv_cell(v) << "\n";
  }
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw ValidationError("cannot write " + path.string());
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

// Every parameter key any command accepts, with its type.
std::map<std::string, ParamType> all_params() {
  std::map<std::string, ParamType> keys;
  for (const auto& c : command_names())
    for (const auto& p : command_params(c)) keys.emplace(p.key, p.type);
  keys.emplace("model", ParamType::String);
  keys.emplace("alpha", ParamType::Number);
  keys.emplace("range", ParamType::Integer);
  keys.emplace("table", ParamType::Object);
  return keys;
}

json load_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read spec file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError("spec file " + path + " is not valid JSON: " + e.what());
  }
}

struct Invocation {
  std::string command;  // subcommand name or "run"
  std::string run_command;
  std::string spec_file;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string out_dir = "results";
  std::string format;
  std::map<std::string, std::string> values;  // key -> raw flag text
  std::map<std::string, bool> switches;       // bool flags given on the line
};

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  const auto types = all_params();
  json spec = json::object();
  if (!inv.spec_file.empty()) {
    spec = load_spec_file(inv.spec_file);
    if (!spec.is_object()) throw ValidationError("a spec must be a JSON object");
    if (spec.contains("spec") && spec["spec"].is_object()) spec = spec["spec"];
  }
  std::string command = inv.command == "run" ? inv.run_command : inv.command;
  if (command.empty()) {
    if (!spec.contains("command")) throw ValidationError("run needs --command or a spec with \"command\"");
    command = spec["command"];
  }
  if (spec.contains("command") && spec["command"] != command && inv.command != "run")
    throw ValidationError("spec file is for " + spec["command"].dump() + ", not " + command);
  spec["command"] = command;
  for (const auto& [key, text] : inv.values) spec[key] = parse_flag_value(types.at(key), text);
  for (const auto& [key, on] : inv.switches) spec[key] = on;
  if (!inv.format.empty()) spec["format"] = inv.format;

  std::uint64_t seed = kDefaultSeed;
  if (inv.seed) {
    seed = *inv.seed;
  } else if (spec.contains("seed")) {
    if (!spec["seed"].is_number_unsigned() && !(spec["seed"].is_number_integer() && spec["seed"] >= 0))
      throw ValidationError("seed must be a non-negative integer");
    seed = spec["seed"].get<std::uint64_t>();
  } else if (const char* env = std::getenv("CANCELLATIVE_LAB_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ValidationError("CANCELLATIVE_LAB_SEED must be an unsigned integer");
    seed = v;
  }
  spec["seed"] = seed;
  const json resolved = resolve_spec(spec);

  const fs::path dir(inv.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());
  const std::string file = command + "." + resolved.at("format").get<std::string>();
  // Probe writability before any work.
  write_file(dir / file, "");

  const auto start = std::chrono::steady_clock::now();
  const CommandResult result = execute(resolved, seed, inv.jobs);
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const std::string content = render(resolved, seed, result);
  write_file(dir / file, content);
  json manifest{{"tool", "cancellative_lab"},
                {"version", CANLAB_VERSION},
                {"seed", seed},
                {"spec", resolved},
                {"exit_code", result.exit_code},
                {"outputs", json::array({{{"file", file}, {"sha256", sha256_hex(content)}}})}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  static const std::map<int, std::string> status{{kSuccess, "ok"},
                                                 {kVerificationFailure, "verification failure"},
                                                 {kInconclusive, "inconclusive"}};
  out << command << ": " << status.at(result.exit_code) << " (seed " << seed << ", runtime_ms "
      << static_cast<long long>(ms) << ")\n";
  out << "wrote " << (dir / file).string() << " and " << (dir / "manifest.json").string() << "\n";
  return result.exit_code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cancellative interacting particle systems in one dimension", "cancellative_lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CANLAB_VERSION));
  Invocation inv;
  const auto types = all_params();
  std::map<std::string, std::string> raw;
  std::map<std::string, bool> flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", inv.spec_file, "JSON spec file or manifest");
    sub->add_option("--seed", inv.seed, "master seed (falls back to CANCELLATIVE_LAB_SEED)");
    sub->add_option("--jobs", inv.jobs, "worker threads, 0 for all cores");
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", inv.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_param = [&](CLI::App* sub, const std::string& key, ParamType type, const std::string& help) {
    if (type == ParamType::Bool)
      sub->add_flag_function(flag_name(key), [&flags, key](std::int64_t) { flags[key] = true; }, help);
    else
      sub->add_option_function<std::string>(flag_name(key), [&raw, key](const std::string& v) { raw[key] = v; },
                                            help);
  };
  auto add_model = [&](CLI::App* sub) {
    add_param(sub, "model", ParamType::String, "model kind");
    add_param(sub, "alpha", ParamType::Number, "model parameter");
    add_param(sub, "range", ParamType::Integer, "interaction range");
    add_param(sub, "table", ParamType::Object, "rate table as JSON");
  };

  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    add_common(sub);
    for (const auto& p : command_params(name)) add_param(sub, p.key, p.type, p.help);
    if (command_uses_model(name)) add_model(sub);
    sub->callback([&inv, name] { inv.command = name; });
  }
  CLI::App* run = app.add_subcommand("run", "run any pipeline selected by --command or the spec");
  add_common(run);
  run->add_option("--command", inv.run_command, "pipeline to run");
  for (const auto& [key, type] : types)
    if (key != "model" && key != "alpha" && key != "range" && key != "table") add_param(run, key, type, key);
  add_model(run);
  run->callback([&inv] { inv.command = "run"; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }
  inv.values = raw;
  inv.switches = flags;
  try {
    return dispatch(inv, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const LatticeMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const BoundaryClassError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::logic_error& e) {
    err << "verification failure: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace canlab::app
