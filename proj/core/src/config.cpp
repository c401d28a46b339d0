#include "tqa/config.hpp"

#include <fstream>
#include <set>

#include "tqa/error.hpp"

namespace tqa {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where = "") {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) +
                      "' has the wrong type");
  }
}

std::string api_key_env(const std::string& ref) {
  if (ref.rfind("env:", 0) == 0) return ref.substr(4);
  if (ref.rfind("$", 0) == 0) return ref.substr(1);
  throw ConfigError("api_key must reference an environment variable (\"env:NAME\" or \"$NAME\")");
}

}  // namespace

AppConfig config_from_json(const json& j) {
  check_keys(j, "",
             {"base_url", "api_key", "model", "temperature", "max_tokens", "concurrency", "retries",
              "retry_base_seconds", "timeout_seconds", "cache_dir", "use_interpreter", "selector", "fuzzy",
              "profiler", "explainer", "coder", "flatten_delimiters", "ensemble", "compare"});
  AppConfig c;
  auto& l = c.llm;
  auto& p = c.pipeline;
  read(j, "base_url", l.base_url);
  if (j.contains("api_key")) {
    std::string ref;
    read(j, "api_key", ref);
    l.api_key_env = api_key_env(ref);
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, "model", {"general", "coder", "explainer_override"});
    read(m, "general", l.model.general, "model");
    read(m, "coder", l.model.coder, "model");
    if (m.contains("explainer_override") && !m["explainer_override"].is_null()) {
      std::string s;
      read(m, "explainer_override", s, "model");
      l.model.explainer_override = s;
    }
  }
  read(j, "temperature", l.temperature);
  read(j, "max_tokens", l.max_tokens);
  read(j, "concurrency", l.concurrency);
  read(j, "retries", l.retries);
  read(j, "retry_base_seconds", l.retry_base_seconds);
  read(j, "timeout_seconds", l.timeout_seconds);
  p.concurrency = l.concurrency;
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    std::string s;
    read(j, "cache_dir", s);
    c.cache_dir = s;
  }
  read(j, "use_interpreter", p.use_interpreter);
  if (j.contains("selector")) {
    const auto& s = j["selector"];
    check_keys(s, "selector", {"enabled", "chunk_size", "denylist_patterns", "suffix_family_min", "max_parse_retries"});
    read(s, "enabled", p.select_columns, "selector");
    read(s, "chunk_size", p.selector.chunk_size, "selector");
    read(s, "denylist_patterns", p.selector.denylist_patterns, "selector");
    read(s, "suffix_family_min", p.selector.suffix_family_min, "selector");
    read(s, "max_parse_retries", p.selector.max_parse_retries, "selector");
  }
  if (j.contains("fuzzy")) {
    const auto& f = j["fuzzy"];
    check_keys(f, "fuzzy", {"match_threshold", "filter_threshold"});
    read(f, "match_threshold", p.fuzzy.match_threshold, "fuzzy");
    read(f, "filter_threshold", p.fuzzy.filter_threshold, "fuzzy");
  }
  if (j.contains("profiler")) {
    const auto& f = j["profiler"];
    check_keys(f, "profiler", {"example_count", "batch_size"});
    read(f, "example_count", p.profile.example_count, "profiler");
    read(f, "batch_size", p.profile.batch_size, "profiler");
  }
  if (j.contains("explainer")) {
    check_keys(j["explainer"], "explainer", {"max_attempts"});
    read(j["explainer"], "max_attempts", p.explainer_attempts, "explainer");
  }
  if (j.contains("coder")) {
    check_keys(j["coder"], "coder", {"max_attempts"});
    read(j["coder"], "max_attempts", p.solve.max_attempts, "coder");
  }
  read(j, "flatten_delimiters", p.solve.fns.flatten_delimiters);
  if (j.contains("ensemble")) {
    const auto& e = j["ensemble"];
    check_keys(e, "ensemble", {"repetitions", "sentinel_messages"});
    read(e, "repetitions", p.ensemble.repetitions, "ensemble");
    read(e, "sentinel_messages", p.ensemble.sentinel_messages, "ensemble");
  }
  if (j.contains("compare")) {
    const auto& e = j["compare"];
    check_keys(e, "compare", {"abs_tol", "rel_tol", "ordered_lists"});
    read(e, "abs_tol", p.compare.abs_tol, "compare");
    read(e, "rel_tol", p.compare.rel_tol, "compare");
    read(e, "ordered_lists", p.compare.ordered_lists, "compare");
  }
  if (l.max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (l.concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (l.retries < 0) throw ConfigError("retries must be >= 0");
  if (l.temperature < 0) throw ConfigError("temperature must be >= 0");
  pipeline::validate(p);
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void make_deterministic(AppConfig& cfg) {
  cfg.llm.temperature = 0.0;
  cfg.pipeline.concurrency = 1;
}

}  // namespace tqa
