#include "tqa/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <httplib.h>

#include "tqa/error.hpp"

namespace tqa::llm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Descriptor:
      return "descriptor";
    case Stage::Selector:
      return "selector";
    case Stage::Explainer:
      return "explainer";
    case Stage::Coder:
      return "coder";
    case Stage::Interpreter:
      return "interpreter";
  }
  return "descriptor";
}

Stage parse_stage(std::string_view name) {
  for (auto s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  throw LlmError("unknown stage '" + std::string(name) + "'");
}

namespace {

std::optional<Role> parse_role(std::string_view name) {
  for (auto r : {Role::System, Role::User, Role::Assistant}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

// Re-reads a serialized body and checks it against the request contract.
void validate_wire(const nlohmann::json& body) {
  if (!body.is_object()) throw LlmError("request body is not an object");
  if (!body.contains("model") || !body["model"].is_string() || body["model"].get<std::string>().empty()) {
    throw LlmError("request body has no model");
  }
  const auto& msgs = body.value("messages", nlohmann::json::array());
  if (!msgs.is_array() || msgs.empty()) throw LlmError("request body has no messages");
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const auto& m = msgs[i];
    if (!m.is_object() || !m.contains("role") || !m.contains("content") || !m["role"].is_string() ||
        !m["content"].is_string() || !parse_role(m["role"].get<std::string>())) {
      throw LlmError("malformed message at index " + std::to_string(i));
    }
    if (i == 0 && m["role"] == "assistant") throw LlmError("first message must be system or user");
  }
  if (!body["temperature"].is_number() || body["temperature"].get<double>() < 0) {
    throw LlmError("temperature must be a non-negative number");
  }
  if (!body["max_tokens"].is_number_integer() || body["max_tokens"].get<int>() <= 0) {
    throw LlmError("max_tokens must be a positive integer");
  }
}

}  // namespace

void validate(const ChatRequest& req) {
  if (req.messages.empty()) throw LlmError("chat request has no messages");
  if (req.messages.front().role == Role::Assistant) {
    throw LlmError("first message must be system or user");
  }
  if (req.temperature < 0) throw LlmError("temperature must be >= 0");
  if (req.max_tokens <= 0) throw LlmError("max_tokens must be > 0");
  if (req.model.empty()) throw LlmError("chat request has no model");
}

nlohmann::json to_wire(const ChatRequest& req) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : req.messages) {
    msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return {{"model", req.model},
          {"messages", std::move(msgs)},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"stream", false}};
}

std::string content_from_wire(const nlohmann::json& response) {
  if (!response.is_object() || !response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    throw LlmError("response has no choices");
  }
  const auto& choice = response["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string()) {
    throw LlmError("response choice has no message content");
  }
  return choice["message"]["content"].get<std::string>();
}

std::string route_model(Stage stage, const ModelRouting& routing) {
  switch (stage) {
    case Stage::Coder:
      return routing.coder;
    case Stage::Explainer:
      return routing.explainer_override.value_or(routing.general);
    default:
      return routing.general;
  }
}

std::string route_model(std::string_view stage, const ModelRouting& routing) {
  return route_model(parse_stage(stage), routing);
}

// --- HTTP ------------------------------------------------------------------

HttpBackend::HttpBackend(LlmConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleep_(std::move(sleeper)) {
  if (!sleep_) {
    sleep_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
  const auto& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw ConfigError("base_url must look like http(s)://host[:port][/path], got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  host_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpBackend::complete(const ChatRequest& req) {
  validate(req);
  const auto body = to_wire(req);
  const auto payload = body.dump();
  validate_wire(nlohmann::json::parse(payload));

  httplib::Client client(host_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const auto path = path_prefix_ + "/chat/completions";

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      sleep_(std::chrono::duration<double>(config_.retry_base_seconds * (1 << (attempt - 1))));
    }
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 400 && res->status < 500 && res->status != 429) {
      throw LlmError("HTTP " + std::to_string(res->status) + ": " + res->body, res->status);
    }
    if (res->status >= 400) {
      last_error = "HTTP " + std::to_string(res->status);
      last_status = res->status;
      continue;
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw LlmError(std::string("malformed response body: ") + e.what(), res->status);
    }
    return content_from_wire(parsed);
  }
  throw LlmError("giving up after " + std::to_string(config_.retries + 1) +
                 " attempts: " + last_error, last_status);
}

// --- Mock --------------------------------------------------------------------

MockScript MockScript::from_json(const nlohmann::json& j) {
  const auto& list = j.is_object() ? j.at("entries") : j;
  if (!list.is_array()) throw LlmError("mock script must be an array or {\"entries\": [...]}");
  MockScript script;
  for (const auto& e : list) {
    MockEntry entry;
    if (e.contains("stage") && !e["stage"].is_null() && e["stage"] != "*") {
      entry.stage = parse_stage(e["stage"].get<std::string>());
    }
    entry.match = e.value("match", "");
    entry.regex = e.value("regex", false);
    entry.reply = e.at("reply").get<std::string>();
    entry.once = e.value("once", false);
    script.entries.push_back(std::move(entry));
  }
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LlmError("cannot read mock script '" + path.string() + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw LlmError("invalid mock script '" + path.string() + "': " + e.what());
  }
}

MockBackend::MockBackend(MockScript script)
    : script_(std::move(script)), consumed_(script_.entries.size(), false) {}

std::string MockBackend::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  calls_.push_back(req);
  std::string last_user;
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
    if (it->role == Role::User) {
      last_user = it->content;
      break;
    }
  }
  for (std::size_t i = 0; i < script_.entries.size(); ++i) {
    const auto& e = script_.entries[i];
    if (consumed_[i] || (e.stage && *e.stage != req.stage)) continue;
    const bool hit = e.regex ? std::regex_search(last_user, std::regex(e.match))
                             : last_user.find(e.match) != std::string::npos;
    if (!hit) continue;
    if (e.once) consumed_[i] = true;
    return e.reply;
  }
  throw LlmError("unscripted request for stage '" + std::string(to_string(req.stage)) + "'");
}

std::vector<ChatRequest> MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t MockBackend::call_count(Stage stage) const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& c : calls_) n += c.stage == stage ? 1 : 0;
  return n;
}

// --- Client ------------------------------------------------------------------

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, LlmConfig config)
    : backend_(std::move(backend)),
      config_(std::move(config)),
      slots_(std::max(1, config_.concurrency)) {}

std::string LlmClient::complete(Stage stage, std::vector<Message> messages) {
  ChatRequest req;
  req.messages = std::move(messages);
  req.temperature = config_.temperature;
  req.max_tokens = config_.max_tokens;
  req.model = route_model(stage, config_.model);
  req.stage = stage;
  validate(req);
  counts_[static_cast<std::size_t>(stage)].fetch_add(1);
  slots_.acquire();
  try {
    auto reply = backend_->complete(req);
    slots_.release();
    return reply;
  } catch (...) {
    slots_.release();
    throw;
  }
}

std::string LlmClient::complete(Stage stage, std::string system, std::string user) {
  std::vector<Message> msgs;
  if (!system.empty()) msgs.push_back({Role::System, std::move(system)});
  msgs.push_back({Role::User, std::move(user)});
  return complete(stage, std::move(msgs));
}

std::size_t LlmClient::calls(Stage stage) const {
  return counts_[static_cast<std::size_t>(stage)].load();
}

}  // namespace tqa::llm
