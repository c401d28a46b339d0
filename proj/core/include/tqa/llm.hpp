#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tqa::llm {

enum class Role { System, User, Assistant };
enum class Stage { Descriptor, Selector, Explainer, Coder, Interpreter };

inline constexpr std::array kAllStages = {Stage::Descriptor, Stage::Selector, Stage::Explainer,
                                          Stage::Coder, Stage::Interpreter};

std::string_view to_string(Role role);
std::string_view to_string(Stage stage);
/// Throws LlmError for unknown names.
Stage parse_stage(std::string_view name);

struct Message {
  Role role = Role::User;
  std::string content;
};

struct ChatRequest {
  std::vector<Message> messages;
  double temperature = 0.7;
  int max_tokens = 2048;
  std::string model;
  Stage stage = Stage::Descriptor;
};

/// Throws LlmError when the request breaks its invariants (no messages,
/// first role assistant, negative temperature, empty model, ...).
void validate(const ChatRequest& req);

/// OpenAI-compatible chat-completions request body.
nlohmann::json to_wire(const ChatRequest& req);
/// Content of the first choice of a chat-completions response.
std::string content_from_wire(const nlohmann::json& response);

struct ModelRouting {
  std::string general = "Qwen/Qwen2.5-14B-Instruct";
  std::string coder = "Qwen/Qwen2.5-Coder-14B-Instruct";
  std::optional<std::string> explainer_override;
};

struct LlmConfig {
  std::string base_url;
  /// Name of the environment variable holding the API key.
  std::string api_key_env = "OPENAI_API_KEY";
  ModelRouting model;
  double temperature = 0.7;
  int max_tokens = 2048;
  int concurrency = 4;
  int retries = 3;
  double retry_base_seconds = 1.0;
  double timeout_seconds = 300.0;
};

std::string route_model(Stage stage, const ModelRouting& routing);
/// String-keyed variant used by configuration code; unknown names throw.
std::string route_model(std::string_view stage, const ModelRouting& routing);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
};

/// Posts to `<base_url>/chat/completions`. Transport failures, 429 and 5xx
/// are retried with exponential backoff; other 4xx fail immediately.
class HttpBackend final : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  explicit HttpBackend(LlmConfig config, Sleeper sleeper = {});
  std::string complete(const ChatRequest& req) override;

 private:
  LlmConfig config_;
  Sleeper sleep_;
  std::string host_;
  std::string path_prefix_;
  std::string api_key_;
};

struct MockEntry {
  /// Empty means any stage.
  std::optional<Stage> stage;
  std::string match;
  bool regex = false;
  std::string reply;
  bool once = false;
};

struct MockScript {
  std::vector<MockEntry> entries;

  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
};

/// Deterministic scripted backend. The first entry whose stage matches and
/// whose pattern occurs in the last user message wins; `once` entries are
/// consumed. Unmatched requests throw LlmError("unscripted request ...").
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockScript script);
  std::string complete(const ChatRequest& req) override;

  std::vector<ChatRequest> calls() const;
  std::size_t call_count(Stage stage) const;

 private:
  mutable std::mutex mu_;
  MockScript script_;
  std::vector<bool> consumed_;
  std::vector<ChatRequest> calls_;
};

/// Stage-aware front end shared by every pipeline module: routes models,
/// applies sampling defaults and caps in-flight requests.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<ChatBackend> backend, LlmConfig config);

  std::string complete(Stage stage, std::vector<Message> messages);
  std::string complete(Stage stage, std::string system, std::string user);

  const LlmConfig& config() const { return config_; }
  std::size_t calls(Stage stage) const;

 private:
  std::shared_ptr<ChatBackend> backend_;
  LlmConfig config_;
  std::counting_semaphore<> slots_;
  std::array<std::atomic<std::size_t>, kAllStages.size()> counts_{};
};

}  // namespace tqa::llm
