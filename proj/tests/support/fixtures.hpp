#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "tqa/llm.hpp"
#include "tqa/table.hpp"

namespace fixtures {

std::filesystem::path dir();
std::filesystem::path path(const std::string& relative);
std::string read(const std::filesystem::path& p);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Mock {
  std::shared_ptr<tqa::llm::MockBackend> backend;
  std::unique_ptr<tqa::llm::LlmClient> client;
};

/// Scripted client at temperature 0; `script` is an entries array or
/// {"entries": [...]}.
Mock mock(const nlohmann::json& script);

/// The survey fixture (tables/encuesta.csv).
tqa::Table survey();

}  // namespace fixtures
