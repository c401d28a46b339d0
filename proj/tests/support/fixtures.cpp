#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

namespace fixtures {

namespace fs = std::filesystem;

fs::path dir() { return TABQA_FIXTURES_DIR; }

fs::path path(const std::string& relative) { return dir() / relative; }

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("tabqa-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Mock mock(const nlohmann::json& script) {
  Mock m;
  m.backend = std::make_shared<tqa::llm::MockBackend>(tqa::llm::MockScript::from_json(script));
  tqa::llm::LlmConfig cfg;
  cfg.temperature = 0.0;
  m.client = std::make_unique<tqa::llm::LlmClient>(m.backend, cfg);
  return m;
}

tqa::Table survey() { return tqa::load_csv(path("tables/encuesta.csv")); }

}  // namespace fixtures
