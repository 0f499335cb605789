#include "hmem/backend/backend.hpp"

#include "hmem/backend/deterministic.hpp"
#include "hmem/backend/remote.hpp"

namespace hmem {

std::unique_ptr<ExtractionBackend> make_backend(const BackendConfig& config) {
  if (config.provider == BackendConfig::Provider::remote) {
    std::string dir = config.prompt_dir.empty() ? bundled_prompt_dir() : config.prompt_dir;
    return std::make_unique<RemoteBackend>(config, PromptSet::load(dir));
  }
  return std::make_unique<DeterministicBackend>(config.seed, config.dim, config.summary_max_chars);
}

}  // namespace hmem
