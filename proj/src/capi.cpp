#include "evrisk.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <functional>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "core/commands.hpp"
#include "core/config.hpp"

// The opaque handle keeps the config as schema-validated JSON so overrides
// can land before the strict semantic validation each command performs.
struct evrisk_config {
  nlohmann::json doc;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

evrisk_status fail(evrisk_status status, const char* message) {
  t_last_error = message;
  return status;
}

// Map exceptions to statuses: caller mistakes are validation errors, the
// rest (missing files, I/O, internal faults) are runtime errors.
evrisk_status run(const std::function<void()>& body) {
  try {
    body();
    t_last_error.clear();
    return EVRISK_OK;
  } catch (const std::invalid_argument& e) {
    return fail(EVRISK_ERR_VALIDATION, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EVRISK_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(EVRISK_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(EVRISK_ERR_RUNTIME, "unknown error");
  }
}

evrisk_status run_command(
    const evrisk_config* cfg, char** summary_out,
    evrisk::commands::CommandResult (*command)(const evrisk::config::RunConfig&)) {
  if (cfg == nullptr) return fail(EVRISK_ERR_VALIDATION, "config handle is null");
  return run([&] {
    auto resolved = evrisk::config::config_from_json(cfg->doc);
    auto result = command(resolved);
    if (summary_out != nullptr) *summary_out = dup_string(result.summary);
  });
}

}  // namespace

extern "C" {

const char* evrisk_version(void) { return evrisk::config::kVersion; }

const char* evrisk_last_error(void) { return t_last_error.c_str(); }

evrisk_status evrisk_config_create(const char* json_path, evrisk_config** out) {
  if (out == nullptr) return fail(EVRISK_ERR_VALIDATION, "output handle pointer is null");
  *out = nullptr;
  return run([&] {
    std::optional<std::string> path;
    if (json_path != nullptr) path = json_path;
    // load_config parses, merges, applies schema checks, and validates.
    auto cfg = evrisk::config::load_config(path);
    *out = new evrisk_config{evrisk::config::to_json(cfg)};
  });
}

evrisk_status evrisk_config_set(evrisk_config* cfg, const char* dotted_key, const char* value) {
  if (cfg == nullptr) return fail(EVRISK_ERR_VALIDATION, "config handle is null");
  if (dotted_key == nullptr || value == nullptr) {
    return fail(EVRISK_ERR_VALIDATION, "override key and value must not be null");
  }
  return run([&] { evrisk::config::apply_override(cfg->doc, dotted_key, value); });
}

evrisk_status evrisk_config_render(const evrisk_config* cfg, char** json_out) {
  if (cfg == nullptr) return fail(EVRISK_ERR_VALIDATION, "config handle is null");
  if (json_out == nullptr) return fail(EVRISK_ERR_VALIDATION, "output pointer is null");
  return run([&] {
    auto resolved = evrisk::config::config_from_json(cfg->doc);
    *json_out = dup_string(evrisk::config::render_config(resolved));
  });
}

void evrisk_config_free(evrisk_config* cfg) { delete cfg; }

evrisk_status evrisk_cmd_gen(const evrisk_config* cfg, char** summary_out) {
  return run_command(cfg, summary_out, evrisk::commands::cmd_gen);
}

evrisk_status evrisk_cmd_train_score(const evrisk_config* cfg, char** summary_out) {
  return run_command(cfg, summary_out, evrisk::commands::cmd_train_score);
}

evrisk_status evrisk_cmd_compare(const evrisk_config* cfg, char** summary_out) {
  return run_command(cfg, summary_out, evrisk::commands::cmd_compare);
}

evrisk_status evrisk_cmd_risk_histogram(const evrisk_config* cfg, char** summary_out) {
  return run_command(cfg, summary_out, evrisk::commands::cmd_risk_histogram);
}

evrisk_status evrisk_cmd_metrics(const evrisk_config* cfg, char** summary_out) {
  return run_command(cfg, summary_out, evrisk::commands::cmd_metrics);
}

void evrisk_string_free(char* s) { std::free(s); }

}  // extern "C"
