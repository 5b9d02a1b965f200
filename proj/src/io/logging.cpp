#include "pilotmesh/io/logging.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace pilotmesh::io {

std::optional<spdlog::level::level_enum> parse_log_level(const std::string& name) {
  using spdlog::level::level_enum;
  if (name == "trace") return level_enum::trace;
  if (name == "debug") return level_enum::debug;
  if (name == "info") return level_enum::info;
  if (name == "warn" || name == "warning") return level_enum::warn;
  if (name == "error") return level_enum::err;
  if (name == "critical") return level_enum::critical;
  if (name == "off") return level_enum::off;
  return std::nullopt;
}

void init_logging() {
  auto logger = spdlog::stderr_color_mt("pilotmesh");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PILOTMESH_LOG")) {
    if (auto lvl = parse_log_level(env)) {
      spdlog::set_level(*lvl);
    } else {
      spdlog::warn("PILOTMESH_LOG={} is not a log level; using warn", env);
    }
  }
}

}  // namespace pilotmesh::io
