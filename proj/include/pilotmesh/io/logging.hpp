#pragma once

#include <optional>
#include <string>

#include <spdlog/common.h>

namespace pilotmesh::io {

/// trace, debug, info, warn, error, critical or off; nullopt for anything else.
std::optional<spdlog::level::level_enum> parse_log_level(const std::string& name);

/// Sends logs to stderr at the level named by PILOTMESH_LOG (default warn).
void init_logging();

}  // namespace pilotmesh::io
