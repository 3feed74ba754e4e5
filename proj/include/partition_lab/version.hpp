#pragma once

#include <string>

#ifndef PARTITION_LAB_VERSION
#define PARTITION_LAB_VERSION "0.0.0-dev"
#endif

namespace partition_lab {

/// Revision of the verification defaults table; bumped whenever a default
/// parameter or threshold changes.
inline constexpr int defaults_version = 2;

/// Build identifier embedded in every report.
inline std::string build_id()
{
    return std::string("partition_lab ") + PARTITION_LAB_VERSION + " (defaults v" + std::to_string(defaults_version) + ")";
}

}  // namespace partition_lab
