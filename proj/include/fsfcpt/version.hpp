#pragma once

#define FSFCPT_VERSION_MAJOR 1
#define FSFCPT_VERSION_MINOR 0
#define FSFCPT_VERSION_PATCH 0
#define FSFCPT_VERSION_STRING "1.0.0"

namespace fsfcpt {
inline constexpr const char* version() { return FSFCPT_VERSION_STRING; }
}
