#pragma once

#define TAILCAL_VERSION "0.1.0"

namespace tailcal {
inline const char* version() { return TAILCAL_VERSION; }
}
