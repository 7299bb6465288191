#pragma once

namespace koop {

inline const char* version() { return "0.1.0"; }

} // namespace koop
