#pragma once

namespace ddecert {

inline constexpr const char kVersion[] = "0.1.0";

}  // namespace ddecert
