#pragma once

#include <string_view>

namespace emm {

inline constexpr std::string_view version = "0.1.0";

}
