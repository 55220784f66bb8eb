#pragma once

namespace spinres {

inline constexpr const char* version = "0.1.0";

}
