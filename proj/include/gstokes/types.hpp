#pragma once

#include <cstdint>

namespace gstokes {

using index_t = std::int64_t;

} // namespace gstokes
