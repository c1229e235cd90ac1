#ifndef CMPOS_SENTINELS_HPP
#define CMPOS_SENTINELS_HPP

#include <string_view>

namespace cmpos {

// Boundary values standing in for out-of-range context positions.
inline constexpr std::string_view kBos = "⟨S⟩";   // before sentence start
inline constexpr std::string_view kEos = "⟨/S⟩";  // past sentence end

}  // namespace cmpos

#endif  // CMPOS_SENTINELS_HPP
