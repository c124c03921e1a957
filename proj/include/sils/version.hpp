#pragma once

namespace sils {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kResultSchema = "sils-result-v1";
inline constexpr const char* kRatesSchema = "sils-rates-v1";

}  // namespace sils
