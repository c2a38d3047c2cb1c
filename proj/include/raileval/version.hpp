#pragma once

namespace raileval {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "1.0";
inline constexpr const char* kInputSchemaVersion = "1.0";

} // namespace raileval
