#pragma once

#include <string>

namespace lifespan {

// Shortest round-trippable decimal form; output files are reproducible
// bit-for-bit for identical inputs.
std::string format_double(double v);

// Write-temp-then-rename so concurrent readers never see a partial file.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace lifespan
