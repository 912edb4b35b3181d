#pragma once

#include <string>

#include "frsf/field.hpp"

namespace frsf {

/// Binary field format: magic "FRSF", u32 version, u32 dim, u32 M,
/// f64 half_length, then M^dim little-endian f64 values, row-major.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

}  // namespace frsf
