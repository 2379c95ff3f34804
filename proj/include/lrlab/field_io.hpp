#pragma once

#include <filesystem>
#include <vector>

#include "lrlab/field.hpp"

namespace lrlab::io {

/// Writes `<stem>.bin` (little-endian f64, components back to back, row-major (t, x...))
/// and `<stem>.json` (grid header).
void write_fields(const std::filesystem::path& stem, const std::vector<ScalarField>& comps);
void write_fields(const std::filesystem::path& stem, const std::vector<ComplexField>& comps);

std::vector<ScalarField> read_real_fields(const std::filesystem::path& stem);
std::vector<ComplexField> read_complex_fields(const std::filesystem::path& stem);

}  // namespace lrlab::io
