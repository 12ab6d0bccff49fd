#pragma once

#include <string>
#include <utility>

#include "ddecert/kernel.hpp"

namespace ddecert {

/// Parses a system description of the form
///   {"B": [[...]],
///    "kernel": {"atoms": [{"delay": -0.5, "matrix": [[...]]}],
///               "density": {"breakpoints": [-1, 0],
///                           "pieces": [{"coeffs": [[[...]]]}]}}}
/// "atoms" and "density" are both optional; "kernel" may be omitted or {}
/// for a plain ODE. Validation failures carry the offending entry.
LinearDelaySystem parse_system(const std::string& text);
LinearDelaySystem load_system_file(const std::string& path);

std::string serialize_system(const LinearDelaySystem& system);

/// Parses {"A": [[...]], "C": [[...]]} for the quadratic-form rescaling.
std::pair<Matrix, Matrix> parse_matrix_pair(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace ddecert
