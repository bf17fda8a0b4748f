#pragma once

#include <filesystem>

#include "jgmatch/feature_grid.hpp"

namespace jgmatch {

/// Reads a binary or ASCII PNM (P2/P3/P5/P6) or a PNG file and converts it
/// to grayscale with Rec. 601 luma weights.
GrayImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM (P5).
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace jgmatch
