#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floorstitch/bev.h"

namespace floorstitch {

// Binary netpbm encoders. `gray` holds width*height bytes, `rgb` three per
// pixel, both row-major from the top row.
std::string EncodePgm(int width, int height, const std::vector<uint8_t>& gray);
std::string EncodePpm(int width, int height, const std::vector<uint8_t>& rgb);

// Intensities scaled to 0..255; unoccupied cells are black.
std::string BevToPgm(const BevGrid& grid);
std::string MaskToPgm(const ReliabilityMask& mask);

// Distinct, deterministic color for a label index.
void LabelColor(int label, uint8_t rgb[3]);

}  // namespace floorstitch
