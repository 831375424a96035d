#include "floorstitch/image_io.h"

#include <algorithm>
#include <cmath>

#include "floorstitch/errors.h"

namespace floorstitch {

namespace {

std::string Encode(const char* magic, int width, int height, int channels,
                   const std::vector<uint8_t>& data) {
  if (width < 0 || height < 0 ||
      data.size() != static_cast<size_t>(width) * height * channels) {
    throw Error("image buffer does not match its dimensions");
  }
  std::string out = std::string(magic) + "\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(data.data()), data.size());
  return out;
}

}  // namespace

std::string EncodePgm(int width, int height, const std::vector<uint8_t>& gray) {
  return Encode("P5", width, height, 1, gray);
}

std::string EncodePpm(int width, int height, const std::vector<uint8_t>& rgb) {
  return Encode("P6", width, height, 3, rgb);
}

std::string BevToPgm(const BevGrid& grid) {
  std::vector<uint8_t> gray(grid.intensity.size(), 0);
  for (size_t i = 0; i < gray.size(); ++i) {
    if (!grid.occupied[i]) continue;
    const double v = std::clamp<double>(grid.intensity[i], 0.0, 1.0);
    gray[i] = static_cast<uint8_t>(std::lround(v * 255.0));
  }
  return EncodePgm(grid.cols, grid.rows, gray);
}

std::string MaskToPgm(const ReliabilityMask& mask) {
  std::vector<uint8_t> gray(mask.reliable.size());
  for (size_t i = 0; i < gray.size(); ++i) gray[i] = mask.reliable[i] ? 255 : 0;
  return EncodePgm(mask.cols, mask.rows, gray);
}

void LabelColor(int label, uint8_t rgb[3]) {
  static constexpr uint8_t kPalette[][3] = {
      {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
      {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
      {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
      {170, 110, 40}, {255, 250, 200}, {128, 0, 0},    {170, 255, 195}};
  constexpr int n = sizeof(kPalette) / sizeof(kPalette[0]);
  const int k = ((label % n) + n) % n;
  std::copy(kPalette[k], kPalette[k] + 3, rgb);
}

}  // namespace floorstitch
