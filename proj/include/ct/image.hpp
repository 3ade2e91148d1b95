#pragma once

#include <string>
#include <vector>

#include "ct/geometry.hpp"

namespace ct {

// Row-major grayscale image, intensities in [0, 1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    bool empty() const { return width == 0 || height == 0; }
    float& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    float at_clamped(int x, int y) const;
    float sample_bilinear(float x, float y) const;  // clamped at borders
};

// Separable Gaussian blur, replicated borders, kernel radius ceil(3 sigma).
GrayImage gaussian_blur(const GrayImage& img, float sigma);

// Every second pixel; callers blur first.
GrayImage downsample_half(const GrayImage& img);

GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h);

// Integer pixel crop of the box clamped to the image. Empty result when the
// clamped box has no area.
GrayImage crop(const GrayImage& img, const BBox& box);

// PNG or JPEG by file extension; any color layout is folded to BT.601 luma.
// Throws std::runtime_error on decode failure or missing file.
GrayImage load_image(const std::string& path);

// 8-bit grayscale PNG. Throws std::runtime_error on write failure.
void save_png(const std::string& path, const GrayImage& img);

}  // namespace ct
