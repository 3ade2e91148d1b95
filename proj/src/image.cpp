#include "ct/image.hpp"

#include <algorithm>
#include <cmath>

namespace ct {

float GrayImage::at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
}

float GrayImage::sample_bilinear(float x, float y) const {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const float fx = x - static_cast<float>(x0);
    const float fy = y - static_cast<float>(y0);
    const float v00 = at_clamped(x0, y0);
    const float v10 = at_clamped(x0 + 1, y0);
    const float v01 = at_clamped(x0, y0 + 1);
    const float v11 = at_clamped(x0 + 1, y0 + 1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

GrayImage gaussian_blur(const GrayImage& img, float sigma) {
    if (img.empty() || sigma <= 0.0f) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0f * sigma)));
    std::vector<float> kernel(2 * radius + 1);
    float sum = 0.0f;
    for (int i = -radius; i <= radius; ++i) {
        const float v = std::exp(-0.5f * (i * i) / (sigma * sigma));
        kernel[i + radius] = v;
        sum += v;
    }
    for (float& v : kernel) v /= sum;

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * img.at_clamped(x + i, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * tmp.at_clamped(x, y + i);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage downsample_half(const GrayImage& img) {
    const int w = std::max(1, img.width / 2);
    const int h = std::max(1, img.height / 2);
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = img.at_clamped(2 * x, 2 * y);
        }
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int new_w, int new_h) {
    GrayImage out(new_w, new_h);
    if (img.empty()) return out;
    const float sx = static_cast<float>(img.width) / static_cast<float>(new_w);
    const float sy = static_cast<float>(img.height) / static_cast<float>(new_h);
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            const float src_x = (static_cast<float>(x) + 0.5f) * sx - 0.5f;
            const float src_y = (static_cast<float>(y) + 0.5f) * sy - 0.5f;
            out.at(x, y) = img.sample_bilinear(src_x, src_y);
        }
    }
    return out;
}

GrayImage crop(const GrayImage& img, const BBox& box) {
    const int x0 = std::clamp(static_cast<int>(std::floor(box.x)), 0, img.width);
    const int y0 = std::clamp(static_cast<int>(std::floor(box.y)), 0, img.height);
    const int x1 = std::clamp(static_cast<int>(std::ceil(box.right())), 0, img.width);
    const int y1 = std::clamp(static_cast<int>(std::ceil(box.bottom())), 0, img.height);
    if (x1 <= x0 || y1 <= y0) return {};
    GrayImage out(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            out.at(x - x0, y - y0) = img.at(x, y);
        }
    }
    return out;
}

}  // namespace ct
