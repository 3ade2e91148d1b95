#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ct/image.hpp"

namespace ct {

struct Keypoint {
    float px = 0.0f;     // position in input-image coordinates
    float py = 0.0f;
    int octave = 0;
    float sigma = 0.0f;  // absolute blur level of the detection layer
    float modulus = 0.0f;
    float theta = 0.0f;  // dominant gradient orientation, [0, 2pi)
};

// 4x4 spatial cells x 8 orientation bins, L2-normalized (zero vector for
// gradient-free neighborhoods).
struct Descriptor {
    std::array<float, 128> v{};
};

struct AppearanceParams {
    float scale_factor = 1.41421356237309515f;  // pyramid level scaling
    float base_sigma = 1.6f;
    int octaves = 2;
    float contrast_threshold = 0.03f;
    float match_ratio = 0.75f;          // nearest/second-nearest acceptance
    float abs_match_threshold = 0.4f;   // fallback when fewer than 2 candidates
    int min_patch_side = 32;            // patches are upscaled to at least this
};

struct GaussianPyramid {
    struct Octave {
        std::vector<GrayImage> levels;  // 4 blur levels per octave
        int scale = 1;                  // downsampling factor vs. input
    };
    std::vector<Octave> octaves;
};

GaussianPyramid build_pyramid(const GrayImage& img, const AppearanceParams& p);

// Difference-of-Gaussians extrema over the 3x3x3 scale-space neighborhood,
// thresholded on |D|. Images smaller than 16x16 yield an empty list.
std::vector<Keypoint> detect_keypoints(const GaussianPyramid& pyr, const AppearanceParams& p);
std::vector<Keypoint> detect_keypoints(const GrayImage& img, const AppearanceParams& p);

// One descriptor per surviving keypoint; keypoints whose sampling window
// center falls too close to the border are dropped from `kps`.
std::vector<Descriptor> compute_descriptors(const GaussianPyramid& pyr,
                                            std::vector<Keypoint>& kps,
                                            const AppearanceParams& p);

// Accepted nearest-neighbor matches from `a` into `b` under Euclidean
// distance with the ratio test; with fewer than 2 candidates in `b` the
// absolute-distance fallback applies.
int knn_match(std::span<const Descriptor> a, std::span<const Descriptor> b,
              float ratio, float abs_threshold);

// Full pipeline for a patch pair: upscale to min_patch_side, detect,
// describe, match. nullopt when either patch is below 16x16.
std::optional<int> match_patches(const GrayImage& a, const GrayImage& b,
                                 const AppearanceParams& p);

}  // namespace ct
