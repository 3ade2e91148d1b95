#include "ct/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ct {

namespace {

constexpr int kMinImageSide = 16;
constexpr int kLevelsPerOctave = 4;  // 3 DoG layers, extrema in the middle one
constexpr float kTwoPi = 6.28318530717958648f;

float wrap_angle(float a) {
    while (a < 0.0f) a += kTwoPi;
    while (a >= kTwoPi) a -= kTwoPi;
    return a;
}

// Gradient by central differences on a blurred level, clamped at borders.
void gradient_at(const GrayImage& img, int x, int y, float& dx, float& dy) {
    dx = img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y);
    dy = img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1);
}

// Dominant orientation from a Gaussian-weighted 36-bin histogram around the
// point; returns the peak bin center.
float dominant_orientation(const GrayImage& img, int x, int y, float sigma,
                           float& peak_modulus) {
    constexpr int kBins = 36;
    const int radius = std::max(3, static_cast<int>(std::lround(2.5f * sigma)));
    const float weight_sigma = 1.5f * sigma;
    std::array<float, kBins> hist{};
    for (int oy = -radius; oy <= radius; ++oy) {
        for (int ox = -radius; ox <= radius; ++ox) {
            float dx, dy;
            gradient_at(img, x + ox, y + oy, dx, dy);
            const float m = std::sqrt(dx * dx + dy * dy);
            if (m <= 0.0f) continue;
            const float theta = wrap_angle(std::atan2(dy, dx));
            const float w = std::exp(-0.5f * (ox * ox + oy * oy) / (weight_sigma * weight_sigma));
            int bin = static_cast<int>(theta / kTwoPi * kBins);
            if (bin >= kBins) bin = kBins - 1;
            hist[bin] += w * m;
        }
    }
    int best = 0;
    for (int i = 1; i < kBins; ++i) {
        if (hist[i] > hist[best]) best = i;
    }
    float gx, gy;
    gradient_at(img, x, y, gx, gy);
    peak_modulus = std::sqrt(gx * gx + gy * gy);
    return (static_cast<float>(best) + 0.5f) * kTwoPi / kBins;
}

}  // namespace

GaussianPyramid build_pyramid(const GrayImage& img, const AppearanceParams& p) {
    GaussianPyramid pyr;
    const float k = p.scale_factor;

    // assumed blur of the raw input
    constexpr float kInputSigma = 0.5f;
    GrayImage base = img;
    {
        const float add = std::sqrt(std::max(0.0f, p.base_sigma * p.base_sigma - kInputSigma * kInputSigma));
        base = gaussian_blur(base, add);
    }

    int scale = 1;
    for (int o = 0; o < p.octaves; ++o) {
        if (base.width < 8 || base.height < 8) break;
        GaussianPyramid::Octave oct;
        oct.scale = scale;
        oct.levels.push_back(base);
        float prev_sigma = p.base_sigma;
        for (int i = 1; i < kLevelsPerOctave; ++i) {
            const float cur_sigma = p.base_sigma * std::pow(k, static_cast<float>(i));
            const float add = std::sqrt(cur_sigma * cur_sigma - prev_sigma * prev_sigma);
            oct.levels.push_back(gaussian_blur(oct.levels.back(), add));
            prev_sigma = cur_sigma;
        }
        // next octave starts from the level blurred to 2x base sigma
        int twice_index = kLevelsPerOctave - 1;
        for (int i = 0; i < kLevelsPerOctave; ++i) {
            if (p.base_sigma * std::pow(k, static_cast<float>(i)) >= 2.0f * p.base_sigma - 1e-6f) {
                twice_index = i;
                break;
            }
        }
        base = downsample_half(oct.levels[twice_index]);
        scale *= 2;
        pyr.octaves.push_back(std::move(oct));
    }
    return pyr;
}

std::vector<Keypoint> detect_keypoints(const GaussianPyramid& pyr, const AppearanceParams& p) {
    std::vector<Keypoint> kps;
    for (size_t o = 0; o < pyr.octaves.size(); ++o) {
        const auto& oct = pyr.octaves[o];
        const int w = oct.levels[0].width;
        const int h = oct.levels[0].height;

        std::vector<GrayImage> dog;
        for (int i = 0; i + 1 < static_cast<int>(oct.levels.size()); ++i) {
            GrayImage d(w, h);
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    d.at(x, y) = oct.levels[i + 1].at(x, y) - oct.levels[i].at(x, y);
                }
            }
            dog.push_back(std::move(d));
        }

        for (int layer = 1; layer + 1 < static_cast<int>(dog.size()); ++layer) {
            for (int y = 1; y < h - 1; ++y) {
                for (int x = 1; x < w - 1; ++x) {
                    const float v = dog[layer].at(x, y);
                    if (std::fabs(v) < p.contrast_threshold) continue;
                    bool is_max = true;
                    bool is_min = true;
                    for (int dl = -1; dl <= 1 && (is_max || is_min); ++dl) {
                        for (int dy = -1; dy <= 1; ++dy) {
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (dl == 0 && dx == 0 && dy == 0) continue;
                                const float n = dog[layer + dl].at(x + dx, y + dy);
                                if (n >= v) is_max = false;
                                if (n <= v) is_min = false;
                            }
                        }
                    }
                    if (!is_max && !is_min) continue;

                    Keypoint kp;
                    kp.octave = static_cast<int>(o);
                    const float level_sigma =
                        p.base_sigma * std::pow(p.scale_factor, static_cast<float>(layer));
                    kp.sigma = level_sigma * static_cast<float>(oct.scale);
                    kp.px = (static_cast<float>(x) + 0.5f) * static_cast<float>(oct.scale) - 0.5f;
                    kp.py = (static_cast<float>(y) + 0.5f) * static_cast<float>(oct.scale) - 0.5f;
                    kp.theta = dominant_orientation(oct.levels[layer], x, y, level_sigma, kp.modulus);
                    kps.push_back(kp);
                }
            }
        }
    }
    return kps;
}

std::vector<Keypoint> detect_keypoints(const GrayImage& img, const AppearanceParams& p) {
    if (img.width < kMinImageSide || img.height < kMinImageSide) return {};
    return detect_keypoints(build_pyramid(img, p), p);
}

std::vector<Descriptor> compute_descriptors(const GaussianPyramid& pyr,
                                            std::vector<Keypoint>& kps,
                                            const AppearanceParams& /*p*/) {
    constexpr int kWindow = 16;   // sampling grid, kWindow x kWindow
    constexpr int kCells = 4;
    constexpr int kBins = 8;
    constexpr float kBorderMargin = 2.0f;

    std::vector<Descriptor> descriptors;
    std::vector<Keypoint> kept;
    for (const Keypoint& kp : kps) {
        if (kp.octave < 0 || kp.octave >= static_cast<int>(pyr.octaves.size())) continue;
        const auto& oct = pyr.octaves[kp.octave];
        const GrayImage& img = oct.levels[1];  // layer underlying the extrema search

        const float cx = (kp.px + 0.5f) / static_cast<float>(oct.scale) - 0.5f;
        const float cy = (kp.py + 0.5f) / static_cast<float>(oct.scale) - 0.5f;
        if (cx < kBorderMargin || cy < kBorderMargin ||
            cx > static_cast<float>(img.width) - 1.0f - kBorderMargin ||
            cy > static_cast<float>(img.height) - 1.0f - kBorderMargin) {
            continue;
        }

        const float cos_t = std::cos(kp.theta);
        const float sin_t = std::sin(kp.theta);
        const float weight_sigma = kWindow / 2.0f;

        Descriptor d;
        for (int gy = 0; gy < kWindow; ++gy) {
            for (int gx = 0; gx < kWindow; ++gx) {
                const float u = static_cast<float>(gx) - kWindow / 2.0f + 0.5f;
                const float v = static_cast<float>(gy) - kWindow / 2.0f + 0.5f;
                // sample position rotated into the keypoint frame
                const float sx = cx + cos_t * u - sin_t * v;
                const float sy = cy + sin_t * u + cos_t * v;

                const float dx = img.sample_bilinear(sx + 1.0f, sy) - img.sample_bilinear(sx - 1.0f, sy);
                const float dy = img.sample_bilinear(sx, sy + 1.0f) - img.sample_bilinear(sx, sy - 1.0f);
                const float m = std::sqrt(dx * dx + dy * dy);
                if (m <= 0.0f) continue;
                const float rel = wrap_angle(std::atan2(dy, dx) - kp.theta);
                const float w = std::exp(-0.5f * (u * u + v * v) / (weight_sigma * weight_sigma));

                const int cell_x = gx * kCells / kWindow;
                const int cell_y = gy * kCells / kWindow;
                // soft orientation binning between the two nearest bins
                const float bin_pos = rel / kTwoPi * kBins - 0.5f;
                int b0 = static_cast<int>(std::floor(bin_pos));
                const float frac = bin_pos - static_cast<float>(b0);
                b0 = ((b0 % kBins) + kBins) % kBins;
                const int b1 = (b0 + 1) % kBins;
                const int base = (cell_y * kCells + cell_x) * kBins;
                d.v[base + b0] += w * m * (1.0f - frac);
                d.v[base + b1] += w * m * frac;
            }
        }
        float norm = 0.0f;
        for (float x : d.v) norm += x * x;
        if (norm > 0.0f) {
            norm = std::sqrt(norm);
            for (float& x : d.v) x /= norm;
        }
        descriptors.push_back(d);
        kept.push_back(kp);
    }
    kps = std::move(kept);
    return descriptors;
}

int knn_match(std::span<const Descriptor> a, std::span<const Descriptor> b,
              float ratio, float abs_threshold) {
    if (a.empty() || b.empty()) return 0;

    auto dist2 = [](const Descriptor& x, const Descriptor& y) {
        float acc = 0.0f;
        for (int i = 0; i < 128; ++i) {
            const float d = x.v[i] - y.v[i];
            acc += d * d;
        }
        return acc;
    };

    int accepted = 0;
    for (const Descriptor& q : a) {
        if (b.size() < 2) {
            if (std::sqrt(dist2(q, b[0])) < abs_threshold) ++accepted;
            continue;
        }
        float best = std::numeric_limits<float>::max();
        float second = std::numeric_limits<float>::max();
        for (const Descriptor& c : b) {
            const float d = dist2(q, c);
            if (d < best) {
                second = best;
                best = d;
            } else if (d < second) {
                second = d;
            }
        }
        // ratio test on distances; exact duplicates (0/0) count as matches
        if ((best == 0.0f && second == 0.0f) ||
            std::sqrt(best) < ratio * std::sqrt(second)) {
            ++accepted;
        }
    }
    return accepted;
}

std::optional<int> match_patches(const GrayImage& a, const GrayImage& b,
                                 const AppearanceParams& p) {
    if (a.width < kMinImageSide || a.height < kMinImageSide ||
        b.width < kMinImageSide || b.height < kMinImageSide) {
        return std::nullopt;
    }
    auto prepare = [&](const GrayImage& img) {
        const int shorter = std::min(img.width, img.height);
        if (shorter >= p.min_patch_side) return img;
        const float s = static_cast<float>(p.min_patch_side) / static_cast<float>(shorter);
        return resize_bilinear(img, std::max(p.min_patch_side, static_cast<int>(std::lround(img.width * s))),
                               std::max(p.min_patch_side, static_cast<int>(std::lround(img.height * s))));
    };
    const GrayImage pa = prepare(a);
    const GrayImage pb = prepare(b);

    GaussianPyramid pyr_a = build_pyramid(pa, p);
    GaussianPyramid pyr_b = build_pyramid(pb, p);
    std::vector<Keypoint> kps_a = detect_keypoints(pyr_a, p);
    std::vector<Keypoint> kps_b = detect_keypoints(pyr_b, p);
    const std::vector<Descriptor> da = compute_descriptors(pyr_a, kps_a, p);
    const std::vector<Descriptor> db = compute_descriptors(pyr_b, kps_b, p);
    return knn_match(da, db, p.match_ratio, p.abs_match_threshold);
}

}  // namespace ct
