#pragma once

#include <Eigen/Dense>

#include "ct/geometry.hpp"

namespace ct {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;

// Filter state over [x, y, a, h, vx, vy, va, vh]:
// box center, aspect ratio (w/h), height, and their per-frame velocities.
struct KalmanState {
    Vec8 mean = Vec8::Zero();
    Mat8 cova = Mat8::Zero();

    Xyah xyah() const { return {mean(0), mean(1), mean(2), mean(3)}; }
    BBox box() const { return from_xyah(xyah()); }
};

// Constant-velocity transition with direct xyah observation, dt = 1 frame.
// Noise standard deviations scale with the state's height (Deep-Sort
// convention); the weights are the config-exposed knobs.
class MotionModel {
public:
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;

    static Mat8 transition();    // F: identity plus dt coupling into velocities
    static Mat4x8 observation(); // H: selects [x, y, a, h]

    Mat8 process_noise(double h) const;      // Q, evaluated at the current height
    Mat4 observation_noise(double h) const;  // R

    // Zero-velocity state with diagonal covariance from the measurement.
    // Throws std::invalid_argument when a <= 0 or h <= 0.
    KalmanState initiate(const Xyah& z) const;

    // mean' = F mean (control term is zero); cova' = F cova F^T + Q.
    KalmanState predict(const KalmanState& s) const;

    // Standard gain/update equations. Throws std::runtime_error when the
    // innovation covariance is not positive definite.
    KalmanState update(const KalmanState& s, const Xyah& z) const;
};

}  // namespace ct
