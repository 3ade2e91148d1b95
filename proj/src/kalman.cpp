#include "ct/kalman.hpp"

#include <stdexcept>

namespace ct {

Mat8 MotionModel::transition() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
}

Mat4x8 MotionModel::observation() {
    Mat4x8 h = Mat4x8::Zero();
    for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
    return h;
}

Mat8 MotionModel::process_noise(double h) const {
    Vec8 std;
    std << std_weight_position * h, std_weight_position * h, 1e-2,
        std_weight_position * h, std_weight_velocity * h,
        std_weight_velocity * h, 1e-5, std_weight_velocity * h;
    return std.array().square().matrix().asDiagonal();
}

Mat4 MotionModel::observation_noise(double h) const {
    Vec4 std;
    std << std_weight_position * h, std_weight_position * h, 1e-1,
        std_weight_position * h;
    return std.array().square().matrix().asDiagonal();
}

KalmanState MotionModel::initiate(const Xyah& z) const {
    if (z[2] <= 0.0 || z[3] <= 0.0) {
        throw std::invalid_argument("kalman initiate: aspect and height must be positive");
    }
    KalmanState s;
    for (int i = 0; i < 4; ++i) s.mean(i) = z[i];
    const double h = z[3];
    Vec8 std;
    std << 2 * std_weight_position * h, 2 * std_weight_position * h, 1e-2,
        2 * std_weight_position * h, 10 * std_weight_velocity * h,
        10 * std_weight_velocity * h, 1e-5, 10 * std_weight_velocity * h;
    s.cova = std.array().square().matrix().asDiagonal();
    return s;
}

KalmanState MotionModel::predict(const KalmanState& s) const {
    const Mat8 f = transition();
    const Mat8 q = process_noise(s.mean(3));
    KalmanState out;
    out.mean = f * s.mean;
    out.cova = f * s.cova * f.transpose() + q;
    return out;
}

KalmanState MotionModel::update(const KalmanState& s, const Xyah& z) const {
    if (z[2] <= 0.0 || z[3] <= 0.0) {
        throw std::invalid_argument("kalman update: aspect and height must be positive");
    }
    const Mat4x8 h = observation();
    const Mat4 r = observation_noise(s.mean(3));
    const Vec4 zv(z[0], z[1], z[2], z[3]);

    const Mat4 innovation_cov = h * s.cova * h.transpose() + r;
    Eigen::LLT<Mat4> llt(innovation_cov);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("kalman update: singular innovation covariance");
    }
    // K = cova H^T S^-1, via S X = H cova
    const Eigen::Matrix<double, 8, 4> gain =
        llt.solve(h * s.cova).transpose();

    KalmanState out;
    out.mean = s.mean + gain * (zv - h * s.mean);
    out.cova = (Mat8::Identity() - gain * h) * s.cova;
    out.cova = 0.5 * (out.cova + out.cova.transpose()).eval();
    return out;
}

}  // namespace ct
