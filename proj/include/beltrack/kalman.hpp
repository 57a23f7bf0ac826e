#pragma once

// Constant-velocity Kalman filter over the (cx, cy, aspect, height) box
// encoding. State layout: [cx, cy, a, h, vcx, vcy, va, vh].

#include <Eigen/Dense>
#include <stdexcept>

#include "beltrack/box.hpp"

namespace beltrack {

template <typename Scalar>
using Vector8 = Eigen::Matrix<Scalar, 8, 1>;
template <typename Scalar>
using Matrix8 = Eigen::Matrix<Scalar, 8, 8>;
template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
struct KalmanStateT {
    Vector8<Scalar> mean = Vector8<Scalar>::Zero();
    Matrix8<Scalar> covariance = Matrix8<Scalar>::Identity();

    EIGEN_MAKE_ALIGNED_OPERATOR_NEW
};

using KalmanState = KalmanStateT<double>;

/// Noise model. Position, velocity and measurement std-devs are fractions of
/// the box height; the aspect-ratio channel uses absolute std-devs because
/// it is dimensionless.
struct KalmanParams {
    double std_position = 1.0 / 20.0;
    double std_velocity = 1.0 / 160.0;
    double std_measurement = 1.0 / 20.0;
    // Multipliers on the initial covariance (new tracks start less certain).
    double init_position_factor = 2.0;
    double init_velocity_factor = 10.0;
    double std_aspect = 1e-2;
    double std_aspect_velocity = 1e-5;
    double std_aspect_measurement = 1e-1;
};

namespace detail {

template <typename Scalar>
Matrix8<Scalar> transition() {
    Matrix8<Scalar> f = Matrix8<Scalar>::Identity();
    f.template topRightCorner<4, 4>().setIdentity();
    return f;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 8> observation() {
    Eigen::Matrix<Scalar, 4, 8> hm = Eigen::Matrix<Scalar, 4, 8>::Zero();
    hm.template leftCols<4>().setIdentity();
    return hm;
}

template <typename Scalar>
void symmetrize(Matrix8<Scalar>& p) {
    p = (Scalar(0.5) * (p + p.transpose())).eval();
}

}  // namespace detail

/// Encodes a box as (cx, cy, w/h, h).
template <typename Scalar = double>
Vector4<Scalar> box_to_measurement(const BoundingBox& box) {
    return Vector4<Scalar>(Scalar(box.center_x()), Scalar(box.center_y()),
                           Scalar(box.w() / box.h()), Scalar(box.h()));
}

template <typename Scalar = double>
KalmanStateT<Scalar> kf_initiate(const BoundingBox& box, const KalmanParams& params = {}) {
    KalmanStateT<Scalar> s;
    s.mean.template head<4>() = box_to_measurement<Scalar>(box);
    s.mean.template tail<4>().setZero();

    const Scalar h = Scalar(box.h());
    const Scalar pos = Scalar(params.init_position_factor * params.std_position) * h;
    const Scalar vel = Scalar(params.init_velocity_factor * params.std_velocity) * h;
    Vector8<Scalar> std_dev;
    std_dev << pos, pos, Scalar(params.std_aspect), pos, vel, vel,
        Scalar(params.std_aspect_velocity), vel;
    s.covariance = std_dev.array().square().matrix().asDiagonal();
    return s;
}

template <typename Scalar>
KalmanStateT<Scalar> kf_predict(const KalmanStateT<Scalar>& state, const KalmanParams& params = {}) {
    const Scalar h = state.mean(3);
    const Scalar pos = Scalar(params.std_position) * h;
    const Scalar vel = Scalar(params.std_velocity) * h;
    Vector8<Scalar> std_dev;
    std_dev << pos, pos, Scalar(params.std_aspect), pos, vel, vel,
        Scalar(params.std_aspect_velocity), vel;
    const Matrix8<Scalar> q = std_dev.array().square().matrix().asDiagonal();

    const Matrix8<Scalar> f = detail::transition<Scalar>();
    KalmanStateT<Scalar> out;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose() + q;
    detail::symmetrize(out.covariance);
    return out;
}

/// Measurement update with the Joseph-form covariance, which stays symmetric
/// positive semi-definite under rounding.
template <typename Scalar>
KalmanStateT<Scalar> kf_update(const KalmanStateT<Scalar>& state, const BoundingBox& observed,
                               const KalmanParams& params = {}) {
    const Scalar h = state.mean(3);
    const Scalar m = Scalar(params.std_measurement) * h;
    Vector4<Scalar> std_dev(m, m, Scalar(params.std_aspect_measurement), m);
    const Matrix4<Scalar> r = std_dev.array().square().matrix().asDiagonal();

    const auto hm = detail::observation<Scalar>();
    const Vector4<Scalar> innovation = box_to_measurement<Scalar>(observed) - hm * state.mean;
    const Matrix4<Scalar> s = hm * state.covariance * hm.transpose() + r;
    // K = P H^T S^-1, computed via a Cholesky solve of S K^T = H P.
    const Eigen::Matrix<Scalar, 8, 4> gain =
        s.llt().solve(hm * state.covariance).transpose();

    KalmanStateT<Scalar> out;
    out.mean = state.mean + gain * innovation;
    const Matrix8<Scalar> i_kh = Matrix8<Scalar>::Identity() - gain * hm;
    out.covariance = i_kh * state.covariance * i_kh.transpose() + gain * r * gain.transpose();
    detail::symmetrize(out.covariance);
    return out;
}

/// Thrown by state_to_box when the filter has produced a non-positive
/// aspect ratio or height.
class FilterDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
BoundingBox state_to_box(const KalmanStateT<Scalar>& state) {
    const double cx = double(state.mean(0));
    const double cy = double(state.mean(1));
    const double a = double(state.mean(2));
    const double h = double(state.mean(3));
    if (!(a > 0.0) || !(h > 0.0)) {
        throw FilterDivergence("kalman state has non-positive aspect or height");
    }
    const double w = a * h;
    return BoundingBox(cx - 0.5 * w, cy - 0.5 * h, w, h);
}

}  // namespace beltrack
