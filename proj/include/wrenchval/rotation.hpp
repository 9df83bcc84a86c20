#pragma once

#include <array>

#include "wrenchval/tensor.hpp"

namespace wrenchval {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Axis-angle exponential map; ||r|| = 0 yields the identity.
Mat3 rotvec_to_matrix(const Vec3& r);
Tensor rotvec_to_matrix_tensor(const Vec3& r);  // [3,3]

// f_tcp = R^T f_base, t_tcp = R^T t_base.
void wrench_to_tcp(const Vec3& f_base, const Vec3& t_base, const Vec3& r, Vec3& f_tcp, Vec3& t_tcp);

// Applies the wrench transform per sample: channels [9, N] with per-sample
// rotvec [3, N]. Force/torque rows are rotated into the TCP frame, position
// deltas pass through.
Tensor transform_wrench_channels(const Tensor& channels, const Tensor& rotvec);

}  // namespace wrenchval
