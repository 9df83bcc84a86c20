#include "wrenchval/rotation.hpp"

#include <cmath>

#include "wrenchval/errors.hpp"
#include "wrenchval/record.hpp"

namespace wrenchval {

Mat3 rotvec_to_matrix(const Vec3& r) {
    const double theta2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    const double theta = std::sqrt(theta2);

    // sin(t)/t and (1-cos(t))/t^2, series-expanded near zero
    double s, c;
    if (theta < 1e-8) {
        s = 1.0 - theta2 / 6.0;
        c = 0.5 - theta2 / 24.0;
    } else {
        s = std::sin(theta) / theta;
        c = (1.0 - std::cos(theta)) / theta2;
    }

    // R = I + s*[r]_x + c*[r]_x^2
    const double x = r[0], y = r[1], z = r[2];
    Mat3 R;
    R[0][0] = 1.0 - c * (y * y + z * z);
    R[0][1] = c * x * y - s * z;
    R[0][2] = c * x * z + s * y;
    R[1][0] = c * x * y + s * z;
    R[1][1] = 1.0 - c * (x * x + z * z);
    R[1][2] = c * y * z - s * x;
    R[2][0] = c * x * z - s * y;
    R[2][1] = c * y * z + s * x;
    R[2][2] = 1.0 - c * (x * x + y * y);
    return R;
}

Tensor rotvec_to_matrix_tensor(const Vec3& r) {
    const Mat3 R = rotvec_to_matrix(r);
    Tensor t({3, 3});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.at(i, j) = R[i][j];
    return t;
}

namespace {

inline Vec3 transposed_apply(const Mat3& R, const Vec3& v) {
    return {R[0][0] * v[0] + R[1][0] * v[1] + R[2][0] * v[2],
            R[0][1] * v[0] + R[1][1] * v[1] + R[2][1] * v[2],
            R[0][2] * v[0] + R[1][2] * v[1] + R[2][2] * v[2]};
}

}  // namespace

void wrench_to_tcp(const Vec3& f_base, const Vec3& t_base, const Vec3& r, Vec3& f_tcp, Vec3& t_tcp) {
    const Mat3 R = rotvec_to_matrix(r);
    f_tcp = transposed_apply(R, f_base);
    t_tcp = transposed_apply(R, t_base);
}

Tensor transform_wrench_channels(const Tensor& channels, const Tensor& rotvec) {
    if (channels.rank() != 2 || channels.dim(0) != kNumChannels)
        throw DataError("transform_wrench_channels expects [9, N] channels, got " +
                        shape_string(channels.shape()));
    const std::size_t n = channels.dim(1);
    if (rotvec.rank() != 2 || rotvec.dim(0) != 3 || rotvec.dim(1) != n)
        throw DataError("rotvec shape mismatch: " + shape_string(rotvec.shape()));

    Tensor out = channels;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 r = {rotvec.at(0, i), rotvec.at(1, i), rotvec.at(2, i)};
        const Mat3 R = rotvec_to_matrix(r);
        const Vec3 f = {channels.at(0, i), channels.at(1, i), channels.at(2, i)};
        const Vec3 t = {channels.at(3, i), channels.at(4, i), channels.at(5, i)};
        const Vec3 ft = transposed_apply(R, f);
        const Vec3 tt = transposed_apply(R, t);
        for (int c = 0; c < 3; ++c) {
            out.at(c, i) = ft[c];
            out.at(c + 3, i) = tt[c];
        }
    }
    return out;
}

}  // namespace wrenchval
