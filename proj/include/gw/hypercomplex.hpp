#pragma once

#include <array>
#include <vector>

#include "gw/image.hpp"

namespace gw {

struct Quat {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};

// Four degree-4 real algebras sharing the (a, b, c, d) coordinate layout.
// They differ in the signs of the basis products; Hamilton is the only
// non-commutative one.
enum class AlgebraKind { Hamilton, ReducedBiquaternion, DoubleComplex, HCA4 };

Quat quat_add(const Quat& p, const Quat& q);
Quat quat_sub(const Quat& p, const Quat& q);
Quat quat_scale(double s, const Quat& q);
Quat quat_conj(const Quat& q);
double quat_norm(const Quat& q);

Quat hyper_mul(const Quat& p, const Quat& q, AlgebraKind kind);

// Matrix form of left multiplication by p: mul_matrix(p, kind) * vec(q)
// equals hyper_mul(p, q, kind) with vec(q) = (a, b, c, d)^T.
std::array<std::array<double, 4>, 4> mul_matrix(const Quat& p, AlgebraKind kind);

struct PhaseDecomposition {
    double magnitude = 0.0;
    double phi = 0.0;    // (-pi, pi]
    double theta = 0.0;  // (-pi, pi]
    double psi = 0.0;    // [-pi/2, pi/2]
};

// Polar-form angles of a nonzero quaternion, computed on the unit-normalized
// components. Degenerate atan2(0, 0) cases resolve to 0. Throws
// std::domain_error on the zero quaternion.
PhaseDecomposition phase_decompose(const Quat& q);

struct QuatImage {
    int h = 0;
    int w = 0;
    std::vector<Quat> px;

    QuatImage() = default;
    QuatImage(int height, int width);
    Quat& at(int y, int x) { return px[static_cast<size_t>(y) * w + x]; }
    const Quat& at(int y, int x) const { return px[static_cast<size_t>(y) * w + x]; }
};

// RGB planes become the three imaginary parts (b, c, d); the real part is 0.
QuatImage image_to_quat(const ImageTensor& img);

// Inverse of image_to_quat. Throws std::invalid_argument when any pixel has
// |a| beyond tol (the image is not pure-imaginary).
ImageTensor quat_to_image(const QuatImage& qi, double tol = 1e-9);

enum class QuatImageOp { Add, PointwiseMul, Hamilton, ConjLeft };

// Pixelwise binary ops on same-sized quaternion images. PointwiseMul
// multiplies the four components independently, Hamilton applies the
// quaternion product. ConjLeft conjugates the left operand and ignores the
// right one's values.
QuatImage quat_image_op(const QuatImage& a, const QuatImage& b, QuatImageOp op);

struct PhaseImage {
    int h = 0;
    int w = 0;
    std::vector<double> magnitude, phi, theta, psi;
};

PhaseImage phase_decompose(const QuatImage& qi);

}  // namespace gw
