#include "gw/hypercomplex.hpp"

#include <cmath>
#include <stdexcept>

namespace gw {

Quat quat_add(const Quat& p, const Quat& q) {
    return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d};
}

Quat quat_sub(const Quat& p, const Quat& q) {
    return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d};
}

Quat quat_scale(double s, const Quat& q) {
    return {s * q.a, s * q.b, s * q.c, s * q.d};
}

Quat quat_conj(const Quat& q) {
    return {q.a, -q.b, -q.c, -q.d};
}

double quat_norm(const Quat& q) {
    return std::sqrt(q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d);
}

Quat hyper_mul(const Quat& p, const Quat& q, AlgebraKind kind) {
    const double a1 = p.a, b1 = p.b, c1 = p.c, d1 = p.d;
    const double a2 = q.a, b2 = q.b, c2 = q.c, d2 = q.d;
    switch (kind) {
        case AlgebraKind::Hamilton:
            return {a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                    a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                    a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                    a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2};
        case AlgebraKind::ReducedBiquaternion:
            return {a1 * a2 - b1 * b2 + c1 * c2 - d1 * d2,
                    b1 * a2 + a1 * b2 + d1 * c2 + c1 * d2,
                    c1 * a2 - d1 * b2 + a1 * c2 - b1 * d2,
                    d1 * a2 + c1 * b2 + b1 * c2 + a1 * d2};
        case AlgebraKind::DoubleComplex:
            return {a1 * a2 + b1 * b2 - c1 * c2 - d1 * d2,
                    b1 * a2 + a1 * b2 - d1 * c2 - c1 * d2,
                    c1 * a2 + d1 * b2 + a1 * c2 - b1 * d2,
                    d1 * a2 + c1 * b2 + b1 * c2 + a1 * d2};
        case AlgebraKind::HCA4:
            return {a1 * a2 - b1 * b2 - c1 * c2 + d1 * d2,
                    b1 * a2 + a1 * b2 - d1 * c2 + c1 * d2,
                    c1 * a2 + d1 * b2 + a1 * c2 - b1 * d2,
                    d1 * a2 - c1 * b2 - b1 * c2 + a1 * d2};
    }
    throw std::invalid_argument("hyper_mul: unknown algebra");
}

std::array<std::array<double, 4>, 4> mul_matrix(const Quat& p, AlgebraKind kind) {
    const double a = p.a, b = p.b, c = p.c, d = p.d;
    switch (kind) {
        case AlgebraKind::Hamilton:
            return {{{a, -b, -c, -d},
                     {b, a, -d, c},
                     {c, d, a, -b},
                     {d, -c, b, a}}};
        case AlgebraKind::ReducedBiquaternion:
            return {{{a, -b, c, -d},
                     {b, a, d, c},
                     {c, -d, a, -b},
                     {d, c, b, a}}};
        case AlgebraKind::DoubleComplex:
            return {{{a, b, -c, -d},
                     {b, a, -d, -c},
                     {c, d, a, -b},
                     {d, c, b, a}}};
        case AlgebraKind::HCA4:
            return {{{a, -b, -c, d},
                     {b, a, -d, c},
                     {c, d, a, -b},
                     {d, -c, -b, a}}};
    }
    throw std::invalid_argument("mul_matrix: unknown algebra");
}

PhaseDecomposition phase_decompose(const Quat& q) {
    const double n = quat_norm(q);
    if (n == 0.0)
        throw std::domain_error("phase_decompose: zero quaternion");
    const double a = q.a / n, b = q.b / n, c = q.c / n, d = q.d / n;

    double n_phi = 2.0 * (c * d + a * b);
    const double d_phi = a * a - b * b + c * c - d * d;
    double n_theta = 2.0 * (b * d + a * c);
    const double d_theta = a * a + b * b - c * c - d * d;
    double n_psi = 2.0 * (b * c + a * d);

    if (n_phi == 0.0) n_phi = 0.0;
    if (n_theta == 0.0) n_theta = 0.0;
    if (n_psi > 1.0) n_psi = 1.0;
    if (n_psi < -1.0) n_psi = -1.0;

    PhaseDecomposition out;
    out.magnitude = n;
    out.phi = (n_phi == 0.0 && d_phi == 0.0) ? 0.0 : std::atan2(n_phi, d_phi);
    out.theta = (n_theta == 0.0 && d_theta == 0.0) ? 0.0 : std::atan2(n_theta, d_theta);
    out.psi = std::asin(n_psi);
    return out;
}

QuatImage::QuatImage(int height, int width) : h(height), w(width) {
    if (height <= 0 || width <= 0)
        throw std::invalid_argument("QuatImage: dimensions must be positive");
    px.assign(static_cast<size_t>(height) * width, Quat{});
}

QuatImage image_to_quat(const ImageTensor& img) {
    if (img.c != 3)
        throw std::invalid_argument("image_to_quat: expected 3 channels");
    QuatImage qi(img.h, img.w);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            qi.at(y, x) = {0.0, img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)};
    return qi;
}

ImageTensor quat_to_image(const QuatImage& qi, double tol) {
    ImageTensor img(qi.h, qi.w, 3);
    for (int y = 0; y < qi.h; ++y) {
        for (int x = 0; x < qi.w; ++x) {
            const Quat& q = qi.at(y, x);
            if (std::abs(q.a) > tol)
                throw std::invalid_argument(
                    "quat_to_image: pixel has a non-negligible real part");
            img.at(y, x, 0) = q.b;
            img.at(y, x, 1) = q.c;
            img.at(y, x, 2) = q.d;
        }
    }
    return img;
}

QuatImage quat_image_op(const QuatImage& a, const QuatImage& b, QuatImageOp op) {
    if (a.h != b.h || a.w != b.w)
        throw std::invalid_argument("quat_image_op: shape mismatch");
    QuatImage out(a.h, a.w);
    const size_t n = a.px.size();
    for (size_t i = 0; i < n; ++i) {
        switch (op) {
            case QuatImageOp::Add:
                out.px[i] = quat_add(a.px[i], b.px[i]);
                break;
            case QuatImageOp::PointwiseMul:
                out.px[i] = {a.px[i].a * b.px[i].a, a.px[i].b * b.px[i].b,
                             a.px[i].c * b.px[i].c, a.px[i].d * b.px[i].d};
                break;
            case QuatImageOp::Hamilton:
                out.px[i] = hyper_mul(a.px[i], b.px[i], AlgebraKind::Hamilton);
                break;
            case QuatImageOp::ConjLeft:
                out.px[i] = quat_conj(a.px[i]);
                break;
        }
    }
    return out;
}

PhaseImage phase_decompose(const QuatImage& qi) {
    PhaseImage out;
    out.h = qi.h;
    out.w = qi.w;
    const size_t n = qi.px.size();
    out.magnitude.resize(n);
    out.phi.resize(n);
    out.theta.resize(n);
    out.psi.resize(n);
    for (size_t i = 0; i < n; ++i) {
        PhaseDecomposition p = phase_decompose(qi.px[i]);
        out.magnitude[i] = p.magnitude;
        out.phi[i] = p.phi;
        out.theta[i] = p.theta;
        out.psi[i] = p.psi;
    }
    return out;
}

}  // namespace gw
