#include "glsync/gls.hpp"

#include "glsync/error.hpp"

#include <string>

namespace glsync {

GlsParams params_from_k(double k) {
    if (!std::isfinite(k)) throw InvalidInput("params_from_k: k must be finite");
    GlsParams p;
    p.k = k;
    p.a = 10.0 + (25.0 / 29.0) * k;
    p.b = 28.0 - (35.0 / 29.0) * k;
    p.c = -(8.0 / 3.0) - (1.0 / 87.0) * k;
    p.d = k - 1.0;
    return p;
}

SigmaVec make_sigma(double s1, double s2, double s3) {
    const SigmaVec s{s1, s2, s3};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!std::isfinite(s[i]) || s[i] < -1.0 || s[i] > 1.0)
            throw InvalidInput("sigma component " + std::to_string(i + 1) + " outside [-1, 1]");
    }
    return s;
}

StateVec master_deriv(const GlsParams& p, const StateVec& x) {
    return {p.a * (x[1] - x[0]),
            p.b * x[0] + p.d * x[1] - x[0] * x[2],
            x[0] * x[1] + p.c * x[2]};
}

ErrorVec error_vec(const SigmaVec& s, const StateVec& x, const StateVec& y) {
    return {y[0] + s[0] * x[0], y[1] + s[1] * x[1], y[2] + s[2] * x[2]};
}

StateVec sync_error(const StateVec& x, const StateVec& y) { return {y[0] - x[0], y[1] - x[1], y[2] - x[2]}; }

ControlVec control_inputs(const GlsParams& p, const SigmaVec& s, const StateVec& x, const ErrorVec& e,
                          ControlTerms terms) {
    using T = ControlTerms;
    auto on = [&](T::Term t, double v) { return terms.enabled(t) ? v : 0.0; };

    const double ua1 = on(T::ua1, (s[1] - s[0]) * p.a * x[1]);
    const double ub1 = on(T::ub1, (p.b + s[2] * x[2]) * e[1]);
    const double uc1 = on(T::uc1, s[1] * x[1] * e[2]);
    const double ua2 = on(T::ua2, (s[0] - s[1]) * p.b * x[0]);
    const double ub2 = on(T::ub2, (s[0] * s[2] + s[1]) * x[0] * x[2]);
    const double uc2 = on(T::uc2, e[2] * e[0] - p.a * e[0] - 2.0 * p.c * e[1]);
    const double ua3 = on(T::ua3, (s[0] * s[1] + s[2]) * x[0] * x[1]);
    const double ub3 = on(T::ub3, e[0] * e[1]);

    return {ua1 - ub1 + uc1, ua2 + ub2 + uc2, -ua3 - ub3};
}

StateVec slave_deriv(const GlsParams& p, const SigmaVec& s, const StateVec& x, const StateVec& y,
                     ControlTerms terms) {
    const ControlVec u = control_inputs(p, s, x, error_vec(s, x, y), terms);
    return {p.a * (y[1] - y[0]) + u[0],
            p.b * y[0] + p.d * y[1] - y[0] * y[2] + u[1],
            y[0] * y[1] + p.c * y[2] + u[2]};
}

ErrorVec error_deriv_closed_form(const GlsParams& p, const SigmaVec& s, const StateVec& x, const ErrorVec& e) {
    const double s3x3 = s[2] * x[2];
    const double s2x2 = s[1] * x[1];
    const double s1x1 = s[0] * x[0];
    return {-p.a * e[0] + (p.a - p.b - s3x3) * e[1] + s2x2 * e[2],
            (p.b - p.a + s3x3) * e[0] + (p.d - 2.0 * p.c) * e[1] + s1x1 * e[2],
            -s2x2 * e[0] - s1x1 * e[1] + p.c * e[2]};
}

double lyapunov_value(const ErrorVec& e) { return 0.5 * (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]); }

QMatrix QMatrix::symmetric_part() const {
    QMatrix s;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) s.m[i][j] = 0.5 * (m[i][j] + m[j][i]);
    return s;
}

double QMatrix::quadratic_form(const ErrorVec& e) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) acc += e[i] * m[i][j] * e[j];
    return acc;
}

QMatrix q_matrix(const GlsParams& p, const SigmaVec& s, const StateVec& x, QForm form) {
    const double s3x3 = s[2] * x[2];
    const double s2x2 = s[1] * x[1];
    const double s1x1 = s[0] * x[0];
    QMatrix q;
    q.m[0] = {p.a, -(p.b - p.a - s3x3), s2x2};
    q.m[1] = {p.b - p.a + s3x3, 2.0 * p.c - p.d, s1x1};
    q.m[2] = {-s2x2, -s1x1, -p.c};
    if (form == QForm::flow_consistent) q.m[0][1] = -(p.b - p.a + s3x3);
    return q;
}

} // namespace glsync
