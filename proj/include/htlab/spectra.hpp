#pragma once

// Floating-point symmetric eigenvalues (verification only, never probability
// values) and a long-double LDL^T log-determinant with compensated
// accumulation for the log-domain probability path.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace htlab {

// Neumaier-compensated sum: effective significand roughly doubles.
class CompensatedSum {
public:
    void add(long double x) {
        long double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    long double value() const { return s_ + c_; }

private:
    long double s_ = 0.0L, c_ = 0.0L;
};

// All eigenvalues of a real symmetric matrix, descending.
inline std::vector<double> sym_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sym_eigenvalues: matrix not square");
    double scale = m.cwiseAbs().maxCoeff();
    double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0 && asym > 1e-12 * scale)
        throw std::invalid_argument("sym_eigenvalues: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    std::reverse(ev.begin(), ev.end());
    return ev;
}

// log det of a symmetric positive definite matrix via LDL^T in long double
// (no pivoting; callers verify positive definiteness first). Throws if a
// pivot is not strictly positive.
inline long double logdet_spd(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    std::vector<long double> a(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[std::size_t(i) * n + j] = m(i, j);
    auto at = [&](int i, int j) -> long double& { return a[std::size_t(i) * n + j]; };

    CompensatedSum logsum;
    std::vector<long double> col(n);
    for (int k = 0; k < n; ++k) {
        long double piv = at(k, k);
        if (!(piv > 0.0L)) throw std::domain_error("logdet_spd: nonpositive pivot");
        logsum.add(std::log(piv));
        for (int i = k + 1; i < n; ++i) col[i] = at(i, k);
        for (int i = k + 1; i < n; ++i) {
            long double f = col[i] / piv;
            long double* rowi = &at(i, 0);
            for (int j = k + 1; j <= i; ++j) rowi[j] -= f * col[j];
        }
    }
    return logsum.value();
}

// Fallback: log det from an eigenvalue list (all must be positive).
inline long double logdet_from_eigenvalues(const std::vector<double>& ev) {
    CompensatedSum s;
    for (double x : ev) {
        if (!(x > 0.0)) throw std::domain_error("logdet_from_eigenvalues: nonpositive eigenvalue");
        s.add(std::log(static_cast<long double>(x)));
    }
    return s.value();
}

}  // namespace htlab
