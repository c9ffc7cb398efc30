#include "mubqkd/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace mubqkd {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CVec CMatrix::column(int c) const {
    CVec v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    CMatrix m(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const Cx aik = a(i, k);
            if (aik == Cx{}) continue;
            for (int j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    return m;
}

CVec operator*(const CMatrix& m, const CVec& v) {
    if (m.cols() != static_cast<int>(v.size())) throw std::invalid_argument("matrix apply: shape mismatch");
    CVec out(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        Cx s{};
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double w = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) w = std::max(w, std::abs(a(i, j) - b(i, j)));
    return w;
}

double unitarity_deviation(const CMatrix& m) {
    return max_abs_diff(m.adjoint() * m, CMatrix::identity(m.cols()));
}

Cx inner(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
    Cx s{};
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const CVec& v) {
    double s = 0.0;
    for (const Cx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace mubqkd
