#pragma once

#include <complex>
#include <vector>

namespace mubqkd {

using Cx = std::complex<double>;
using CVec = std::vector<Cx>;

// Dense complex matrix, row-major. Dimensions here stay desk-scale
// (d <= 2^16 fields, d <= 27 in practice), so no external linear algebra.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Cx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Cx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    CVec column(int c) const;
    CMatrix adjoint() const;

    const std::vector<Cx>& data() const { return a_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Cx> a_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CVec operator*(const CMatrix& m, const CVec& v);
CMatrix kron(const CMatrix& a, const CMatrix& b);

// max_ij |a_ij - b_ij|
double max_abs_diff(const CMatrix& a, const CMatrix& b);
// max_ij |(M^dag M - I)_ij|
double unitarity_deviation(const CMatrix& m);

Cx inner(const CVec& a, const CVec& b);  // <a|b>, conjugate-linear in a
double norm(const CVec& v);

// Dense real matrix, row-major.
class DMatrix {
public:
    DMatrix() = default;
    DMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const double& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    const std::vector<double>& data() const { return a_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

}  // namespace mubqkd
