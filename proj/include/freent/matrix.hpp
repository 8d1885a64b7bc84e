#pragma once
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace freent {

// General complex square matrix, row-major, split real/imaginary storage.
// The split layout keeps the rotation and product kernels branch-free.
struct CMat {
    std::size_t k = 0;
    std::vector<double> re, im;

    CMat() = default;
    explicit CMat(std::size_t dim);

    std::complex<double> entry(std::size_t i, std::size_t j) const {
        return {re[i * k + j], im[i * k + j]};
    }
    void set(std::size_t i, std::size_t j, std::complex<double> v) {
        re[i * k + j] = v.real();
        im[i * k + j] = v.imag();
    }

    CMat adjoint() const;
    double frob_norm() const;
    // Frobenius norm of (M - M*)/2, the distance to the Hermitian part.
    double herm_residual() const;
};

// C += A*B through the active kernel set.  Dimensions must agree.
void cgemm_acc(const CMat& a, const CMat& b, CMat& c);
CMat cmul(const CMat& a, const CMat& b);

// Self-adjoint matrix.  Construction symmetrizes to (M + M*)/2 and rejects
// inputs whose anti-Hermitian part exceeds 1e-12 in Frobenius norm; the
// stored parts satisfy re[i][j] == re[j][i] and im[i][j] == -im[j][i]
// exactly, with a zero imaginary diagonal.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const CMat& m);

    static HermitianMatrix zero(std::size_t dim);
    static HermitianMatrix identity(std::size_t dim);
    static HermitianMatrix diagonal(const std::vector<double>& d);

    std::size_t dim() const { return k_; }
    const std::vector<double>& re() const { return re_; }
    const std::vector<double>& im() const { return im_; }
    std::complex<double> entry(std::size_t i, std::size_t j) const {
        return {re_[i * k_ + j], im_[i * k_ + j]};
    }

    double trace() const;
    double normalized_trace() const;  // trace / dim
    double frob_norm() const;
    CMat to_cmat() const;

    friend HermitianMatrix lincomb(double a, const HermitianMatrix& x,
                                   double b, const HermitianMatrix& y);

private:
    HermitianMatrix(std::size_t k, std::vector<double> re, std::vector<double> im)
        : k_(k), re_(std::move(re)), im_(std::move(im)) {}
    std::size_t k_ = 0;
    std::vector<double> re_, im_;
};

HermitianMatrix lincomb(double a, const HermitianMatrix& x,
                        double b, const HermitianMatrix& y);
inline HermitianMatrix operator+(const HermitianMatrix& x, const HermitianMatrix& y) {
    return lincomb(1.0, x, 1.0, y);
}
inline HermitianMatrix operator-(const HermitianMatrix& x, const HermitianMatrix& y) {
    return lincomb(1.0, x, -1.0, y);
}

// Tuple of self-adjoint matrices of one common dimension.
struct MatrixTuple {
    std::vector<HermitianMatrix> mats;

    MatrixTuple() = default;
    explicit MatrixTuple(std::vector<HermitianMatrix> ms);

    std::size_t arity() const { return mats.size(); }
    std::size_t dim() const { return mats.empty() ? 0 : mats[0].dim(); }
    const HermitianMatrix& operator[](std::size_t j) const { return mats[j]; }
};

// k^{-1/2} * sqrt(sum_j Tr((A_j - B_j)^2)): the normalized Hilbert-Schmidt
// distance used for trace-scale geometry.
double hs_metric(const MatrixTuple& a, const MatrixTuple& b);

// max_j opnorm(A_j - B_j): the operator-norm distance.  Defined in eigen.cpp.
double uniform_metric(const MatrixTuple& a, const MatrixTuple& b);

// Matrix literals: row-major nested JSON arrays whose entries are [re, im]
// pairs, e.g. [[[0,0],[0,-1]],[[0,1],[0,0]]].  A tuple literal is an array
// of matrix literals.
HermitianMatrix matrix_from_json_text(const std::string& text);
MatrixTuple tuple_from_json_text(const std::string& text);
std::string matrix_to_json_text(const HermitianMatrix& m);

} // namespace freent
