#include "freent/matrix.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "freent/errors.hpp"
#include "freent/kernels.hpp"

namespace freent {

CMat::CMat(std::size_t dim) : k(dim), re(dim * dim, 0.0), im(dim * dim, 0.0) {
    if (dim == 0) throw ValidationError("matrix dimension must be >= 1");
}

CMat CMat::adjoint() const {
    CMat out(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            out.re[j * k + i] = re[i * k + j];
            out.im[j * k + i] = -im[i * k + j];
        }
    return out;
}

double CMat::frob_norm() const {
    const auto& kn = kern::ops();
    return std::sqrt(kn.sum_sq(re.data(), re.size()) + kn.sum_sq(im.data(), im.size()));
}

double CMat::herm_residual() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double dr = 0.5 * (re[i * k + j] - re[j * k + i]);
            const double di = 0.5 * (im[i * k + j] + im[j * k + i]);
            acc += dr * dr + di * di;
        }
    return std::sqrt(acc);
}

void cgemm_acc(const CMat& a, const CMat& b, CMat& c) {
    if (a.k != b.k || a.k != c.k) throw ValidationError("matrix product: dimension mismatch");
    kern::ops().cgemm_acc(a.re.data(), a.im.data(), b.re.data(), b.im.data(),
                          c.re.data(), c.im.data(), a.k);
}

CMat cmul(const CMat& a, const CMat& b) {
    CMat c(a.k);
    cgemm_acc(a, b, c);
    return c;
}

HermitianMatrix::HermitianMatrix(const CMat& m) : k_(m.k) {
    if (m.k == 0) throw ValidationError("matrix dimension must be >= 1");
    const double resid = m.herm_residual();
    if (!(resid <= 1e-12))
        throw ValidationError("non-Hermitian input: symmetrization residual " +
                              std::to_string(resid) + " exceeds 1e-12");
    re_.resize(k_ * k_);
    im_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i) {
        re_[i * k_ + i] = m.re[i * k_ + i];
        im_[i * k_ + i] = 0.0;
        for (std::size_t j = i + 1; j < k_; ++j) {
            const double r = 0.5 * (m.re[i * k_ + j] + m.re[j * k_ + i]);
            const double s = 0.5 * (m.im[i * k_ + j] - m.im[j * k_ + i]);
            re_[i * k_ + j] = r;
            re_[j * k_ + i] = r;
            im_[i * k_ + j] = s;
            im_[j * k_ + i] = -s;
        }
    }
}

HermitianMatrix HermitianMatrix::zero(std::size_t dim) {
    if (dim == 0) throw ValidationError("matrix dimension must be >= 1");
    return {dim, std::vector<double>(dim * dim, 0.0), std::vector<double>(dim * dim, 0.0)};
}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
    auto m = zero(dim);
    for (std::size_t i = 0; i < dim; ++i) m.re_[i * dim + i] = 1.0;
    return m;
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& d) {
    auto m = zero(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.re_[i * d.size() + i] = d[i];
    return m;
}

double HermitianMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < k_; ++i) t += re_[i * k_ + i];
    return t;
}

double HermitianMatrix::normalized_trace() const { return trace() / double(k_); }

double HermitianMatrix::frob_norm() const {
    const auto& kn = kern::ops();
    return std::sqrt(kn.sum_sq(re_.data(), re_.size()) + kn.sum_sq(im_.data(), im_.size()));
}

CMat HermitianMatrix::to_cmat() const {
    CMat m(k_);
    m.re = re_;
    m.im = im_;
    return m;
}

HermitianMatrix lincomb(double a, const HermitianMatrix& x, double b, const HermitianMatrix& y) {
    if (x.k_ != y.k_) throw ValidationError("matrix sum: dimension mismatch");
    std::vector<double> re(x.re_.size()), im(x.im_.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        re[i] = a * x.re_[i] + b * y.re_[i];
        im[i] = a * x.im_[i] + b * y.im_[i];
    }
    return HermitianMatrix(x.k_, std::move(re), std::move(im));
}

MatrixTuple::MatrixTuple(std::vector<HermitianMatrix> ms) : mats(std::move(ms)) {
    if (mats.empty()) throw ValidationError("matrix tuple must have arity >= 1");
    for (const auto& m : mats)
        if (m.dim() != mats[0].dim())
            throw ValidationError("matrix tuple: mixed dimensions");
}

double hs_metric(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.arity() != b.arity()) throw ValidationError("hs_metric: arity mismatch");
    if (a.dim() != b.dim()) throw ValidationError("hs_metric: dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.arity(); ++j) {
        const auto d = lincomb(1.0, a[j], -1.0, b[j]);
        const double f = d.frob_norm();
        acc += f * f;
    }
    return std::sqrt(acc / double(a.dim()));
}

namespace {

CMat cmat_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty())
        throw ValidationError("matrix literal must be a non-empty array of rows");
    const std::size_t k = j.size();
    CMat m(k);
    for (std::size_t r = 0; r < k; ++r) {
        const auto& row = j.at(r);
        if (!row.is_array() || row.size() != k)
            throw ValidationError("matrix literal row " + std::to_string(r) +
                                  " must have " + std::to_string(k) + " entries");
        for (std::size_t c = 0; c < k; ++c) {
            const auto& e = row.at(c);
            if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number())
                throw ValidationError("matrix entry (" + std::to_string(r) + "," +
                                      std::to_string(c) + ") must be a [re, im] pair");
            m.re[r * k + c] = e.at(0).get<double>();
            m.im[r * k + c] = e.at(1).get<double>();
        }
    }
    return m;
}

nlohmann::json parse_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("matrix literal: malformed JSON");
    return j;
}

} // namespace

HermitianMatrix matrix_from_json_text(const std::string& text) {
    return HermitianMatrix(cmat_from_json(parse_text(text)));
}

MatrixTuple tuple_from_json_text(const std::string& text) {
    const auto j = parse_text(text);
    if (!j.is_array() || j.empty())
        throw ValidationError("tuple literal must be a non-empty array of matrices");
    std::vector<HermitianMatrix> ms;
    ms.reserve(j.size());
    for (const auto& mj : j) ms.emplace_back(cmat_from_json(mj));
    return MatrixTuple(std::move(ms));
}

std::string matrix_to_json_text(const HermitianMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.dim(); ++j) {
            const auto e = m.entry(i, j);
            row.push_back({e.real(), e.imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows.dump();
}

} // namespace freent
