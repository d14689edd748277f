#include "ittt/tensor.hpp"

#include "ittt/common.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace ittt {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) {
        if (e == 0) throw DimensionError("tensor extents must be positive");
        n *= e;
    }
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (shape_product(shape_) != values_.size()) {
        throw DimensionError("tensor shape " + shape_str() + " does not match " +
                             std::to_string(values_.size()) + " values");
    }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
    Tensor t(std::move(shape));
    for (double& x : t.values_) x = v;
    return t;
}

Tensor Tensor::row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t r, std::size_t c, std::vector<double> values) {
    return Tensor({r, c}, std::move(values));
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool Tensor::bitwise_equal(const Tensor& o) const {
    if (shape_ != o.shape_) return false;
    return std::memcmp(values_.data(), o.values_.data(), values_.size() * sizeof(double)) == 0;
}

Tensor Tensor::row_at(std::size_t i) const {
    const std::size_t c = cols();
    Tensor out({1, c});
    std::memcpy(out.data(), values_.data() + i * c, c * sizeof(double));
    return out;
}

Tensor Tensor::rows_slice(std::size_t lo, std::size_t hi) const {
    const std::size_t c = cols();
    Tensor out({hi - lo, c});
    std::memcpy(out.data(), values_.data() + lo * c, (hi - lo) * c * sizeof(double));
    return out;
}

Tensor Tensor::gather_rows(const std::vector<std::size_t>& idx) const {
    const std::size_t c = cols();
    Tensor out({idx.size(), c});
    for (std::size_t r = 0; r < idx.size(); ++r) {
        std::memcpy(out.data() + r * c, values_.data() + idx[r] * c, c * sizeof(double));
    }
    return out;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << "x";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

namespace {

void check_2d(const Tensor& t, const char* who) {
    if (t.ndim() != 2) throw DimensionError(std::string(who) + ": expected 2-D tensor, got " + t.shape_str());
}

}  // namespace

void matmul_nn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    check_2d(a, "matmul");
    check_2d(b, "matmul");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul: inner dimensions disagree, " + a.shape_str() + " x " + b.shape_str());
    }
    if (c.rows() != m || c.cols() != n) {
        throw DimensionError("matmul: output shape " + c.shape_str() + " does not fit result");
    }
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ap[i * k + p];
            if (av == 0.0) continue;
            const double* brow = bp + p * n;
            double* crow = cp + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    check_2d(a, "matmul_nt");
    check_2d(b, "matmul_nt");
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    if (b.cols() != k) {
        throw DimensionError("matmul_nt: inner dimensions disagree, " + a.shape_str() + " x " + b.shape_str() + "^T");
    }
    if (c.rows() != m || c.cols() != n) {
        throw DimensionError("matmul_nt: output shape " + c.shape_str() + " does not fit result");
    }
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = ap + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = bp + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            cp[i * n + j] += acc;
        }
    }
}

void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& c) {
    check_2d(a, "matmul_tn");
    check_2d(b, "matmul_tn");
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul_tn: inner dimensions disagree, " + a.shape_str() + "^T x " + b.shape_str());
    }
    if (c.rows() != m || c.cols() != n) {
        throw DimensionError("matmul_tn: output shape " + c.shape_str() + " does not fit result");
    }
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = c.data();
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = ap + p * m;
        const double* brow = bp + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = cp + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

Tensor matmul_nn(const Tensor& a, const Tensor& b) {
    Tensor c({a.rows(), b.cols()});
    matmul_nn_acc(a, b, c);
    return c;
}

void add_inplace(Tensor& dst, const Tensor& src) {
    if (!dst.same_shape(src)) {
        throw DimensionError("add: shape mismatch " + dst.shape_str() + " vs " + src.shape_str());
    }
    double* d = dst.data();
    const double* s = src.data();
    for (std::size_t i = 0; i < dst.numel(); ++i) d[i] += s[i];
}

void axpy_inplace(Tensor& dst, double alpha, const Tensor& src) {
    if (!dst.same_shape(src)) {
        throw DimensionError("axpy: shape mismatch " + dst.shape_str() + " vs " + src.shape_str());
    }
    double* d = dst.data();
    const double* s = src.data();
    for (std::size_t i = 0; i < dst.numel(); ++i) d[i] += alpha * s[i];
}

}  // namespace ittt
