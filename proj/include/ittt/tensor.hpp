#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace ittt {

/// Dense row-major tensor of 64-bit floats. The only payload type in this
/// library; 1-D and 2-D shapes cover everything the models need.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double v);
    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor row(std::vector<double> values);                       // shape [n]
    static Tensor matrix(std::size_t r, std::size_t c, std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t ndim() const { return shape_.size(); }
    std::size_t numel() const { return values_.size(); }
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    // 2-D accessors; rows()/cols() treat a 1-D tensor as a single row.
    std::size_t rows() const { return ndim() == 2 ? shape_[0] : 1; }
    std::size_t cols() const { return ndim() == 2 ? shape_[1] : (ndim() == 1 ? shape_[0] : 0); }

    double& operator()(std::size_t i) { return values_[i]; }
    double operator()(std::size_t i) const { return values_[i]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols() + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const;
    bool bitwise_equal(const Tensor& o) const;

    /// Row i as a new [1 x cols] tensor.
    Tensor row_at(std::size_t i) const;
    /// Rows [lo, hi) as a new [(hi-lo) x cols] tensor.
    Tensor rows_slice(std::size_t lo, std::size_t hi) const;
    /// Gather rows by index into a new tensor.
    Tensor gather_rows(const std::vector<std::size_t>& idx) const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

// In-place kernels used by both forward values and backward rules.
// Shapes are checked; mismatches throw DimensionError naming both shapes.

/// C += A(m,k) * B(k,n)
void matmul_nn_acc(const Tensor& a, const Tensor& b, Tensor& c);
/// C += A(m,k) * B(n,k)^T
void matmul_nt_acc(const Tensor& a, const Tensor& b, Tensor& c);
/// C += A(k,m)^T * B(k,n)
void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& c);

Tensor matmul_nn(const Tensor& a, const Tensor& b);

void add_inplace(Tensor& dst, const Tensor& src);               // dst += src
void axpy_inplace(Tensor& dst, double alpha, const Tensor& src);  // dst += alpha*src

}  // namespace ittt
