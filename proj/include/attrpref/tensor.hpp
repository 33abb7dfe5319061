#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "attrpref/errors.hpp"

namespace attrpref {

// Dense row-major 64-bit float array with an optional same-shape gradient
// buffer. All model parameters and activations live in these.
class TensorValue {
public:
    TensorValue() = default;

    explicit TensorValue(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

    TensorValue(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != element_count(shape_)) {
            throw DimensionError("TensorValue: data length " +
                                 std::to_string(data_.size()) +
                                 " does not match shape product " +
                                 std::to_string(element_count(shape_)));
        }
    }

    static TensorValue scalar(double v) {
        return TensorValue({1}, {v});
    }

    static TensorValue vector(std::vector<double> v) {
        std::size_t n = v.size();
        return TensorValue({n}, std::move(v));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const { return shape_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double item() const {
        if (data_.size() != 1) {
            throw DimensionError("TensorValue::item on non-scalar");
        }
        return data_[0];
    }

    bool has_grad() const { return !grad_.empty(); }

    std::vector<double>& grad() {
        if (grad_.empty()) grad_.assign(data_.size(), 0.0);
        return grad_;
    }

    const std::vector<double>& grad() const { return grad_; }

    void zero_grad() {
        if (!grad_.empty()) grad_.assign(data_.size(), 0.0);
    }

    void drop_grad() { grad_.clear(); }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    void check_finite(const std::string& what) const {
        if (!all_finite()) {
            throw NumericError("non-finite value in " + what);
        }
    }

    static std::size_t element_count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               [](std::size_t a, std::size_t b) { return a * b; });
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
    std::vector<double> grad_;
};

// Sparse feature vector produced by the hashed n-gram featurizer: sorted
// (bucket, weight) pairs, L2-normalized.
struct SparseVec {
    std::vector<std::pair<std::uint32_t, double>> entries;

    double l2_norm() const {
        double s = 0.0;
        for (const auto& [idx, w] : entries) s += w * w;
        return std::sqrt(s);
    }
};

}  // namespace attrpref
