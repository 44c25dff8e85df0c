#pragma once

#include <cstddef>
#include <vector>

namespace cspace {

// Dense row-major matrix of doubles. All model math runs in 64-bit.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    void resize(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        data.assign(r * c, 0.0);
    }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    void fill(double v) { data.assign(data.size(), v); }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

}  // namespace cspace
