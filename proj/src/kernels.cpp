#include "cspace/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>

namespace cspace::kern {

// The parallel kernels split work across independent output elements only;
// every sum runs in a fixed serial order, so results match the serial
// reference bit for bit regardless of thread count.

void gemm_nt(const Mat& A, const Mat& B, Mat& C) {
    assert(A.cols == B.cols);
    C.resize(A.rows, B.rows);
    const std::int64_t m = static_cast<std::int64_t>(A.rows);
    const std::size_t n = B.rows, k = A.cols;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* a = A.row(static_cast<std::size_t>(i));
        double* c = C.row(static_cast<std::size_t>(i));
        // Four independent accumulator chains per pass; each output element
        // still sums over t in order, so values match the serial reference
        // bit for bit.
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const double* b0 = B.row(j);
            const double* b1 = B.row(j + 1);
            const double* b2 = B.row(j + 2);
            const double* b3 = B.row(j + 3);
            double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                const double av = a[t];
                a0 += av * b0[t];
                a1 += av * b1[t];
                a2 += av * b2[t];
                a3 += av * b3[t];
            }
            c[j] = a0;
            c[j + 1] = a1;
            c[j + 2] = a2;
            c[j + 3] = a3;
        }
        for (; j < n; ++j) {
            const double* b = B.row(j);
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) acc += a[t] * b[t];
            c[j] = acc;
        }
    }
}

void gemm_nn(const Mat& A, const Mat& B, Mat& C) {
    assert(A.cols == B.rows);
    C.resize(A.rows, B.cols);
    const std::int64_t m = static_cast<std::int64_t>(A.rows);
    const std::size_t n = B.cols, k = A.cols;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* a = A.row(static_cast<std::size_t>(i));
        double* c = C.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = a[t];
            const double* b = B.row(t);
            for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
        }
    }
}

void gemm_tn(const Mat& A, const Mat& B, Mat& C) {
    assert(A.rows == B.rows);
    C.resize(A.cols, B.cols);
    const std::int64_t ka = static_cast<std::int64_t>(A.cols);
    const std::size_t n = B.cols, m = A.rows;
#pragma omp parallel for schedule(static)
    for (std::int64_t a = 0; a < ka; ++a) {
        double* c = C.row(static_cast<std::size_t>(a));
        for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = A.at(i, static_cast<std::size_t>(a));
            const double* b = B.row(i);
            for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
        }
    }
}

void add_bias_rows(Mat& X, const std::vector<double>& b) {
    assert(X.cols == b.size());
    const std::int64_t m = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        double* x = X.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < X.cols; ++j) x[j] += b[j];
    }
}

void col_sums(const Mat& X, std::vector<double>& out) {
    out.assign(X.cols, 0.0);
    const std::int64_t n = static_cast<std::int64_t>(X.cols);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) acc += X.at(i, static_cast<std::size_t>(j));
        out[static_cast<std::size_t>(j)] = acc;
    }
}

void batch_mean_var(const Mat& X, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(X.cols, 0.0);
    var.assign(X.cols, 0.0);
    const double inv = 1.0 / static_cast<double>(X.rows);
    const std::int64_t n = static_cast<std::int64_t>(X.cols);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) s += X.at(i, jj);
        const double mu = s * inv;
        double v = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double d = X.at(i, jj) - mu;
            v += d * d;
        }
        mean[jj] = mu;
        var[jj] = v * inv;
    }
}

void relu(Mat& X) {
    const std::int64_t m = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        double* x = X.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < X.cols; ++j) x[j] = x[j] > 0.0 ? x[j] : 0.0;
    }
}

void relu_backward(const Mat& preact, Mat& grad) {
    assert(preact.same_shape(grad));
    const std::int64_t m = static_cast<std::int64_t>(grad.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* p = preact.row(static_cast<std::size_t>(i));
        double* g = grad.row(static_cast<std::size_t>(i));
        for (std::size_t j = 0; j < grad.cols; ++j)
            if (p[j] <= 0.0) g[j] = 0.0;
    }
}

void encode_batch(const Mat& X, int L, double sigma, Mat& out) {
    out.resize(X.rows, 2 * static_cast<std::size_t>(L) * X.cols);
    const std::int64_t m = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i) {
        const double* x = X.row(static_cast<std::size_t>(i));
        double* o = out.row(static_cast<std::size_t>(i));
        std::size_t t = 0;
        for (std::size_t j = 0; j < X.cols; ++j) {
            const double base = sigma * x[j];
            for (int k = 1; k <= L; ++k) {
                const double a = static_cast<double>(k) * base;
                o[t++] = std::sin(a);
                o[t++] = std::cos(a);
            }
        }
    }
}

namespace serial {

void gemm_nt(const Mat& A, const Mat& B, Mat& C) {
    assert(A.cols == B.cols);
    C.resize(A.rows, B.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* a = A.row(i);
        double* c = C.row(i);
        for (std::size_t j = 0; j < B.rows; ++j) {
            const double* b = B.row(j);
            double acc = 0.0;
            for (std::size_t t = 0; t < A.cols; ++t) acc += a[t] * b[t];
            c[j] = acc;
        }
    }
}

void gemm_nn(const Mat& A, const Mat& B, Mat& C) {
    assert(A.cols == B.rows);
    C.resize(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* a = A.row(i);
        double* c = C.row(i);
        for (std::size_t t = 0; t < A.cols; ++t) {
            const double av = a[t];
            const double* b = B.row(t);
            for (std::size_t j = 0; j < B.cols; ++j) c[j] += av * b[j];
        }
    }
}

void gemm_tn(const Mat& A, const Mat& B, Mat& C) {
    assert(A.rows == B.rows);
    C.resize(A.cols, B.cols);
    for (std::size_t a = 0; a < A.cols; ++a) {
        double* c = C.row(a);
        for (std::size_t i = 0; i < A.rows; ++i) {
            const double av = A.at(i, a);
            const double* b = B.row(i);
            for (std::size_t j = 0; j < B.cols; ++j) c[j] += av * b[j];
        }
    }
}

void add_bias_rows(Mat& X, const std::vector<double>& b) {
    assert(X.cols == b.size());
    for (std::size_t i = 0; i < X.rows; ++i) {
        double* x = X.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) x[j] += b[j];
    }
}

void col_sums(const Mat& X, std::vector<double>& out) {
    out.assign(X.cols, 0.0);
    for (std::size_t j = 0; j < X.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) acc += X.at(i, j);
        out[j] = acc;
    }
}

void batch_mean_var(const Mat& X, std::vector<double>& mean, std::vector<double>& var) {
    mean.assign(X.cols, 0.0);
    var.assign(X.cols, 0.0);
    const double inv = 1.0 / static_cast<double>(X.rows);
    for (std::size_t j = 0; j < X.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) s += X.at(i, j);
        const double mu = s * inv;
        double v = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) {
            const double d = X.at(i, j) - mu;
            v += d * d;
        }
        mean[j] = mu;
        var[j] = v * inv;
    }
}

void relu(Mat& X) {
    for (double& x : X.data) x = x > 0.0 ? x : 0.0;
}

void relu_backward(const Mat& preact, Mat& grad) {
    assert(preact.same_shape(grad));
    for (std::size_t i = 0; i < grad.data.size(); ++i)
        if (preact.data[i] <= 0.0) grad.data[i] = 0.0;
}

void encode_batch(const Mat& X, int L, double sigma, Mat& out) {
    out.resize(X.rows, 2 * static_cast<std::size_t>(L) * X.cols);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double* x = X.row(i);
        double* o = out.row(i);
        std::size_t t = 0;
        for (std::size_t j = 0; j < X.cols; ++j) {
            const double base = sigma * x[j];
            for (int k = 1; k <= L; ++k) {
                const double a = static_cast<double>(k) * base;
                o[t++] = std::sin(a);
                o[t++] = std::cos(a);
            }
        }
    }
}

}  // namespace serial
}  // namespace cspace::kern
