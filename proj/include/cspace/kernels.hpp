#pragma once

#include <cstddef>
#include <vector>

#include "cspace/mat.hpp"

// Data-parallel compute kernels behind the model math. Each kernel exists
// twice: the OpenMP version used everywhere (namespace kern) and a plain-loop
// serial reference (namespace kern::serial) kept for testing and for the
// kernel benchmark. Both use the same per-element summation order, so their
// outputs are bit-identical for any thread count.

namespace cspace::kern {

// C[m x n] = A[m x k] * B[n x k]^T
void gemm_nt(const Mat& A, const Mat& B, Mat& C);
// C[m x n] = A[m x k] * B[k x n]
void gemm_nn(const Mat& A, const Mat& B, Mat& C);
// C[k x n] = A[m x k]^T * B[m x n]
void gemm_tn(const Mat& A, const Mat& B, Mat& C);

// X[i][j] += b[j]
void add_bias_rows(Mat& X, const std::vector<double>& b);
// out[j] = sum_i X[i][j]
void col_sums(const Mat& X, std::vector<double>& out);
// Per-column mean and biased variance over rows.
void batch_mean_var(const Mat& X, std::vector<double>& mean, std::vector<double>& var);

void relu(Mat& X);
// grad[i][j] = 0 where preact[i][j] <= 0 (subgradient at 0 is 0).
void relu_backward(const Mat& preact, Mat& grad);

// Sinusoidal expansion: for each input coordinate p and frequency
// k = 1..L, emit (sin(k*sigma*p), cos(k*sigma*p)); coordinate-major,
// frequency-minor. out is rows x (2*L*cols).
void encode_batch(const Mat& X, int L, double sigma, Mat& out);

namespace serial {
void gemm_nt(const Mat& A, const Mat& B, Mat& C);
void gemm_nn(const Mat& A, const Mat& B, Mat& C);
void gemm_tn(const Mat& A, const Mat& B, Mat& C);
void add_bias_rows(Mat& X, const std::vector<double>& b);
void col_sums(const Mat& X, std::vector<double>& out);
void batch_mean_var(const Mat& X, std::vector<double>& mean, std::vector<double>& var);
void relu(Mat& X);
void relu_backward(const Mat& preact, Mat& grad);
void encode_batch(const Mat& X, int L, double sigma, Mat& out);
}  // namespace serial

}  // namespace cspace::kern
