#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cspace/kernels.hpp"
#include "cspace/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using cspace::Mat;
namespace kern = cspace::kern;

namespace {

Mat random_mat(std::size_t r, std::size_t c, std::uint64_t seed) {
    Mat m(r, c);
    cspace::Rng rng(seed);
    for (double& v : m.data) v = rng.uniform(-2.0, 2.0);
    return m;
}

// Textbook triple loop, kept independent of the kernel implementations.
Mat naive_mul(const Mat& A, const Mat& B, bool a_t, bool b_t) {
    const std::size_t m = a_t ? A.cols : A.rows;
    const std::size_t k = a_t ? A.rows : A.cols;
    const std::size_t n = b_t ? B.rows : B.cols;
    Mat C(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t) {
                const double a = a_t ? A.at(t, i) : A.at(i, t);
                const double b = b_t ? B.at(j, t) : B.at(t, j);
                acc += a * b;
            }
            C.at(i, j) = acc;
        }
    return C;
}

}  // namespace

TEST_CASE("gemm variants match a naive reference") {
    const Mat A = random_mat(17, 23, 1);
    const Mat B = random_mat(11, 23, 2);
    const Mat C = random_mat(23, 13, 3);
    const Mat D = random_mat(17, 9, 4);

    Mat out;
    kern::gemm_nt(A, B, out);
    Mat ref = naive_mul(A, B, false, true);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-13));

    kern::gemm_nn(A, C, out);
    ref = naive_mul(A, C, false, false);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-13));

    kern::gemm_tn(A, D, out);
    ref = naive_mul(A, D, true, false);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-13));
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Mat A = random_mat(33 + seed, 57, 100 + seed);
        const Mat B = random_mat(21, 57, 200 + seed);
        const Mat C = random_mat(57, 19, 300 + seed);

        Mat p, s;
        kern::gemm_nt(A, B, p);
        kern::serial::gemm_nt(A, B, s);
        CHECK(p.data == s.data);

        kern::gemm_nn(A, C, p);
        kern::serial::gemm_nn(A, C, s);
        CHECK(p.data == s.data);

        kern::gemm_tn(A, A, p);
        kern::serial::gemm_tn(A, A, s);
        CHECK(p.data == s.data);

        std::vector<double> m1, v1, m2, v2;
        kern::batch_mean_var(A, m1, v1);
        kern::serial::batch_mean_var(A, m2, v2);
        CHECK(m1 == m2);
        CHECK(v1 == v2);

        kern::col_sums(A, m1);
        kern::serial::col_sums(A, m2);
        CHECK(m1 == m2);

        kern::encode_batch(A, 3, 0.7, p);
        kern::serial::encode_batch(A, 3, 0.7, s);
        CHECK(p.data == s.data);

        Mat r1 = A, r2 = A;
        kern::relu(r1);
        kern::serial::relu(r2);
        CHECK(r1.data == r2.data);

        Mat g1 = B, g2 = B;
        const Mat pre = random_mat(21, 57, 400 + seed);
        kern::relu_backward(pre, g1);
        kern::serial::relu_backward(pre, g2);
        CHECK(g1.data == g2.data);
    }
}

#ifdef _OPENMP
TEST_CASE("kernel output does not depend on the thread count") {
    const Mat A = random_mat(64, 96, 7);
    const Mat B = random_mat(48, 96, 8);
    const int saved = omp_get_max_threads();
    Mat one, many;
    omp_set_num_threads(1);
    kern::gemm_nt(A, B, one);
    omp_set_num_threads(saved > 1 ? saved : 2);
    kern::gemm_nt(A, B, many);
    omp_set_num_threads(saved);
    CHECK(one.data == many.data);
}
#endif

TEST_CASE("batch_mean_var computes biased column statistics") {
    Mat X(4, 2);
    const double col0[4] = {1.0, 2.0, 3.0, 4.0};
    const double col1[4] = {-1.0, -1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < 4; ++i) {
        X.at(i, 0) = col0[i];
        X.at(i, 1) = col1[i];
    }
    std::vector<double> mean, var;
    kern::batch_mean_var(X, mean, var);
    CHECK(mean[0] == doctest::Approx(2.5));
    CHECK(mean[1] == doctest::Approx(0.0));
    CHECK(var[0] == doctest::Approx(1.25));  // biased: sum of squares / n
    CHECK(var[1] == doctest::Approx(1.0));
}
