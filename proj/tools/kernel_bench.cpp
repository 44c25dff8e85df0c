// Benchmarks the OpenMP kernels against the serial reference on shapes the
// training loop actually uses, and verifies bit-identical outputs while at
// it. Run with OMP_NUM_THREADS to control the parallel side.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cspace/kernels.hpp"
#include "cspace/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using cspace::Mat;

namespace {

Mat random_mat(std::size_t r, std::size_t c, std::uint64_t seed) {
    Mat m(r, c);
    cspace::Rng rng(seed);
    for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
    return m;
}

double time_best_of(const std::function<void()>& fn, int repeats = 5) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

struct Row {
    std::string name;
    double serial_s;
    double parallel_s;
    double gflops;
    bool bit_identical;
};

void report(const std::vector<Row>& rows) {
    std::printf("%-34s %12s %12s %9s %9s %s\n", "kernel", "serial (ms)", "openmp (ms)",
                "speedup", "GFLOP/s", "bitwise");
    for (const Row& r : rows)
        std::printf("%-34s %12.3f %12.3f %9.2f %9.2f %s\n", r.name.c_str(), r.serial_s * 1e3,
                    r.parallel_s * 1e3, r.serial_s / r.parallel_s,
                    r.gflops / r.parallel_s * 1e-9, r.bit_identical ? "ok" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t batch = 512;
    if (argc > 1) batch = static_cast<std::size_t>(std::stoul(argv[1]));
    // Shapes mirror the 14-DoF model: 42 features, L=12 encoding (1008),
    // width 256, skip concat input 1264.
    const std::size_t d = 42, e = 1008, H = 256, S = H + e;

#ifdef _OPENMP
    std::printf("openmp threads: %d, batch: %zu\n\n", omp_get_max_threads(), batch);
#else
    std::printf("built without openmp; both columns are serial. batch: %zu\n\n", batch);
#endif

    std::vector<Row> rows;
    const Mat X = random_mat(batch, e, 1);
    const Mat W = random_mat(H, e, 2);
    const Mat Xs = random_mat(batch, S, 3);
    const Mat Ws = random_mat(H, S, 4);
    const Mat dY = random_mat(batch, H, 5);
    const Mat F = random_mat(batch, d, 6);

    Mat a, b;
    auto add = [&](const std::string& name, double flops, const std::function<void()>& ser,
                   const std::function<void()>& par, const Mat& out_ser, const Mat& out_par) {
        Row r{name, time_best_of(ser), time_best_of(par), flops,
              out_ser.data == out_par.data};
        rows.push_back(r);
    };

    add("gemm_nt 512x1008 * 256x1008^T", 2.0 * batch * e * H,
        [&] { cspace::kern::serial::gemm_nt(X, W, a); },
        [&] { cspace::kern::gemm_nt(X, W, b); }, a, b);
    add("gemm_nt 512x1264 * 256x1264^T", 2.0 * batch * S * H,
        [&] { cspace::kern::serial::gemm_nt(Xs, Ws, a); },
        [&] { cspace::kern::gemm_nt(Xs, Ws, b); }, a, b);
    add("gemm_nn 512x256 * 256x1264", 2.0 * batch * H * S,
        [&] { cspace::kern::serial::gemm_nn(dY, Ws, a); },
        [&] { cspace::kern::gemm_nn(dY, Ws, b); }, a, b);
    add("gemm_tn (512x256)^T * 512x1264", 2.0 * batch * H * S,
        [&] { cspace::kern::serial::gemm_tn(dY, Xs, a); },
        [&] { cspace::kern::gemm_tn(dY, Xs, b); }, a, b);
    add("encode_batch 512x42 L=12", 24.0 * batch * d,
        [&] { cspace::kern::serial::encode_batch(F, 12, 1.0, a); },
        [&] { cspace::kern::encode_batch(F, 12, 1.0, b); }, a, b);

    std::vector<double> m1, v1, m2, v2;
    Row bn{"batch_mean_var 512x1264", 0.0, 0.0, 4.0 * batch * S, true};
    bn.serial_s = time_best_of([&] { cspace::kern::serial::batch_mean_var(Xs, m1, v1); });
    bn.parallel_s = time_best_of([&] { cspace::kern::batch_mean_var(Xs, m2, v2); });
    bn.bit_identical = m1 == m2 && v1 == v2;
    rows.push_back(bn);

    report(rows);
    bool ok = true;
    for (const Row& r : rows) ok = ok && r.bit_identical;
    return ok ? 0 : 1;
}
