// Compares the serial reference fit against the OpenMP fit on synthetic
// two-dimensional covariate data and reports timings plus the maximum
// deviation between the two cdf matrices.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "icl/icl_fit.hpp"
#include "icl/rng.hpp"
#include "icl/space.hpp"

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Problem {
    icl::FiniteSpace space;
    icl::Preorder order;
    std::vector<double> y;
};

Problem make_problem(int n, std::uint64_t seed) {
    icl::Rng rng(seed);
    icl::CovariateTable t;
    t.rows = n;
    t.cols = 2;
    t.data.resize(static_cast<std::size_t>(n) * 2);
    for (auto& v : t.data) v = rng.uniform(0.0, 1.0);
    Problem p;
    p.space = icl::FiniteSpace::uniform(n);
    p.order = icl::preorder_from_covariates(t);
    p.y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        p.y[static_cast<std::size_t>(i)] = t.at(i, 0) + t.at(i, 1) + rng.uniform(-0.3, 0.3);
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> sizes{200, 400, 800};
    if (argc > 1) {
        sizes.clear();
        for (int a = 1; a < argc; ++a) sizes.push_back(std::atoi(argv[a]));
    }
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    {
        // warm up the thread pool so small sizes are not charged for it
        const Problem warm = make_problem(64, 3);
        (void)icl::icl_fit(warm.space, warm.order, warm.y);
    }
    std::printf("%8s %12s %12s %9s %12s\n", "n", "serial (s)", "parallel (s)", "speedup", "max |diff|");
    for (int n : sizes) {
        const Problem p = make_problem(n, 7);
        double t0 = now_seconds();
        const icl::IclFit serial = icl::icl_fit_serial(p.space, p.order, p.y);
        double t1 = now_seconds();
        const icl::IclFit parallel = icl::icl_fit(p.space, p.order, p.y);
        double t2 = now_seconds();
        double diff = 0.0;
        for (std::size_t i = 0; i < serial.cdf.size(); ++i)
            diff = std::max(diff, std::abs(serial.cdf[i] - parallel.cdf[i]));
        std::printf("%8d %12.3f %12.3f %9.2f %12.3g\n", n, t1 - t0, t2 - t1,
                    (t1 - t0) / (t2 - t1 > 0 ? t2 - t1 : 1e-9), diff);
    }
    return 0;
}
