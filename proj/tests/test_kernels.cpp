#include <catch2/catch_amalgamated.hpp>

#include "weaksync/kernels.hpp"
#include "weaksync/rng.hpp"

using namespace weaksync;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = rng.uniform(-2.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("serial and parallel matvec agree bitwise", "[kernels]") {
    Rng rng(42);
    for (int size : {1, 7, 64, 95, 96, 97, 300}) {
        const Eigen::MatrixXd m = random_matrix(rng, size, size);
        const Eigen::MatrixXd x = random_matrix(rng, size, 1);
        const kernels::RowMajorMatrix rm(m);

        Eigen::VectorXd y_serial(size), y_parallel(size);
        kernels::matvec_serial(rm, x.data(), y_serial.data());
        kernels::matvec_parallel(rm, x.data(), y_parallel.data());
        for (int i = 0; i < size; ++i)
            REQUIRE(y_serial(i) == y_parallel(i));
    }
}

TEST_CASE("matvec matches Eigen to round-off", "[kernels]") {
    Rng rng(7);
    const Eigen::MatrixXd m = random_matrix(rng, 40, 40);
    const Eigen::VectorXd x = random_matrix(rng, 40, 1);
    const kernels::RowMajorMatrix rm(m);
    Eigen::VectorXd y(40);
    kernels::matvec(rm, x.data(), y.data(), kernels::ExecutionPolicy::Auto);
    REQUIRE((y - m * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("auto policy switches on the size threshold", "[kernels]") {
    const kernels::RowMajorMatrix small(Eigen::MatrixXd::Zero(8, 8));
    const kernels::RowMajorMatrix large(
        Eigen::MatrixXd::Zero(kernels::kParallelThreshold, kernels::kParallelThreshold));
    REQUIRE_FALSE(kernels::parallel_enabled(small, kernels::ExecutionPolicy::Auto));
    REQUIRE(kernels::parallel_enabled(large, kernels::ExecutionPolicy::Auto));
    REQUIRE(kernels::parallel_enabled(small, kernels::ExecutionPolicy::Parallel));
    REQUIRE_FALSE(kernels::parallel_enabled(large, kernels::ExecutionPolicy::Serial));
}
