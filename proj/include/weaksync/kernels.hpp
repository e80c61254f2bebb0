#pragma once

#include <Eigen/Dense>
#include <vector>

namespace weaksync::kernels {

enum class ExecutionPolicy {
    Serial,   ///< reference single-thread kernels
    Parallel, ///< OpenMP kernels
    Auto      ///< parallel kernels for systems large enough to pay for fork/join
};

/// Row count at which Auto switches to the OpenMP kernels.
inline constexpr int kParallelThreshold = 96;

/// Row-major snapshot of a dense matrix. The stepping loops walk rows
/// contiguously, which the default column-major Eigen layout would not give.
struct RowMajorMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    RowMajorMatrix() = default;
    explicit RowMajorMatrix(const Eigen::MatrixXd& m);

    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
};

// y = M x. Both variants accumulate each row left to right, so their results
// are bitwise identical; the parallel kernel only splits rows across threads.
void matvec_serial(const RowMajorMatrix& m, const double* x, double* y);
void matvec_parallel(const RowMajorMatrix& m, const double* x, double* y);
void matvec(const RowMajorMatrix& m, const double* x, double* y, ExecutionPolicy policy);

bool parallel_enabled(const RowMajorMatrix& m, ExecutionPolicy policy);

} // namespace weaksync::kernels
