#include "weaksync/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace weaksync::kernels {

RowMajorMatrix::RowMajorMatrix(const Eigen::MatrixXd& m)
    : rows(static_cast<int>(m.rows())), cols(static_cast<int>(m.cols())),
      data(static_cast<std::size_t>(rows) * cols) {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            data[static_cast<std::size_t>(i) * cols + j] = m(i, j);
}

void matvec_serial(const RowMajorMatrix& m, const double* x, double* y) {
    for (int i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        double acc = 0.0;
        for (int j = 0; j < m.cols; ++j)
            acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_parallel(const RowMajorMatrix& m, const double* x, double* y) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        double acc = 0.0;
        for (int j = 0; j < m.cols; ++j)
            acc += row[j] * x[j];
        y[i] = acc;
    }
}

bool parallel_enabled(const RowMajorMatrix& m, ExecutionPolicy policy) {
    switch (policy) {
    case ExecutionPolicy::Serial:
        return false;
    case ExecutionPolicy::Parallel:
        return true;
    case ExecutionPolicy::Auto:
        return m.rows >= kParallelThreshold;
    }
    return false;
}

void matvec(const RowMajorMatrix& m, const double* x, double* y, ExecutionPolicy policy) {
    if (parallel_enabled(m, policy))
        matvec_parallel(m, x, y);
    else
        matvec_serial(m, x, y);
}

} // namespace weaksync::kernels
