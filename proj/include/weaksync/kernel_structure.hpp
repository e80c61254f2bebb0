#pragma once

#include "weaksync/graph.hpp"

#include <Eigen/Dense>
#include <vector>

namespace weaksync {

/// Entries of the kernel basis below this are treated as structural zeros.
inline constexpr double kSupportTolerance = 1e-12;

/// Nullspace structure of a Laplacian in canonical node order. Column i of
/// kernel_basis restricted to the non-basic block is beta.col(i); restricted
/// to basic block j it is the all-ones vector when j == i and zero otherwise.
/// Each beta row is a convex combination: nonnegative, summing to one.
struct KernelStructure {
    Eigen::MatrixXd beta;         ///< m0 x k
    Eigen::MatrixXd kernel_basis; ///< n x k, canonical node order
    int m0 = 0;
    std::vector<int> basic_sizes;

    int k() const { return static_cast<int>(basic_sizes.size()); }
};

/// Solves the grounded block for the convex-combination coefficients:
/// column i satisfies L0 * beta_i = -L0i * 1. Empty (0 x k) when m0 == 0.
/// Raises StructuralError if the solve residual exceeds 1e-8 or an entry is
/// negative beyond -1e-12 (either means the decomposition is broken);
/// round-off negatives above -1e-12 are clamped to zero.
Eigen::MatrixXd beta_coefficients(const CanonicalLaplacian& cl);

/// Stacks [beta; blockdiag(1_M1, ..., 1_Mk)] in canonical node order.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& beta, int m0,
                             const std::vector<int>& basic_sizes);

/// m0 x (M1+...+Mk) matrix whose row j concatenates beta(j,i)/Mi * 1^T
/// blocks. Every kernel vector v = (v0, vb) satisfies -v0 + B vb = 0.
Eigen::MatrixXd mixing_matrix(const Eigen::MatrixXd& beta,
                              const std::vector<int>& basic_sizes);

/// Convenience bundle of the three computations above.
KernelStructure compute_kernel_structure(const CanonicalLaplacian& cl);

/// Restriction of L to the support of kernel-basis column i, rescaled by the
/// kernel entries into a zero-row-sum Laplacian of rank Ni - 1.
struct ScaledReduction {
    int bicomponent = 0;           ///< 0-based basic component index
    std::vector<int> support;      ///< original node ids, canonical order
    Eigen::VectorXd gamma;         ///< kernel entries on the support, all > 0
    Eigen::MatrixXd sub_laplacian; ///< L restricted to the support
    Eigen::MatrixXd reduced;       ///< diag(gamma)^-1 * sub_laplacian * diag(gamma)
};

ScaledReduction scaled_reduction(const LaplacianMatrix& L, const BicomponentDecomposition& d,
                                 const KernelStructure& ks, int i);

} // namespace weaksync
