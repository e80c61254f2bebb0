#include "weaksync/kernel_structure.hpp"

#include "weaksync/errors.hpp"

#include <numeric>
#include <string>

namespace weaksync {

Eigen::MatrixXd beta_coefficients(const CanonicalLaplacian& cl) {
    const int k = cl.k();
    const int m0 = cl.m0();
    if (m0 == 0)
        return Eigen::MatrixXd(0, k);

    Eigen::MatrixXd rhs(m0, k);
    for (int i = 0; i < k; ++i)
        rhs.col(i) = -cl.coupling(i) * Eigen::VectorXd::Ones(cl.basic_sizes()[i]);

    const Eigen::MatrixXd grounded = cl.grounded();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(grounded);
    Eigen::MatrixXd beta = lu.solve(rhs);

    const double residual = (grounded * beta - rhs).cwiseAbs().maxCoeff();
    if (residual > 1e-8)
        throw StructuralError("grounded-block solve residual " + std::to_string(residual) +
                              " exceeds 1e-8; L0 is singular, decomposition bug");

    for (int j = 0; j < beta.rows(); ++j) {
        for (int i = 0; i < beta.cols(); ++i) {
            double& b = beta(j, i);
            if (b < 0.0) {
                if (b > -kSupportTolerance)
                    b = 0.0;
                else
                    throw StructuralError("beta(" + std::to_string(j + 1) + "," +
                                          std::to_string(i + 1) + ") = " + std::to_string(b) +
                                          " is negative beyond round-off");
            }
        }
    }
    return beta;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& beta, int m0,
                             const std::vector<int>& basic_sizes) {
    const int k = static_cast<int>(basic_sizes.size());
    const int n = m0 + std::accumulate(basic_sizes.begin(), basic_sizes.end(), 0);
    if (beta.rows() != m0 || (m0 > 0 && beta.cols() != k))
        throw ValidationError("beta is " + std::to_string(beta.rows()) + "x" +
                              std::to_string(beta.cols()) + ", expected " + std::to_string(m0) +
                              "x" + std::to_string(k));
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, k);
    if (m0 > 0)
        basis.topRows(m0) = beta;
    int off = m0;
    for (int i = 0; i < k; ++i) {
        basis.block(off, i, basic_sizes[i], 1).setOnes();
        off += basic_sizes[i];
    }
    return basis;
}

Eigen::MatrixXd mixing_matrix(const Eigen::MatrixXd& beta,
                              const std::vector<int>& basic_sizes) {
    const int k = static_cast<int>(basic_sizes.size());
    const int m0 = static_cast<int>(beta.rows());
    const int total = std::accumulate(basic_sizes.begin(), basic_sizes.end(), 0);
    Eigen::MatrixXd b(m0, total);
    int off = 0;
    for (int i = 0; i < k; ++i) {
        const double inv = 1.0 / basic_sizes[i];
        for (int j = 0; j < m0; ++j)
            b.block(j, off, 1, basic_sizes[i]).setConstant(beta(j, i) * inv);
        off += basic_sizes[i];
    }
    return b;
}

KernelStructure compute_kernel_structure(const CanonicalLaplacian& cl) {
    KernelStructure ks;
    ks.m0 = cl.m0();
    ks.basic_sizes = cl.basic_sizes();
    ks.beta = beta_coefficients(cl);
    ks.kernel_basis = kernel_basis(ks.beta, ks.m0, ks.basic_sizes);
    return ks;
}

ScaledReduction scaled_reduction(const LaplacianMatrix& L, const BicomponentDecomposition& d,
                                 const KernelStructure& ks, int i) {
    if (i < 0 || i >= ks.k())
        throw ValidationError("basic component index " + std::to_string(i + 1) +
                              " out of range 1.." + std::to_string(ks.k()));

    ScaledReduction red;
    red.bicomponent = i;

    const Eigen::VectorXd column = ks.kernel_basis.col(i);
    const double ambiguous_below = rank_tolerance(column.cwiseAbs().maxCoeff());
    std::vector<double> gamma_entries;
    for (int pos = 0; pos < column.size(); ++pos) {
        const double g = column(pos);
        if (g > kSupportTolerance) {
            if (g <= ambiguous_below)
                throw StructuralError("kernel entry " + std::to_string(g) + " at position " +
                                      std::to_string(pos + 1) +
                                      " is above the support threshold but below the rank "
                                      "tolerance; ambiguous support");
            red.support.push_back(d.canonical_order[pos]);
            gamma_entries.push_back(g);
        }
    }

    const int ni = static_cast<int>(red.support.size());
    red.gamma = Eigen::Map<Eigen::VectorXd>(gamma_entries.data(), ni);
    red.sub_laplacian.resize(ni, ni);
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c)
            red.sub_laplacian(r, c) = L.matrix()(red.support[r], red.support[c]);

    red.reduced.resize(ni, ni);
    for (int r = 0; r < ni; ++r)
        for (int c = 0; c < ni; ++c)
            red.reduced(r, c) = red.sub_laplacian(r, c) * red.gamma(c) / red.gamma(r);
    return red;
}

} // namespace weaksync
