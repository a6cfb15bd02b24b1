// Small dense complex determinants.
#pragma once

#include <Eigen/Dense>

#include <complex>

namespace snake {

using MatrixC = Eigen::MatrixXcd;

inline std::complex<double> determinant(const MatrixC& m) {
    if (m.rows() == 0) return {1.0, 0.0};
    return m.partialPivLu().determinant();
}

} // namespace snake
