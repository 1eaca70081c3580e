#pragma once

#include <string>

#include <Eigen/Dense>

namespace rolesim {

// Square symmetric matrix CSV: "#dim n" header, then n comma-separated rows
// at round-trip precision. Loading checks finiteness and symmetry (within
// 1e-12 * max(1, Frobenius norm)).
void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

}  // namespace rolesim
