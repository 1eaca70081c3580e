#include "rolesim/matrix_io.hpp"

#include <cmath>
#include <fstream>

#include "rolesim/detail/text.hpp"
#include "rolesim/errors.hpp"

namespace rolesim {

void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("matrix CSV stores square matrices only");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "#dim " << m.rows() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << detail::fmt_double(m(i, j));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::string_view header = detail::trim_cr(line);
    if (header.substr(0, 5) != "#dim ")
        throw IoError(path + ":1: expected \"#dim n\" header");
    auto n = detail::parse_int(header.substr(5));
    if (!n || *n < 0) throw IoError(path + ":1: malformed dimension");
    Eigen::MatrixXd m(*n, *n);
    for (long long i = 0; i < *n; ++i) {
        if (!std::getline(in, line)) throw IoError(path + ": truncated matrix");
        auto fields = detail::split(detail::trim_cr(line), ',');
        if (static_cast<long long>(fields.size()) != *n)
            throw IoError(path + ":" + std::to_string(i + 2) + ": expected " +
                          std::to_string(*n) + " values");
        for (long long j = 0; j < *n; ++j) {
            auto v = detail::parse_double(fields[static_cast<std::size_t>(j)]);
            if (!v || !std::isfinite(*v))
                throw IoError(path + ":" + std::to_string(i + 2) + ": malformed value");
            m(i, j) = *v;
        }
    }
    const double tol = 1e-12 * std::max(1.0, m.norm());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol)
                throw IoError(path + ": matrix is not symmetric");
    return m;
}

}  // namespace rolesim
