#include "linresp/matrix_io.hpp"

#include "linresp/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace linresp::io {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

SparseMatrix read_matrix(std::istream& in) {
    long long n = 0, nnz = 0;
    if (!(in >> n >> nnz) || n < 1 || nnz < 0)
        throw Error(ErrorKind::InvalidInput, "matrix header must be 'n nnz' with n >= 1");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
        long long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v))
            throw Error(ErrorKind::InvalidInput, "truncated matrix entry " + std::to_string(k + 1));
        if (i < 1 || j < 1 || i > n || j > n)
            throw Error(ErrorKind::InvalidInput, "matrix index out of range at entry " + std::to_string(k + 1));
        triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    }
    SparseMatrix m(static_cast<Index>(n), static_cast<Index>(n));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

SparseMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const SparseMatrix& m) {
    out << m.rows() << ' ' << m.nonZeros() << '\n';
    for (Index j = 0; j < m.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(m, j); it; ++it)
            out << it.row() + 1 << ' ' << j + 1 << ' ' << format_double(it.value()) << '\n';
}

void write_matrix(const std::filesystem::path& path, const SparseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
    write_matrix(out, m);
}

Vector read_vector(std::istream& in) {
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        double v = 0.0;
        if (ss >> v)
            values.push_back(v);
        else if (line.find_first_not_of(" \t\r") != std::string::npos)
            throw Error(ErrorKind::InvalidInput, "unparsable vector line '" + line + "'");
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

Vector read_vector(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
    return read_vector(in);
}

void write_vector(std::ostream& out, const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
    write_vector(out, v);
}

}  // namespace linresp::io
