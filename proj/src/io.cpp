#include "kcca/io.hpp"

#include "kcca/error.hpp"

#include <array>
#include <cmath>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kcca::io {

namespace {

constexpr const char* kModule = "io";
constexpr char kMagic[4] = {'C', 'M', 'D', 'X'};

std::ofstream open_out(const std::filesystem::path& path, const char* op,
                       std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw InputError(kModule, op, "cannot open " + path.string() + " for writing");
    return os;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
    auto os = open_out(path, "write_matrix_csv");
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    if (!header.empty()) os << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
        os << '\n';
    }
}

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v,
                      const std::string& column) {
    write_matrix_csv(path, v, {column});
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
    auto os = open_out(path, "write_labels_csv");
    os << "label\n";
    for (int l : labels) os << l << '\n';
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header) {
    std::ifstream is(path);
    if (!is) throw InputError(kModule, "read_matrix_csv", "cannot open " + path.string());
    std::vector<double> values;
    Eigen::Index cols = -1, rows = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> row(fields.size());
        bool ok = true;
        for (std::size_t j = 0; j < fields.size() && ok; ++j) ok = parse_double(fields[j], row[j]);
        if (!ok) {
            if (first) {
                if (header)
                    for (auto f : fields) header->emplace_back(trim(f));
                cols = static_cast<Eigen::Index>(fields.size());
                first = false;
                continue;
            }
            throw InputError(kModule, "read_matrix_csv",
                             path.string() + ":" + std::to_string(lineno) +
                                 ": malformed numeric field");
        }
        first = false;
        if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw InputError(kModule, "read_matrix_csv",
                             path.string() + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(cols) + " fields, found " +
                                 std::to_string(row.size()));
        for (double v : row)
            if (!std::isfinite(v))
                throw InputError(kModule, "read_matrix_csv",
                                 path.string() + ":" + std::to_string(lineno) +
                                     ": non-finite value");
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (cols < 0) cols = 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
    return m;
}

void write_pairs_csv(const std::filesystem::path& path, const TrajectoryPairs& pairs) {
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < pairs.x.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
    for (Eigen::Index j = 0; j < pairs.y.cols(); ++j) header.push_back("y" + std::to_string(j + 1));
    Eigen::MatrixXd m(pairs.size(), pairs.x.cols() + pairs.y.cols());
    m << pairs.x, pairs.y;
    write_matrix_csv(path, m, header);
}

TrajectoryPairs read_pairs_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const Eigen::MatrixXd m = read_matrix_csv(path, &header);
    if (header.empty())
        throw InputError(kModule, "read_pairs_csv",
                         path.string() + ":1: missing header x1,...,y1,...");
    Eigen::Index dx = 0, dy = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const auto& h = header[j];
        const char side = h.empty() ? '?' : h[0];
        const std::string expect =
            std::string(1, side) + std::to_string((side == 'x' ? dx : dy) + 1);
        if ((side != 'x' && side != 'y') || h != expect || (side == 'x' && dy > 0))
            throw InputError(kModule, "read_pairs_csv",
                             path.string() + ":1: unexpected header field '" + h + "'");
        (side == 'x' ? dx : dy) += 1;
    }
    if (dx == 0 || dy == 0)
        throw InputError(kModule, "read_pairs_csv", path.string() + ":1: need x and y columns");
    if (m.cols() != dx + dy)
        throw InputError(kModule, "read_pairs_csv", path.string() + ": column count mismatch");
    TrajectoryPairs p;
    p.x = m.leftCols(dx);
    p.y = m.rightCols(dy);
    return p;
}

void write_snapshot_binary(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    auto os = open_out(path, "write_snapshot_binary", std::ios::binary);
    const auto d = static_cast<std::uint32_t>(m.rows());
    const auto n = static_cast<std::uint32_t>(m.cols());
    const std::uint32_t pad = 0;
    os.write(kMagic, 4);
    os.write(reinterpret_cast<const char*>(&d), 4);
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&pad), 4);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    os.write(reinterpret_cast<const char*>(rm.data()),
             static_cast<std::streamsize>(sizeof(double) * rm.size()));
}

Eigen::MatrixXd read_snapshot_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError(kModule, "read_snapshot_file", "cannot open " + path.string());
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
        std::uint32_t d = 0, n = 0, pad = 0;
        is.read(reinterpret_cast<char*>(&d), 4);
        is.read(reinterpret_cast<char*>(&n), 4);
        is.read(reinterpret_cast<char*>(&pad), 4);
        if (!is) throw InputError(kModule, "read_snapshot_file", "truncated header");
        const auto expected = std::uintmax_t{16} + std::uintmax_t{8} * d * n;
        if (std::filesystem::file_size(path) != expected)
            throw InputError(kModule, "read_snapshot_file",
                             "file size does not match d=" + std::to_string(d) +
                                 ", n=" + std::to_string(n));
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(d, n);
        is.read(reinterpret_cast<char*>(rm.data()),
                static_cast<std::streamsize>(sizeof(double) * rm.size()));
        if (!rm.allFinite())
            throw InputError(kModule, "read_snapshot_file", "non-finite snapshot entry");
        return rm;
    }
    is.close();
    return read_matrix_csv(path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path, "write_text");
    os << text;
}

}  // namespace kcca::io
