#include "elsh/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace elsh {

namespace {

constexpr char kDataMagic[8] = {'E', 'L', 'S', 'H', 'D', 'A', 'T', 'A'};
constexpr char kQueryMagic[8] = {'E', 'L', 'S', 'H', 'Q', 'U', 'R', 'Y'};
constexpr std::uint64_t kVersion = 1;

void write_u64(std::ofstream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

struct Reader {
    std::ifstream in;
    std::string path;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw FormatError("cannot open " + p);
    }
    void raw(void* dst, std::size_t bytes) {
        in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (in.gcount() != static_cast<std::streamsize>(bytes))
            throw FormatError("truncated file: " + path);
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    void expect_magic(const char (&magic)[8]) {
        char buf[8];
        raw(buf, 8);
        if (std::memcmp(buf, magic, 8) != 0)
            throw FormatError("bad magic bytes in " + path);
    }
};

}  // namespace

void save_points(const PointSet& points, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(kDataMagic, 8);
    write_u64(out, kVersion);
    write_u64(out, points.size());
    write_u64(out, points.dim());
    out.write(reinterpret_cast<const char*>(points.data().data()),
              static_cast<std::streamsize>(points.data().size() * sizeof(double)));
    if (!out) throw FormatError("write failed: " + path);
}

PointSet load_points(const std::string& path) {
    Reader r(path);
    r.expect_magic(kDataMagic);
    const std::uint64_t version = r.u64();
    if (version != kVersion)
        throw FormatError("unsupported dataset version " + std::to_string(version));
    const std::uint64_t n = r.u64(), d = r.u64();
    if (d == 0 || n * d > (1ull << 33))
        throw FormatError("implausible dataset shape in " + path);
    PointSet points(n, d);
    r.raw(points.data().data(), n * d * sizeof(double));
    return points;
}

PointSet load_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    PointSet points;
    std::string line;
    std::vector<double> row;
    bool first_content_line = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        row.clear();
        std::stringstream ss(line);
        std::string cell;
        bool parse_failed = false;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            while (end && *end == ' ') ++end;
            if (end == cell.c_str() || (end && *end != '\0' && *end != '\r')) {
                parse_failed = true;
                break;
            }
            row.push_back(v);
        }
        if (parse_failed) {
            if (first_content_line) {  // header row
                first_content_line = false;
                continue;
            }
            throw FormatError(path + ":" + std::to_string(lineno) + ": not a number");
        }
        if (row.empty()) continue;
        if (points.empty() && points.dim() == 0) {
            points = PointSet::with_dim(row.size());
        } else if (row.size() != points.dim()) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(points.dim()) + " columns, got " +
                              std::to_string(row.size()));
        }
        points.append(row.data());
        first_content_line = false;
    }
    if (points.empty()) throw FormatError(path + ": no data rows");
    return points;
}

PointSet load_points_any(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return load_points_csv(path);
    return load_points(path);
}

void save_queries(const QuerySet& qs, const std::string& path) {
    if (qs.true_ids.size() != qs.queries.size() || qs.true_dists.size() != qs.queries.size())
        throw std::invalid_argument("save_queries: ground-truth arrays must match query count");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    out.write(kQueryMagic, 8);
    write_u64(out, kVersion);
    write_u64(out, qs.queries.size());
    write_u64(out, qs.queries.dim());
    write_f64(out, qs.r);
    write_f64(out, qs.c);
    out.write(reinterpret_cast<const char*>(qs.queries.data().data()),
              static_cast<std::streamsize>(qs.queries.data().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(qs.true_ids.data()),
              static_cast<std::streamsize>(qs.true_ids.size() * sizeof(std::int64_t)));
    out.write(reinterpret_cast<const char*>(qs.true_dists.data()),
              static_cast<std::streamsize>(qs.true_dists.size() * sizeof(double)));
    if (!out) throw FormatError("write failed: " + path);
}

QuerySet load_queries(const std::string& path) {
    Reader r(path);
    r.expect_magic(kQueryMagic);
    const std::uint64_t version = r.u64();
    if (version != kVersion)
        throw FormatError("unsupported query-set version " + std::to_string(version));
    const std::uint64_t m = r.u64(), d = r.u64();
    if (d == 0 || m * d > (1ull << 33))
        throw FormatError("implausible query-set shape in " + path);
    QuerySet qs;
    qs.r = r.f64();
    qs.c = r.f64();
    qs.queries = PointSet(m, d);
    r.raw(qs.queries.data().data(), m * d * sizeof(double));
    qs.true_ids.resize(m);
    r.raw(qs.true_ids.data(), m * sizeof(std::int64_t));
    qs.true_dists.resize(m);
    r.raw(qs.true_dists.data(), m * sizeof(double));
    return qs;
}

}  // namespace elsh
