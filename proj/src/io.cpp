#include "sac/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "sac/errors.hpp"

namespace sac {

namespace {

constexpr std::uint32_t kMagic = 0x46434153u;  // "SACF" little-endian

struct FieldHeader {
    std::uint32_t magic;
    std::uint32_t d;
    double T;
    std::uint32_t n_t;
    std::uint32_t n_x;
    std::uint64_t reserved;
};
static_assert(sizeof(FieldHeader) == 32);

}  // namespace

void write_field(const std::string& path, const GridField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    FieldHeader h{kMagic, static_cast<std::uint32_t>(f.spec().d), f.spec().T,
                  static_cast<std::uint32_t>(f.spec().n_t),
                  static_cast<std::uint32_t>(f.spec().n_x), 0};
    out.write(reinterpret_cast<const char*>(&h), sizeof(h));
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(sizeof(double) * f.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

GridField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    FieldHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || h.magic != kMagic) throw StructuralError("not a field file: " + path);
    GridSpec spec{static_cast<int>(h.d), h.T, static_cast<int>(h.n_t), static_cast<int>(h.n_x)};
    GridField f(spec);
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(sizeof(double) * f.size()));
    if (!in) throw StructuralError("truncated field file: " + path);
    return f;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field_csv(const std::string& path, const GridField& f, const std::vector<int>& slices) {
    const GridSpec& spec = f.spec();
    std::vector<std::string> cols = {"t", "x"};
    if (spec.d >= 2) cols.push_back("y");
    if (spec.d >= 3) cols.push_back("z");
    cols.push_back("value");
    CsvWriter csv(cols);

    std::vector<int> sel = slices;
    if (sel.empty())
        for (int i = 0; i < spec.n_t; ++i) sel.push_back(i);

    const int n = spec.n_x;
    const int ny = spec.d >= 2 ? n : 1;
    const int nz = spec.d >= 3 ? n : 1;
    for (int i : sel) {
        if (i < 0 || i >= spec.n_t) throw DomainError("slice index out of range");
        std::int64_t idx = 0;
        for (int jz = 0; jz < nz; ++jz)
            for (int jy = 0; jy < ny; ++jy)
                for (int jx = 0; jx < n; ++jx, ++idx) {
                    std::vector<double> row = {i * spec.dt(), jx * spec.dx()};
                    if (spec.d >= 2) row.push_back(jy * spec.dx());
                    if (spec.d >= 3) row.push_back(jz * spec.dx());
                    row.push_back(f.at(i, idx));
                    csv.add_row(row);
                }
    }
    csv.save(path);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw StructuralError("csv row width mismatch");
    rows_.push_back(cells);
}

void CsvWriter::add_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    add_row(s);
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        out += columns_[i];
        out += (i + 1 == columns_.size()) ? '\n' : ',';
    }
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            out += (i + 1 == row.size()) ? '\n' : ',';
        }
    }
    return out;
}

void CsvWriter::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << str();
}

}  // namespace sac
