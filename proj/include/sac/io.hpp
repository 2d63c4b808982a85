#pragma once

#include <string>
#include <vector>

#include "sac/grid.hpp"

namespace sac {

/// Binary field dump: 32-byte header (magic "SACF", u32 d, f64 T, u32 n_t,
/// u32 n_x, 8 reserved bytes), then n_t * n_x^d little-endian doubles in
/// time-major order.
void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);

/// Long-format CSV export (t, x[, y[, z]], value), one row per node of the
/// selected time slices (all slices when the list is empty).
void write_field_csv(const std::string& path, const GridField& f,
                     const std::vector<int>& slices = {});

/// Minimal CSV table writer with deterministic %.17g number formatting.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    std::string str() const;
    void save(const std::string& path) const;

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

}  // namespace sac
