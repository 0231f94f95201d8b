#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "dreg/core.hpp"

namespace dreg {

// shortest decimal form that round-trips the double
std::string format_double(double x);

// Row-oriented CSV writer with atomic commit: everything is buffered into
// '<path>.tmp' and renamed over the target by commit(). Destroying an
// uncommitted writer removes the partial file, so consumers never observe a
// half-written CSV. Fields must not contain separators; this writer refuses
// them instead of quoting.
class CsvWriter {
  public:
    explicit CsvWriter(std::string path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void field(const std::string& s);
    void field(const char* s);
    void field(double x);
    void field(std::int64_t x);
    void field(std::uint64_t x);
    void end_row();
    void commit();
    const std::string& path() const { return path_; }

  private:
    void put(const std::string& s);

    std::string path_;
    std::string tmp_;
    std::string buf_;
    std::ofstream out_;
    bool row_open_ = false;
    bool committed_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads a CSV produced by this harness: no quoting, '\n' rows, header first.
CsvTable read_csv(const std::string& path);

// header lookup; throws IoError naming the missing column
std::size_t column_index(const CsvTable& table, const std::string& name);

double parse_csv_double(const std::string& cell, const std::string& context);
std::uint64_t parse_csv_uint(const std::string& cell, const std::string& context);

}  // namespace dreg
