#include "dreg/csvio.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace dreg {

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::string path)
    : path_(std::move(path)), tmp_(path_ + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + tmp_ + "' for writing");
    buf_.reserve(1 << 16);
}

CsvWriter::~CsvWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void CsvWriter::put(const std::string& s) {
    if (row_open_) buf_ += ',';
    row_open_ = true;
    buf_ += s;
    if (buf_.size() >= (1 << 16)) {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }
}

void CsvWriter::field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") != std::string::npos) {
        throw IoError("csv field would need quoting: '" + s + "'");
    }
    put(s);
}

void CsvWriter::field(const char* s) { field(std::string(s)); }

void CsvWriter::field(double x) { put(format_double(x)); }

void CsvWriter::field(std::int64_t x) { put(std::to_string(x)); }

void CsvWriter::field(std::uint64_t x) { put(std::to_string(x)); }

void CsvWriter::end_row() {
    buf_ += '\n';
    row_open_ = false;
}

void CsvWriter::commit() {
    if (committed_) return;
    if (row_open_) end_row();
    if (!buf_.empty()) {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }
    out_.flush();
    if (!out_) throw IoError("failed writing '" + tmp_ + "'");
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw IoError("cannot rename '" + tmp_ + "' to '" + path_ + "': " + ec.message());
    committed_ = true;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size()) {
                throw IoError("'" + path + "': row " + std::to_string(table.rows.size() + 2) +
                              " has " + std::to_string(cells.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
            }
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw IoError("'" + path + "' is empty");
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return i;
    }
    throw IoError("missing csv column '" + name + "'");
}

double parse_csv_double(const std::string& cell, const std::string& context) {
    double out = 0.0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e) {
        throw IoError(context + ": expected a number, got '" + cell + "'");
    }
    return out;
}

std::uint64_t parse_csv_uint(const std::string& cell, const std::string& context) {
    std::uint64_t out = 0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc() || res.ptr != e) {
        throw IoError(context + ": expected an integer, got '" + cell + "'");
    }
    return out;
}

}  // namespace dreg
