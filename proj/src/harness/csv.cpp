#include "lrtsd/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lrtsd/harness/tensor_file.hpp"

namespace lrtsd::harness {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvTable::Row& CsvTable::Row::add(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        cells_.push_back(s);
    } else {
        std::string quoted = "\"";
        for (char ch : s) {
            if (ch == '"') quoted += '"';
            quoted += ch;
        }
        quoted += '"';
        cells_.push_back(std::move(quoted));
    }
    return *this;
}

CsvTable::Row& CsvTable::Row::add(double v) {
    cells_.push_back(format_number(v));
    return *this;
}

CsvTable::Row& CsvTable::Row::add(long long v) {
    cells_.push_back(std::to_string(v));
    return *this;
}

CsvTable::Row& CsvTable::Row::add(unsigned long long v) {
    cells_.push_back(std::to_string(v));
    return *this;
}

CsvTable::Row& CsvTable::row() { return rows_.emplace_back(); }

std::string CsvTable::str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) {
        if (r.cells_.size() != header_.size()) throw std::logic_error("csv: row width does not match header");
        emit(r.cells_);
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << str();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace lrtsd::harness
