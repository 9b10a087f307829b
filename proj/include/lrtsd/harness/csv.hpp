#pragma once

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace lrtsd::harness {

/// Fixed-format CSV table. Numbers are printed with a locale-independent
/// format so identical inputs give identical bytes.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    class Row {
    public:
        Row& add(const std::string& s);
        Row& add(const char* s) { return add(std::string(s)); }
        Row& add(double v);
        Row& add(long long v);
        Row& add(unsigned long long v);
        Row& add(int v) { return add(static_cast<long long>(v)); }
        Row& add(std::size_t v) { return add(static_cast<unsigned long long>(v)); }

    private:
        friend class CsvTable;
        std::vector<std::string> cells_;
    };

    Row& row();
    std::size_t size() const { return rows_.size(); }

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

/// Shortest round-trip representation ("%.17g" trimmed); NaN prints as "nan".
std::string format_number(double v);

}  // namespace lrtsd::harness
