#include "spincav/harness/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace spincav::harness {

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("ResultTable: no columns");
}

std::size_t ResultTable::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) return i;
    throw std::invalid_argument("ResultTable: no column '" + name + "'");
}

std::vector<double> ResultTable::column(const std::string& name) const {
    const std::size_t c = index_of(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[c]);
    return out;
}

void ResultTable::add_row(std::vector<double> values) {
    if (values.size() != columns_.size())
        throw std::invalid_argument("ResultTable: row has " + std::to_string(values.size()) + " values, expected " +
                                    std::to_string(columns_.size()));
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("ResultTable: non-finite value");
    rows_.push_back(std::move(values));
}

void ResultTable::append(const ResultTable& other) {
    if (other.columns_ != columns_) throw std::invalid_argument("ResultTable: column mismatch on append");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

// Quote only when a field needs it.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string ResultTable::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += csv_field(columns_[i]);
    }
    out += '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_double(r[i]);
        }
        out += '\n';
    }
    return out;
}

void ResultTable::write_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_csv();
}

nlohmann::ordered_json Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["config_hash"] = config_hash;
    j["csv"] = csv_path;
    j["rows"] = rows;
    j["config"] = config;
    j["derived"] = derived;
    j["timings_s"] = timings;
    j["diagnostics"] = diagnostics;
    return j;
}

void Manifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_json().dump(2) << '\n';
}

}  // namespace spincav::harness
