#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace spincav::harness {

inline constexpr const char* kVersion = "1.0.0";

// Rectangular table of finite reals.
class ResultTable {
public:
    explicit ResultTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t n_rows() const { return rows_.size(); }
    std::size_t n_cols() const { return columns_.size(); }
    const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }
    std::vector<double> column(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;

    // Throws std::invalid_argument on width mismatch or non-finite values.
    void add_row(std::vector<double> values);
    void append(const ResultTable& other);

    // Header row, shortest round-trip decimal representation, LF line endings.
    std::string to_csv() const;
    void write_csv(const std::string& path) const;

    // Provenance carried into the manifest.
    std::string config_hash;
    std::string version = kVersion;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

std::string format_double(double value);

// Output of one scenario run.
struct RunResult {
    explicit RunResult(ResultTable t) : table(std::move(t)) {}

    ResultTable table;
    nlohmann::ordered_json derived = nlohmann::ordered_json::object();
    std::vector<std::string> diagnostics;
};

struct Manifest {
    nlohmann::ordered_json config;
    nlohmann::ordered_json derived;
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    std::vector<std::string> diagnostics;
    std::string config_hash;
    std::string csv_path;
    std::size_t rows = 0;

    nlohmann::ordered_json to_json() const;
    void write(const std::string& path) const;
};

}  // namespace spincav::harness
