#pragma once

#include "sgm/simulate.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sgm::experiments {

/// %.17g; NumericError for NaN/inf so no table ever carries a non-finite cell.
std::string format_number(double value);
std::string format_number(std::size_t value);

/// Comma separated, header first, LF endings. Every row must match the header width.
class CsvWriter {
public:
    /// Creates parent directories. IoError if the file cannot be opened.
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

    void row(const std::vector<std::string>& cells);
    /// Flushes and checks the stream; IoError on failure.
    void close();

    std::size_t rows_written() const noexcept { return rows_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
    std::size_t rows_ = 0;
};

/// Samples table with columns x0 .. x{d-1}.
void write_samples(const std::filesystem::path& path, const SampleSet& samples);
/// Reads a table written by write_samples. IoError if missing or malformed.
SampleSet read_samples(const std::filesystem::path& path);

} // namespace sgm::experiments
