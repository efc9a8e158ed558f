#include "sgm/experiments/csv.hpp"

#include "sgm/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace sgm::experiments {

std::string format_number(double value)
{
    if (!std::isfinite(value)) throw NumericError("refusing to write a non-finite value to CSV");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_number(std::size_t value)
{
    return std::to_string(value);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), width_(header.size())
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    // binary keeps LF endings on every platform
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path.string());
    row(header);
    rows_ = 0;
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (cells.size() != width_) {
        throw std::logic_error("CSV row width " + std::to_string(cells.size()) + " != header width " +
                               std::to_string(width_) + " in " + path_.string());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    ++rows_;
}

void CsvWriter::close()
{
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_.string());
    out_.close();
}

void write_samples(const std::filesystem::path& path, const SampleSet& samples)
{
    std::vector<std::string> header;
    for (std::size_t j = 0; j < samples.dim; ++j) header.push_back("x" + std::to_string(j));
    CsvWriter csv(path, header);
    std::vector<std::string> cells(samples.dim);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        for (std::size_t j = 0; j < samples.dim; ++j) cells[j] = format_number(samples.values[i * samples.dim + j]);
        csv.row(cells);
    }
    csv.close();
}

SampleSet read_samples(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing sample file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw IoError("empty sample file " + path.string());

    SampleSet out;
    out.dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream cells(line);
        std::string cell;
        std::size_t n = 0;
        while (std::getline(cells, cell, ',')) {
            errno = 0;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            out.values.push_back(v);
            ++n;
        }
        if (n != out.dim) throw IoError(path.string() + ":" + std::to_string(line_no) + ": wrong column count");
    }
    if (out.rows() == 0) throw IoError("no samples in " + path.string());
    return out;
}

} // namespace sgm::experiments
