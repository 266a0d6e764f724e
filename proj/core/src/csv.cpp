#include "slrd/csv.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace slrd {

namespace {

double parse_entry(const std::string& token, std::size_t line_no)
{
    const char* begin = token.data();
    const char* end = begin + token.size();
    // tolerate surrounding blanks, e.g. "1.0, 2.0"
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end)
        throw InvalidInput("csv line " + std::to_string(line_no) +
                           ": cannot parse entry '" + token + "'");
    if (!std::isfinite(value))
        throw InvalidInput("csv line " + std::to_string(line_no) +
                           ": non-finite entry '" + token + "'");
    return value;
}

} // namespace

Matrix read_csv_matrix(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::vector<double> row;
        std::string token;
        std::stringstream fields(line);
        while (std::getline(fields, token, ','))
            row.push_back(parse_entry(token, line_no));
        if (line.back() == ',')
            throw InvalidInput("csv line " + std::to_string(line_no) + ": trailing comma");
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidInput("csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size()) + " entries, got " +
                               std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw InvalidInput("csv input holds no matrix rows");

    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < out.rows(); ++i)
        for (Index j = 0; j < out.cols(); ++j)
            out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return out;
}

Matrix read_csv_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open '" + path + "' for reading");
    return read_csv_matrix(in);
}

void write_csv_matrix(std::ostream& out, const Matrix& matrix)
{
    char buffer[64];
    for (Index i = 0; i < matrix.rows(); ++i) {
        for (Index j = 0; j < matrix.cols(); ++j) {
            const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, matrix(i, j));
            if (j > 0)
                out.put(',');
            out.write(buffer, ptr - buffer);
        }
        out.put('\n');
    }
}

void write_csv_matrix_file(const std::string& path, const Matrix& matrix)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("cannot open '" + path + "' for writing");
    write_csv_matrix(out, matrix);
    out.flush();
    if (!out)
        throw InvalidInput("write to '" + path + "' failed");
}

} // namespace slrd
