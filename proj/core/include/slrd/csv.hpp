#ifndef SLRD_CSV_HPP
#define SLRD_CSV_HPP

//
// matrix persistence as plain CSV: one matrix row per line, values
// comma-separated, no header row
//

#include "slrd/types.hpp"

#include <iosfwd>
#include <string>

namespace slrd {

// parses a CSV matrix; throws InvalidInput on ragged rows, empty input,
// or entries that are not finite decimal literals
Matrix read_csv_matrix(std::istream& in);
Matrix read_csv_matrix_file(const std::string& path);

// writes with enough digits for an exact double round trip
void write_csv_matrix(std::ostream& out, const Matrix& matrix);
void write_csv_matrix_file(const std::string& path, const Matrix& matrix);

} // namespace slrd

#endif
