#ifndef SLRD_TYPES_HPP
#define SLRD_TYPES_HPP

//
// common matrix/vector aliases and the error taxonomy shared by all
// slrd components
//

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slrd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// sorted, duplicate-free list of row or column indices
using IndexSet = std::vector<Index>;

//
// errors
//

// invalid argument values, malformed files, dimension mismatches
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// both screening sets must be nonempty when a positive rank is requested
class EmptyScreen : public std::runtime_error {
public:
    explicit EmptyScreen(const std::string& what) : std::runtime_error(what) {}
};

// the screened matrix has rank below the requested factor rank
class InitRankDeficient : public std::runtime_error {
public:
    explicit InitRankDeficient(const std::string& what) : std::runtime_error(what) {}
};

// thresholding wiped out so many rows that the factor lost full column rank
class RankCollapse : public std::runtime_error {
public:
    explicit RankCollapse(const std::string& what) : std::runtime_error(what) {}
};

} // namespace slrd

#endif
