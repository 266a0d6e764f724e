#ifndef SLRD_THRESHOLDING_HPP
#define SLRD_THRESHOLDING_HPP

//
// scalar thresholding rules and the row-wise rule they induce
//
// Every rule eta satisfies the same contract at level t >= 0:
//   eta(x, t) = 0        whenever |x| <= t (boundary inclusive), and
//   |eta(x, t) - x| <= t otherwise.
// Hard keeps surviving values unchanged; soft shrinks by t; SCAD and MCP
// interpolate between the two with a continuous taper.
//

#include "slrd/types.hpp"

namespace slrd {

enum class ThresholdRule { Hard, Soft, Scad, Mcp };

struct ThresholdSpec {
    ThresholdRule rule = ThresholdRule::Hard;
    double scad_a = 3.7;  // SCAD taper width, must exceed 2
    double mcp_b = 3.0;   // MCP taper width, must exceed 1
};

// throws InvalidInput when the taper parameter of the selected rule is
// out of range
void validate(const ThresholdSpec& spec);

ThresholdRule parse_threshold_rule(const std::string& name);
const char* threshold_rule_name(ThresholdRule rule);

// applies the rule to a scalar; odd in x, level >= 0
double threshold_scalar(double x, double level, const ThresholdSpec& spec);

// rescales each row to length eta(|row|, level); rows at or below the
// level become exactly zero, zero rows stay zero, and rows kept by the
// hard rule are returned bit-identical
Matrix threshold_rows(const Matrix& matrix, double level, const ThresholdSpec& spec);

} // namespace slrd

#endif
