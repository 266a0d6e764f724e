#include "slrd/thresholding.hpp"

#include <cmath>
#include <string>

namespace slrd {

void validate(const ThresholdSpec& spec)
{
    if (spec.rule == ThresholdRule::Scad && !(spec.scad_a > 2.0))
        throw InvalidInput("SCAD parameter must exceed 2");
    if (spec.rule == ThresholdRule::Mcp && !(spec.mcp_b > 1.0))
        throw InvalidInput("MCP parameter must exceed 1");
}

ThresholdRule parse_threshold_rule(const std::string& name)
{
    if (name == "hard") return ThresholdRule::Hard;
    if (name == "soft") return ThresholdRule::Soft;
    if (name == "scad") return ThresholdRule::Scad;
    if (name == "mcp") return ThresholdRule::Mcp;
    throw InvalidInput("unknown threshold rule '" + name + "'");
}

const char* threshold_rule_name(ThresholdRule rule)
{
    switch (rule) {
        case ThresholdRule::Hard: return "hard";
        case ThresholdRule::Soft: return "soft";
        case ThresholdRule::Scad: return "scad";
        case ThresholdRule::Mcp: return "mcp";
    }
    throw InvalidInput("unknown threshold rule");
}

double threshold_scalar(double x, double level, const ThresholdSpec& spec)
{
    if (!(level >= 0.0))
        throw InvalidInput("threshold level must be non-negative");
    validate(spec);

    const double sign = x < 0.0 ? -1.0 : 1.0;
    const double ax = std::abs(x);
    if (ax <= level)
        return 0.0;

    switch (spec.rule) {
        case ThresholdRule::Hard:
            return x;
        case ThresholdRule::Soft:
            return sign * (ax - level);
        case ThresholdRule::Scad: {
            const double a = spec.scad_a;
            if (ax <= 2.0 * level)
                return sign * (ax - level);
            if (ax <= a * level)
                return ((a - 1.0) * x - sign * a * level) / (a - 2.0);
            return x;
        }
        case ThresholdRule::Mcp: {
            const double b = spec.mcp_b;
            if (ax <= b * level)
                return sign * (ax - level) * b / (b - 1.0);
            return x;
        }
    }
    throw InvalidInput("unknown threshold rule");
}

Matrix threshold_rows(const Matrix& matrix, double level, const ThresholdSpec& spec)
{
    if (!(level >= 0.0))
        throw InvalidInput("threshold level must be non-negative");
    validate(spec);

    Matrix out = matrix;
    for (Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm <= level) {
            out.row(i).setZero();
        } else if (spec.rule != ThresholdRule::Hard) {
            out.row(i) *= threshold_scalar(norm, level, spec) / norm;
        }
        // surviving rows under the hard rule stay bit-identical
    }
    return out;
}

} // namespace slrd
