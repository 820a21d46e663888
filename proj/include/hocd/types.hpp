#ifndef HOCD_TYPES_HPP
#define HOCD_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hocd {

/// A single observed variable: sample values plus a text label.
struct Series {
    std::vector<double> values;
    std::string label;

    std::size_t size() const { return values.size(); }
};

/// Column-labeled sample matrix, stored column-major as labeled series.
struct Dataset {
    std::vector<Series> columns;

    std::size_t n_samples() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t n_columns() const { return columns.size(); }

    const Series* find(const std::string& label) const {
        for (const auto& c : columns)
            if (c.label == label) return &c;
        return nullptr;
    }
    const Series& at(const std::string& label) const {
        const Series* s = find(label);
        if (!s) throw std::out_of_range("no column named '" + label + "'");
        return *s;
    }
    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(columns.size());
        for (const auto& c : columns) out.push_back(c.label);
        return out;
    }
};

struct InputShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SampleSizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedOrderError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A cumulant needed by an estimator sits below its usability threshold.
struct DegenerateCumulantError : std::runtime_error {
    double estimate;
    double standard_error;
    DegenerateCumulantError(const std::string& what, double est, double se)
        : std::runtime_error(what), estimate(est), standard_error(se) {}
};

/// The closed-form square root argument is non-positive; strongly negative
/// arguments signal that the hypothesized structure is false.
struct NonEstimableError : std::runtime_error {
    bool strongly_negative;
    NonEstimableError(const std::string& what, bool strong)
        : std::runtime_error(what), strongly_negative(strong) {}
};

struct NoNullSpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstraintError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CoefficientRecoveryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hocd

#endif
