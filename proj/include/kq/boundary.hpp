#pragma once
#include <vector>

namespace kq::scan {

struct BoundaryEstimate {
    bool found = false;
    int index = -1;        ///< interval [index, index + 1] with the largest |dS|
    double boundary = 0.0; ///< midpoint of that interval
    double jump = 0.0;     ///< max |dS|
    double median = 0.0;   ///< median |dS|
};

/// Default ratio of the largest to the median adjacent entropy difference required to flag a boundary.
constexpr double kDefaultFlagFactor = 3.0;

/// Locates the largest discrete jump of y over the grid x (at least three points).
BoundaryEstimate detect_boundary(const std::vector<double> &x, const std::vector<double> &y, double flag_factor = kDefaultFlagFactor);

} // namespace kq::scan
