#include "kq/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "kq/error.hpp"

namespace kq::scan {

BoundaryEstimate detect_boundary(const std::vector<double> &x, const std::vector<double> &y, double flag_factor) {
    require(x.size() == y.size(), ErrorCode::InvalidArgument, "detect_boundary: x and y sizes differ");
    require(x.size() >= 3, ErrorCode::InvalidArgument, "detect_boundary: needs at least three grid points");
    require(flag_factor > 0, ErrorCode::InvalidArgument, "detect_boundary: flag factor must be positive");
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = std::abs(y[i + 1] - y[i]);
    BoundaryEstimate r;
    r.index = static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
    r.jump = d[r.index];
    r.boundary = 0.5 * (x[r.index] + x[r.index + 1]);
    std::vector<double> s = d;
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    r.median = n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    r.found = r.jump > 1e-12 && r.jump >= flag_factor * r.median;
    return r;
}

} // namespace kq::scan
