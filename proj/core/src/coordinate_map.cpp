#include "hccepose/coordinate_map.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hccepose/errors.hpp"

namespace hcce {

CoordinateMap CoordinateMap::blank(int width, int height) {
    if (width < 1 || height < 1) {
        throw DomainError("CoordinateMap: dimensions must be positive");
    }
    CoordinateMap map;
    map.width = width;
    map.height = height;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    map.mask.assign(n, 0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    map.front.assign(n, Eigen::Vector3d::Constant(nan));
    map.back.assign(n, Eigen::Vector3d::Constant(nan));
    return map;
}

std::size_t CoordinateMap::mask_area() const {
    std::size_t area = 0;
    for (std::uint8_t m : mask) area += m ? 1 : 0;
    return area;
}

void CoordinateMap::validate() const {
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (width < 1 || height < 1 || mask.size() != n || front.size() != n || back.size() != n) {
        throw ShapeError("CoordinateMap: inconsistent dimensions (" + std::to_string(width) +
                         "x" + std::to_string(height) + ", mask " + std::to_string(mask.size()) +
                         ", front " + std::to_string(front.size()) + ", back " +
                         std::to_string(back.size()) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i] && (!front[i].allFinite() || !back[i].allFinite())) {
            throw DomainError("CoordinateMap: non-finite coordinates at masked pixel " +
                              std::to_string(i));
        }
    }
}

}  // namespace hcce
