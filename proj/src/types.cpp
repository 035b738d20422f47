#include "smokeflow/types.hpp"

#include <numeric>

namespace smokeflow {

void ImageFrame::validate() const {
    if (channels != 1 && channels != 3)
        throw InvalidParameter("frame channels must be 1 or 3, got " +
                               std::to_string(channels));
    if (width <= 0 || height <= 0)
        throw InvalidParameter("frame dimensions must be positive");
    if (data.size() != static_cast<size_t>(width) * height * channels)
        throw InvalidParameter("frame buffer length does not match dimensions");
    for (float v : data)
        if (!(v >= 0.0f && v <= 1.0f))
            throw NonFiniteInput("frame value outside [0,1]");
}

size_t Mask::count() const {
    return static_cast<size_t>(
        std::accumulate(data.begin(), data.end(), size_t{0}));
}

}  // namespace smokeflow
