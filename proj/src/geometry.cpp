#include "gamerecon/geometry.hpp"

namespace gamerecon {

double iou(const Roi& a, const Roi& b) {
    double ix = std::min(a.p2.x, b.p2.x) - std::max(a.p1.x, b.p1.x);
    double iy = std::min(a.p2.y, b.p2.y) - std::max(a.p1.y, b.p1.y);
    double inter = std::max(0.0, ix) * std::max(0.0, iy);
    double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

}  // namespace gamerecon
