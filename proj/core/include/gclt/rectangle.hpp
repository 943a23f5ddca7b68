#pragma once

namespace gclt {

// Planar rectangle E = (a1,b1] x (a2,b2] with positive area.
struct Rectangle {
    double a1 = 0.0;
    double b1 = 0.0;
    double a2 = 0.0;
    double b2 = 0.0;

    double area() const { return (b1 - a1) * (b2 - a2); }
    bool valid() const { return a1 >= 0 && a1 < b1 && a2 >= 0 && a2 < b2; }
    bool disjoint_from(const Rectangle& o) const {
        bool overlap1 = a1 < o.b1 && o.a1 < b1;
        bool overlap2 = a2 < o.b2 && o.a2 < b2;
        return !(overlap1 && overlap2);
    }
};

} // namespace gclt
