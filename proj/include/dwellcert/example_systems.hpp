#pragma once

#include "dwellcert/matrix.hpp"
#include "dwellcert/system.hpp"

namespace dwellcert {

/// Two damped rotations whose fast and slow axes are swapped between the
/// modes. Each mode alone spirals in at envelope rate eps; switching at the
/// wrong instants can still pump energy, which is what makes the pair a good
/// stress case for dwell-time analysis.
inline SwitchedLinearSystem rotation_pair(double eps) {
    require(eps > 0.0, "rotation_pair: eps must be positive");
    return SwitchedLinearSystem({
        Matrix::from_rows({{-eps, -1.0}, {4.0, -eps}}),
        Matrix::from_rows({{-eps, -4.0}, {1.0, -eps}}),
    });
}

/// Two saddle modes (each individually unstable) that admit a dwell-time
/// stability certificate when the switching is neither too fast nor too slow.
inline SwitchedLinearSystem saddle_pair() {
    return SwitchedLinearSystem({
        Matrix::from_rows({{-1.9, 0.6}, {0.6, -0.1}}),
        Matrix::from_rows({{0.1, -0.9}, {0.1, -1.4}}),
    });
}

/// Built-in systems for the `example` workflows: 1 is the rotation pair
/// (eps-parameterized), 2 the saddle pair.
inline SwitchedLinearSystem builtin_system(int which, double eps = 0.1) {
    switch (which) {
        case 1: return rotation_pair(eps);
        case 2: return saddle_pair();
        default: throw std::invalid_argument("builtin_system: known examples are 1 and 2");
    }
}

}  // namespace dwellcert
