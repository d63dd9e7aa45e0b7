// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace augmine {

// 1-based, inclusive line range inside one file.
struct LineRange {
    std::string file;
    int start = 1;
    int end = 1;

    bool overlaps(int lo, int hi) const { return start <= hi && end >= lo; }
    bool overlaps(const LineRange& o) const { return overlaps(o.start, o.end); }
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace augmine
