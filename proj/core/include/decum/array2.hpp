#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace decum {

/// Dense row-major 2-d array: element (i, j) lives at data[i*n2 + j].
template <class T>
struct Array2 {
    int n1 = 0;
    int n2 = 0;
    std::vector<T> data;

    Array2() = default;
    Array2(int rows, int cols, T fill = T{})
        : n1(rows), n2(cols), data(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill) {}

    T& operator()(int i, int j) {
        assert(i >= 0 && i < n1 && j >= 0 && j < n2);
        return data[static_cast<std::size_t>(i) * n2 + j];
    }
    const T& operator()(int i, int j) const {
        assert(i >= 0 && i < n1 && j >= 0 && j < n2);
        return data[static_cast<std::size_t>(i) * n2 + j];
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Array2& o) const { return n1 == o.n1 && n2 == o.n2; }
};

}  // namespace decum
