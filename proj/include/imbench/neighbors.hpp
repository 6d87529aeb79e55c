#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "imbench/matrix.hpp"

namespace imbench {

struct Neighbor {
    std::size_t index;
    double distance;
};

// Exact k-nearest-neighbour search under Euclidean distance over an immutable
// point set (the matrix must outlive the index). Two backends: a brute-force
// scan, which is the reference, and a kd-tree that must return exactly the
// same index sets, including the tie rule: equal distances break toward the
// lower point index.
class NeighborIndex {
public:
    enum class Backend { brute_force, kd_tree, automatic };

    explicit NeighborIndex(const Matrix& points, Backend backend = Backend::automatic);
    ~NeighborIndex();
    NeighborIndex(NeighborIndex&&) noexcept;
    NeighborIndex& operator=(NeighborIndex&&) noexcept;
    NeighborIndex(const NeighborIndex&) = delete;
    NeighborIndex& operator=(const NeighborIndex&) = delete;

    std::size_t size() const;
    Backend backend() const;

    // k smallest distances to the query, ascending, ties by lower index.
    // Throws std::invalid_argument when k is 0 or exceeds the candidate count.
    std::vector<Neighbor> query(std::span<const double> point, std::size_t k) const;

    // Same, with the indexed row `row` excluded by identity. Duplicate points
    // at other rows still qualify as neighbours.
    std::vector<Neighbor> query_excluding(std::span<const double> point, std::size_t row,
                                          std::size_t k) const;
    std::vector<Neighbor> query_excluding(std::size_t row, std::size_t k) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace imbench
