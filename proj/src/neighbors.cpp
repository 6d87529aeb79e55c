#include "imbench/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace imbench {

namespace {

// Candidate ordering: smaller squared distance first, ties to the lower row
// index. Both backends rank with exactly this comparison, so their results
// are identical bit for bit.
struct Candidate {
    double dist2;
    std::size_t index;
    bool operator<(const Candidate& o) const {
        return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
};

// Fixed-capacity worst-on-top heap of the best k candidates seen so far.
class BestK {
public:
    explicit BestK(std::size_t k) : k_(k) { heap_.reserve(k); }

    void offer(const Candidate& c) {
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    bool full() const { return heap_.size() == k_; }
    double worst_dist2() const { return heap_.front().dist2; }

    std::vector<Neighbor> finish() {
        std::sort(heap_.begin(), heap_.end());
        std::vector<Neighbor> out;
        out.reserve(heap_.size());
        for (const auto& c : heap_) out.push_back({c.index, std::sqrt(c.dist2)});
        return out;
    }

private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

struct KdNode {
    // leaf: [begin, end) into the permutation; internal: split dim/value
    std::size_t begin = 0, end = 0;
    std::size_t split_dim = 0;
    double split_value = 0;
    int left = -1, right = -1;
    bool leaf() const { return left < 0; }
};

constexpr std::size_t kLeafSize = 16;

} // namespace

struct NeighborIndex::Impl {
    const Matrix& points;
    Backend backend;
    std::vector<std::size_t> perm;  // kd-tree leaf ordering
    std::vector<KdNode> nodes;
    int root = -1;

    explicit Impl(const Matrix& pts, Backend be) : points(pts), backend(be) {
        if (points.rows() == 0) {
            throw std::invalid_argument("NeighborIndex: empty point set");
        }
        if (backend == Backend::automatic) {
            backend = (points.cols() <= 16 && points.rows() >= 2 * kLeafSize)
                          ? Backend::kd_tree
                          : Backend::brute_force;
        }
        if (backend == Backend::kd_tree) build();
    }

    void build() {
        perm.resize(points.rows());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        nodes.reserve(2 * points.rows() / kLeafSize + 2);
        root = build_node(0, points.rows());
    }

    int build_node(std::size_t begin, std::size_t end) {
        KdNode node;
        node.begin = begin;
        node.end = end;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (end - begin <= kLeafSize) return id;

        // split on the widest dimension at the median
        std::size_t dim = 0;
        double best_spread = -1;
        for (std::size_t d = 0; d < points.cols(); ++d) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = begin; i < end; ++i) {
                const double v = points(perm[i], d);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo > best_spread) {
                best_spread = hi - lo;
                dim = d;
            }
        }
        if (best_spread <= 0) return id; // all points identical: keep as leaf

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm.begin() + begin, perm.begin() + mid, perm.begin() + end,
                         [&](std::size_t a, std::size_t b) {
                             const double va = points(a, dim), vb = points(b, dim);
                             return va < vb || (va == vb && a < b);
                         });
        nodes[id].split_dim = dim;
        nodes[id].split_value = points(perm[mid], dim);
        const int left = build_node(begin, mid);
        const int right = build_node(mid, end);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }

    void scan_range(std::span<const double> q, std::size_t begin, std::size_t end,
                    std::size_t exclude, BestK& best) const {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t idx = perm[i];
            if (idx == exclude) continue;
            best.offer({squared_distance(q, points.row(idx)), idx});
        }
    }

    void search(std::span<const double> q, int node_id, std::size_t exclude, BestK& best) const {
        const KdNode& node = nodes[static_cast<std::size_t>(node_id)];
        if (node.leaf()) {
            scan_range(q, node.begin, node.end, exclude, best);
            return;
        }
        const double delta = q[node.split_dim] - node.split_value;
        const int near = delta < 0 ? node.left : node.right;
        const int far = delta < 0 ? node.right : node.left;
        search(q, near, exclude, best);
        // descend the far side unless every point there is strictly worse than
        // the current worst; on equality a lower index could still win the tie
        if (!best.full() || delta * delta <= best.worst_dist2()) {
            search(q, far, exclude, best);
        }
    }

    std::vector<Neighbor> query(std::span<const double> q, std::size_t exclude,
                                std::size_t k) const {
        const std::size_t candidates = points.rows() - (exclude < points.rows() ? 1 : 0);
        if (k == 0) throw std::invalid_argument("knn query: k must be >= 1");
        if (k > candidates) {
            throw std::invalid_argument("knn query: k=" + std::to_string(k) +
                                        " exceeds candidate count m=" + std::to_string(candidates));
        }
        BestK best(k);
        if (backend == Backend::kd_tree) {
            search(q, root, exclude, best);
        } else {
            for (std::size_t i = 0; i < points.rows(); ++i) {
                if (i == exclude) continue;
                best.offer({squared_distance(q, points.row(i)), i});
            }
        }
        return best.finish();
    }
};

NeighborIndex::NeighborIndex(const Matrix& points, Backend backend)
    : impl_(std::make_unique<Impl>(points, backend)) {}
NeighborIndex::~NeighborIndex() = default;
NeighborIndex::NeighborIndex(NeighborIndex&&) noexcept = default;
NeighborIndex& NeighborIndex::operator=(NeighborIndex&&) noexcept = default;

std::size_t NeighborIndex::size() const { return impl_->points.rows(); }
NeighborIndex::Backend NeighborIndex::backend() const { return impl_->backend; }

std::vector<Neighbor> NeighborIndex::query(std::span<const double> point, std::size_t k) const {
    return impl_->query(point, impl_->points.rows(), k);
}

std::vector<Neighbor> NeighborIndex::query_excluding(std::span<const double> point,
                                                     std::size_t row, std::size_t k) const {
    return impl_->query(point, row, k);
}

std::vector<Neighbor> NeighborIndex::query_excluding(std::size_t row, std::size_t k) const {
    return impl_->query(impl_->points.row(row), row, k);
}

} // namespace imbench
