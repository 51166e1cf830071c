#pragma once

#include <rdm/errors.hpp>
#include <rdm/io.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace rdm {

using Index = std::int64_t;
using Site = std::vector<Index>;

// Axis-aligned box of lattice sites, lo <= x <= hi per axis. Linear indices
// are lexicographic with the last coordinate fastest.
class Box {
  public:
    Box(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.empty() || lo_.size() != hi_.size())
            throw domain_error("box needs matching nonempty bounds");
        for (std::size_t a = 0; a < lo_.size(); ++a)
            if (lo_[a] > hi_[a])
                throw domain_error("box axis " + fmt_int(static_cast<Index>(a)) +
                                   " has lower bound above upper bound");
        stride_.assign(lo_.size(), 1);
        volume_ = 1;
        for (std::size_t a = lo_.size(); a-- > 0;) {
            stride_[a] = volume_;
            std::size_t ext = static_cast<std::size_t>(hi_[a] - lo_[a] + 1);
            if (ext != 0 && volume_ > (std::size_t{1} << 48) / ext)
                throw resource_error("box volume overflows the supported range");
            volume_ *= ext;
        }
    }

    int dim() const { return static_cast<int>(lo_.size()); }
    std::size_t volume() const { return volume_; }
    Index lower(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
    Index upper(int axis) const { return hi_[static_cast<std::size_t>(axis)]; }
    Index extent(int axis) const {
        return hi_[static_cast<std::size_t>(axis)] - lo_[static_cast<std::size_t>(axis)] + 1;
    }

    bool contains(const Site& x) const {
        if (x.size() != lo_.size()) return false;
        for (std::size_t a = 0; a < lo_.size(); ++a)
            if (x[a] < lo_[a] || x[a] > hi_[a]) return false;
        return true;
    }

    std::size_t index(const Site& x) const {
        if (!contains(x)) throw domain_error("site outside box");
        std::size_t k = 0;
        for (std::size_t a = 0; a < lo_.size(); ++a)
            k += static_cast<std::size_t>(x[a] - lo_[a]) * stride_[a];
        return k;
    }

    Site site(std::size_t k) const {
        if (k >= volume_) throw domain_error("linear index outside box");
        Site x(lo_.size());
        for (std::size_t a = 0; a < lo_.size(); ++a) {
            x[a] = lo_[a] + static_cast<Index>(k / stride_[a]);
            k %= stride_[a];
        }
        return x;
    }

    bool operator==(const Box& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

  private:
    Site lo_, hi_;
    std::vector<std::size_t> stride_;
    std::size_t volume_;
};

// Real-valued function on the sites of a box, stored in box index order.
struct SiteFunction {
    Box box;
    std::vector<double> values;
};

} // namespace rdm
