#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace qpg {

/// Fixed-width bitset backed by 64-bit words. Used for adjacency rows and
/// member sets; exposes the word array so intersections stay branch-free.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int nbits) : n_(nbits), w_(static_cast<size_t>((nbits + 63) / 64), 0) {}

    int size() const { return n_; }
    size_t word_count() const { return w_.size(); }
    uint64_t word(size_t i) const { return w_[i]; }
    uint64_t* data() { return w_.data(); }
    const uint64_t* data() const { return w_.data(); }

    void set(int i) { w_[static_cast<size_t>(i) >> 6] |= uint64_t{1} << (i & 63); }
    void reset(int i) { w_[static_cast<size_t>(i) >> 6] &= ~(uint64_t{1} << (i & 63)); }
    bool test(int i) const { return (w_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1; }

    bool none() const {
        for (uint64_t w : w_)
            if (w) return false;
        return true;
    }

    int count() const {
        int c = 0;
        for (uint64_t w : w_) c += std::popcount(w);
        return c;
    }

    bool intersects(const Bitset& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    int and_count(const Bitset& o) const {
        int c = 0;
        for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
        return c;
    }

    Bitset& operator&=(const Bitset& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
    friend bool operator==(const Bitset& a, const Bitset& b) { return a.w_ == b.w_; }

    /// Ascending indices of set bits.
    std::vector<int> to_indices() const {
        std::vector<int> out;
        for (size_t wi = 0; wi < w_.size(); ++wi) {
            uint64_t w = w_[wi];
            while (w) {
                out.push_back(static_cast<int>(wi * 64) + std::countr_zero(w));
                w &= w - 1;
            }
        }
        return out;
    }

    template <typename Fn>
    void for_each_bit(Fn&& fn) const {
        for (size_t wi = 0; wi < w_.size(); ++wi) {
            uint64_t w = w_[wi];
            while (w) {
                fn(static_cast<int>(wi * 64) + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

}  // namespace qpg
