#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace beamcover {

/// Fixed-capacity dynamic bitset with word access, sized once at
/// construction. Backs adjacency rows and solver scratch sets.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    int size_bits() const { return nbits_; }
    int word_count() const { return static_cast<int>(words_.size()); }

    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    void clear() { for (auto& w : words_) w = 0; }

    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (auto w : words_) if (w != 0) return true;
        return false;
    }

    std::span<std::uint64_t> words() { return words_; }
    std::span<const std::uint64_t> words() const { return words_; }

    Bitset& operator&=(const Bitset& o) {
        assert(nbits_ == o.nbits_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }

    /// Removes every bit set in o.
    Bitset& subtract(const Bitset& o) {
        assert(nbits_ == o.nbits_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    /// First set bit at or after `from`, or -1.
    int next_set(int from) const {
        if (from >= nbits_) return -1;
        int w = from >> 6;
        std::uint64_t cur = words_[w] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (cur != 0) return (w << 6) + std::countr_zero(cur);
            if (++w >= static_cast<int>(words_.size())) return -1;
            cur = words_[w];
        }
    }

private:
    int nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

/// popcount(a & b) without materializing the intersection.
inline int and_count(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    int c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
    return c;
}

}  // namespace beamcover
