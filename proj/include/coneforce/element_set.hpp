#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace coneforce {

// Finite subset of {0..63}.
class ElementSet {
public:
    static constexpr std::size_t capacity = 64;

    constexpr ElementSet() = default;
    constexpr explicit ElementSet(std::uint64_t bits) : bits_(bits) {}
    ElementSet(std::initializer_list<std::size_t> xs) {
        for (auto x : xs) insert(x);
    }

    static ElementSet range(std::size_t lo, std::size_t hi) {
        ElementSet s;
        for (std::size_t x = lo; x < hi; ++x) s.insert(x);
        return s;
    }
    static ElementSet below(std::size_t n) { return range(0, n); }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

    bool contains(std::size_t x) const { return x < capacity && ((bits_ >> x) & 1u); }
    void insert(std::size_t x) {
        if (x >= capacity) throw RangeError("element " + std::to_string(x) + " exceeds ElementSet capacity");
        bits_ |= std::uint64_t{1} << x;
    }
    void erase(std::size_t x) {
        if (x < capacity) bits_ &= ~(std::uint64_t{1} << x);
    }

    constexpr bool subset_of(ElementSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(ElementSet o) const { return (bits_ & o.bits_) != 0; }

    std::vector<std::size_t> to_vector() const {
        std::vector<std::size_t> out;
        for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
        return out;
    }
    std::size_t min() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

    friend constexpr ElementSet operator|(ElementSet a, ElementSet b) { return ElementSet(a.bits_ | b.bits_); }
    friend constexpr ElementSet operator&(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & b.bits_); }
    friend constexpr ElementSet operator-(ElementSet a, ElementSet b) { return ElementSet(a.bits_ & ~b.bits_); }
    ElementSet& operator|=(ElementSet o) { bits_ |= o.bits_; return *this; }
    ElementSet& operator&=(ElementSet o) { bits_ &= o.bits_; return *this; }
    ElementSet& operator-=(ElementSet o) { bits_ &= ~o.bits_; return *this; }

    auto operator<=>(const ElementSet&) const = default;

private:
    std::uint64_t bits_ = 0;
};

// Sets of natural numbers compare by sorted element list.
inline bool sorted_list_less(ElementSet a, ElementSet b) {
    auto va = a.to_vector();
    auto vb = b.to_vector();
    return va < vb;
}

}  // namespace coneforce
