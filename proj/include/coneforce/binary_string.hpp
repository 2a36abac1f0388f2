#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "element_set.hpp"
#include "errors.hpp"

namespace coneforce {

// Finite word over {0,1}, stored as a '0'/'1' character string.
class BinaryString {
public:
    BinaryString() = default;
    explicit BinaryString(std::string_view literal) : bits_(literal) {
        for (char c : bits_)
            if (c != '0' && c != '1') throw FormatError("not a binary literal: '" + std::string(literal) + "'");
    }

    static BinaryString zeros(std::size_t n) { return from_raw(std::string(n, '0')); }
    static BinaryString ones(std::size_t n) { return from_raw(std::string(n, '1')); }
    // Characteristic string of s restricted to {0..length-1}.
    static BinaryString characteristic(ElementSet s, std::size_t length) {
        std::string b(length, '0');
        for (auto x : s.to_vector())
            if (x < length) b[x] = '1';
        return from_raw(std::move(b));
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i] == '1'; }
    bool at(std::size_t i) const {
        if (i >= bits_.size()) throw IndexError("bit index out of range");
        return bits_[i] == '1';
    }
    void push_back(bool b) { bits_.push_back(b ? '1' : '0'); }
    BinaryString appended(bool b) const {
        BinaryString r = *this;
        r.push_back(b);
        return r;
    }
    BinaryString concat(const BinaryString& o) const { return from_raw(bits_ + o.bits_); }

    BinaryString prefix(std::size_t n) const { return from_raw(bits_.substr(0, std::min(n, bits_.size()))); }
    BinaryString slice(std::size_t from, std::size_t len) const { return from_raw(bits_.substr(from, len)); }

    // Non-strict prefix relation (this ⊑ o).
    bool is_prefix_of(const BinaryString& o) const {
        return bits_.size() <= o.bits_.size() && std::equal(bits_.begin(), bits_.end(), o.bits_.begin());
    }
    bool is_strict_prefix_of(const BinaryString& o) const { return bits_.size() < o.bits_.size() && is_prefix_of(o); }

    // set(ρ) = {i : ρ(i) = 1}
    ElementSet ones_set() const {
        ElementSet s;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] == '1') s.insert(i);
        return s;
    }
    std::size_t count_ones() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), '1')); }

    const std::string& str() const { return bits_; }

    auto operator<=>(const BinaryString&) const = default;
    bool operator==(const BinaryString&) const = default;

private:
    static BinaryString from_raw(std::string s) {
        BinaryString r;
        r.bits_ = std::move(s);
        return r;
    }
    std::string bits_;
};

inline bool is_compatible(const BinaryString& a, const BinaryString& b) {
    return a.is_prefix_of(b) || b.is_prefix_of(a);
}

inline bool shortlex_less(const BinaryString& a, const BinaryString& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// z with its first |s| bits replaced by s (the paper's z/s).
inline BinaryString overwrite(const BinaryString& z, const BinaryString& s) {
    if (z.size() < s.size()) throw LengthError("overwrite: target shorter than the overwriting string");
    return s.concat(z.slice(s.size(), z.size() - s.size()));
}

// Component i (0-based) of an n-fold interleaving.
inline BinaryString project(const BinaryString& x, std::size_t n, std::size_t i) {
    if (n == 0 || i >= n) throw IndexError("project: component index out of range");
    BinaryString r;
    for (std::size_t pos = i; pos < x.size(); pos += n) r.push_back(x[pos]);
    return r;
}

inline BinaryString interleave(const std::vector<BinaryString>& xs) {
    if (xs.empty()) return {};
    const std::size_t len = xs.front().size();
    for (const auto& x : xs)
        if (x.size() != len) throw LengthError("interleave: components differ in length");
    BinaryString r;
    for (std::size_t pos = 0; pos < len; ++pos)
        for (const auto& x : xs) r.push_back(x[pos]);
    return r;
}

// All strings of length n in lexicographic order.
inline std::vector<BinaryString> all_strings(std::size_t n) {
    if (n >= 26) throw RangeError("all_strings: length too large");
    std::vector<BinaryString> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        BinaryString s;
        for (std::size_t i = 0; i < n; ++i) s.push_back((v >> (n - 1 - i)) & 1u);
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<BinaryString> parse_strings(const std::vector<std::string>& xs) {
    std::vector<BinaryString> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.emplace_back(x);
    return out;
}

}  // namespace coneforce
