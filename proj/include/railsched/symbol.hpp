#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

namespace railsched {

/// Time in seconds. The two extreme values act as -inf / +inf sentinels.
using Seconds = std::int64_t;

inline constexpr Seconds kPosInf = std::numeric_limits<Seconds>::max();
inline constexpr Seconds kNegInf = std::numeric_limits<Seconds>::min();

constexpr bool is_finite(Seconds s) noexcept { return s != kPosInf && s != kNegInf; }

/// An opaque identifier from the fact format (node, train, resource, ...).
///
/// Integer-looking symbols order numerically and before all other symbols,
/// which order by their text. This mirrors the term order of the fact
/// format and keeps "2" < "10".
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(std::string text) : text_(std::move(text)) { classify(); }
    explicit Symbol(std::int64_t value) : text_(std::to_string(value)) { classify(); }

    const std::string& str() const noexcept { return text_; }
    bool is_integer() const noexcept { return is_int_; }
    std::int64_t integer() const noexcept { return int_value_; }

    friend bool operator==(const Symbol& a, const Symbol& b) noexcept { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) noexcept {
        if (a.is_int_ && b.is_int_) {
            if (auto c = a.int_value_ <=> b.int_value_; c != 0) {
                return c;
            }
            return a.text_.compare(b.text_) <=> 0;
        }
        if (a.is_int_ != b.is_int_) {
            return a.is_int_ ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return a.text_.compare(b.text_) <=> 0;
    }

    friend std::ostream& operator<<(std::ostream& out, const Symbol& s) { return out << s.text_; }

private:
    void classify() noexcept {
        is_int_ = false;
        int_value_ = 0;
        if (text_.empty() || text_.size() > 18) {
            return;
        }
        std::size_t i = (text_[0] == '-') ? 1 : 0;
        if (i == text_.size()) {
            return;
        }
        std::int64_t v = 0;
        for (; i < text_.size(); ++i) {
            char c = text_[i];
            if (c < '0' || c > '9') {
                return;
            }
            v = v * 10 + (c - '0');
        }
        is_int_ = true;
        int_value_ = text_[0] == '-' ? -v : v;
    }

    std::string text_;
    bool is_int_ = false;
    std::int64_t int_value_ = 0;
};

/// A directed edge (v, v').
struct Edge {
    Symbol from;
    Symbol to;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) { return "(" + e.from.str() + "," + e.to.str() + ")"; }
inline std::ostream& operator<<(std::ostream& out, const Edge& e) { return out << to_string(e); }

/// Exact non-negative rational, used for the delay in minutes.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d) {
        auto g = std::gcd(n, d);
        if (g == 0) {
            return {0, 1};
        }
        if (d < 0) {
            g = -g;
        }
        return {n / g, d / g};
    }

    friend bool operator==(const Rational&, const Rational&) = default;

    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace railsched

template <>
struct std::hash<railsched::Symbol> {
    std::size_t operator()(const railsched::Symbol& s) const noexcept { return std::hash<std::string>{}(s.str()); }
};

template <>
struct std::hash<railsched::Edge> {
    std::size_t operator()(const railsched::Edge& e) const noexcept {
        auto h = std::hash<railsched::Symbol>{};
        return h(e.from) * 1000003u ^ h(e.to);
    }
};
