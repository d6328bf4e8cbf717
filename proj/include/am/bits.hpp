#ifndef AM_BITS_HPP
#define AM_BITS_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace am {

/// Fixed-width vector of bits. Index 0 is the leftmost bit when rendered
/// as a string, matching the order bits are written in tables.
class Bits {
public:
    Bits() = default;

    explicit Bits(std::size_t width, bool fill = false)
        : width_(width), bits_(width, fill) {}

    static Bits zeros(std::size_t width) { return Bits(width, false); }
    static Bits ones(std::size_t width) { return Bits(width, true); }

    static Bits fromString(const std::string& s) {
        Bits b(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') {
                b.bits_[i] = true;
            } else if (s[i] != '0') {
                throw std::invalid_argument("Bits::fromString: bad character");
            }
        }
        return b;
    }

    std::size_t size() const { return width_; }

    bool test(std::size_t i) const {
        checkIndex(i);
        return bits_[i];
    }

    void set(std::size_t i, bool value) {
        checkIndex(i);
        bits_[i] = value;
    }

    void flip(std::size_t i) {
        checkIndex(i);
        bits_[i] = !bits_[i];
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (bool b : bits_) c += b ? 1 : 0;
        return c;
    }

    bool allOnes() const { return popcount() == width_; }
    bool allZeros() const { return popcount() == 0; }

    std::string str() const {
        std::string s(width_, '0');
        for (std::size_t i = 0; i < width_; ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    friend bool operator==(const Bits& a, const Bits& b) {
        return a.width_ == b.width_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const Bits& a, const Bits& b) { return !(a == b); }

private:
    void checkIndex(std::size_t i) const {
        if (i >= width_) throw std::out_of_range("Bits: index out of range");
    }

    std::size_t width_ = 0;
    std::vector<bool> bits_;
};

} // namespace am

#endif
