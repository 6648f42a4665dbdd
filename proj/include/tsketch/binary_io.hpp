#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "tsketch/error.hpp"

namespace tsketch::binio {

// Little-endian fixed-width encoding shared by the TSK1 and PRB1 dumps.

inline void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b.data(), 8);
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw ShapeError("binary dump truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

/// Dimension field of a header; rejects values no real dump could hold.
inline Eigen::Index get_dim(std::istream& is) {
    const std::uint64_t v = get_u64(is);
    if (v > (std::uint64_t(1) << 31)) throw ShapeError("binary dump: implausible dimension in header");
    return static_cast<Eigen::Index>(v);
}

/// Guard on the number of doubles a header announces.
inline void check_payload(double entries) {
    if (entries > double(std::uint64_t(1) << 31)) throw ShapeError("binary dump: payload too large");
}

inline void put_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), 4); }

inline void expect_magic(std::istream& is, std::string_view magic) {
    char buf[4] = {};
    if (!is.read(buf, 4) || std::memcmp(buf, magic.data(), 4) != 0)
        throw ShapeError("binary dump: bad magic, expected " + std::string(magic));
}

/// Values in row-major order of the given expression.
template <class M>
void put_row_major(std::ostream& os, const M& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) put_f64(os, static_cast<double>(mat(i, j)));
}

template <class M>
void get_row_major(std::istream& is, M& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = get_f64(is);
}

template <class M>
void put_col_major(std::ostream& os, const M& mat) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
        for (Eigen::Index i = 0; i < mat.rows(); ++i) put_f64(os, static_cast<double>(mat(i, j)));
}

template <class M>
void get_col_major(std::istream& is, M& mat) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
        for (Eigen::Index i = 0; i < mat.rows(); ++i) mat(i, j) = get_f64(is);
}

}  // namespace tsketch::binio
