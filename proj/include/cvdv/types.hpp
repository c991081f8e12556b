#pragma once

#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <string>

namespace cvdv {

using Complex = std::complex<double>;

enum class Spin : std::uint8_t { Up = 0, Down = 1 };

inline constexpr Spin flip(Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; }
inline const char* to_string(Spin s) { return s == Spin::Up ? "up" : "down"; }

// Label of an NV spin register (1 = Bob's memory, 2 and 3 = Alice's ancillas).
struct SpinId {
  int value = 0;
  friend constexpr auto operator<=>(SpinId, SpinId) = default;
};

// Label of an optical mode. Numeric labels follow the protocol diagram;
// the fiber-loss environment mode "v" gets its own reserved label.
struct ModeId {
  int value = 0;
  friend constexpr auto operator<=>(ModeId, ModeId) = default;
};

inline constexpr ModeId kLossMode{1000};

inline std::string to_string(SpinId s) { return "s" + std::to_string(s.value); }
inline std::string to_string(ModeId m) {
  return m == kLossMode ? std::string("v") : std::to_string(m.value);
}

// Pure spin-1/2 state in the {up, down} basis.
struct SpinVector {
  Complex up;
  Complex down;

  double norm_sq() const { return std::norm(up) + std::norm(down); }
};

// 2x2 spin density matrix, entries indexed [row][col] with 0 = up, 1 = down.
struct SpinDensity {
  std::array<std::array<Complex, 2>, 2> m{};

  static SpinDensity pure(const SpinVector& v) {
    SpinDensity d;
    const std::array<Complex, 2> c{v.up, v.down};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) d.m[i][j] = c[i] * std::conj(c[j]);
    return d;
  }

  Complex trace() const { return m[0][0] + m[1][1]; }
  double determinant() const { return (m[0][0] * m[1][1] - m[0][1] * m[1][0]).real(); }
};

}  // namespace cvdv
