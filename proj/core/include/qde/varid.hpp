#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace qde {

// Variable universe. t[i][j] are the level variables (t[N][a] is never
// materialized, level N means the z alphabet), z[a] equivariant parameters,
// h the twist parameter, q[i] dynamical parameters, x/y the two divided
// difference alphabets, theta/gamma Chern roots, aux scratch symbols
// (aux[0] is the lattice step whenever it is kept symbolic).
enum class VarKind : std::uint8_t { t, z, h, q, x, y, theta, gamma, aux };

struct VarId {
  VarKind kind{VarKind::h};
  std::int16_t i{0};
  std::int16_t j{0};

  friend auto operator<=>(const VarId&, const VarId&) = default;
};

inline VarId t_var(int level, int a) {
  return {VarKind::t, static_cast<std::int16_t>(level), static_cast<std::int16_t>(a)};
}
inline VarId z_var(int a) { return {VarKind::z, static_cast<std::int16_t>(a), 0}; }
inline VarId h_var() { return {VarKind::h, 0, 0}; }
inline VarId q_var(int i) { return {VarKind::q, static_cast<std::int16_t>(i), 0}; }
inline VarId x_var(int i) { return {VarKind::x, static_cast<std::int16_t>(i), 0}; }
inline VarId y_var(int i) { return {VarKind::y, static_cast<std::int16_t>(i), 0}; }
inline VarId theta_var(int i, int a) {
  return {VarKind::theta, static_cast<std::int16_t>(i), static_cast<std::int16_t>(a)};
}
inline VarId gamma_var(int i, int a) {
  return {VarKind::gamma, static_cast<std::int16_t>(i), static_cast<std::int16_t>(a)};
}
inline VarId aux_var(int k) { return {VarKind::aux, static_cast<std::int16_t>(k), 0}; }

std::string var_string(VarId v);

}  // namespace qde
